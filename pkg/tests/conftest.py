import pathlib

import pytest

from cocharlab.fields import FieldDescriptor, parse_descriptor

DEMOS = pathlib.Path(__file__).resolve().parent.parent / "demos"


@pytest.fixture(scope="session")
def Q():
    return FieldDescriptor.rationals()


@pytest.fixture(scope="session")
def F2():
    return FieldDescriptor.finite(2)


@pytest.fixture(scope="session")
def F3():
    return FieldDescriptor.finite(3)


@pytest.fixture(scope="session")
def F5():
    return FieldDescriptor.finite(5)


@pytest.fixture(scope="session")
def GF4():
    return FieldDescriptor.finite(2, 2)


@pytest.fixture(scope="session")
def GF16():
    return FieldDescriptor.finite(2, 4)


@pytest.fixture(scope="session")
def F2T():
    return parse_descriptor("Fp(t):p=2")


@pytest.fixture(scope="session")
def tower_ks():
    # k(s) with s^3 = t over F_2(t)
    return parse_descriptor("ext(Fp(t):p=2;X^3+t;s)")


@pytest.fixture(scope="session")
def tower_ksz():
    # k(s, zeta): the separable closure step of the worked example
    return parse_descriptor("ext(ext(Fp(t):p=2;X^3+t;s);X^2+X+1;z)")


@pytest.fixture(scope="session")
def tower_ka2():
    # k(a^2): inseparable quadratic step, (a^2)^2 = s
    return parse_descriptor("ext(ext(Fp(t):p=2;X^3+t;s);X^2+s;b)")


@pytest.fixture(scope="session")
def tower_ka():
    # k(a): a^2 = a^2 generator b, a^2 = b
    return parse_descriptor(
        "ext(ext(ext(Fp(t):p=2;X^3+t;s);X^2+s;b);X^2+b;a)")
