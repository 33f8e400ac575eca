import random

import pytest

from cocharlab.errors import NonSquareError
from cocharlab.linalg import Matrix
from cocharlab.poly import Polynomial


def test_identity_and_companion(Q):
    ident = Matrix.identity(Q, 3)
    assert ident * ident == ident
    p = Polynomial.parse(Q, "T^3-2*T+5")
    c = Matrix.companion(p)
    assert c.charpoly() == p


def test_charpoly_examples(Q, F2T):
    z = Matrix.zeros(Q, 4)
    assert z.charpoly() == Polynomial.parse(Q, "T^4")
    d = Matrix(Q, [[1, 0], [0, 2]])
    assert d.charpoly() == Polynomial.parse(Q, "(T-1)*(T-2)")
    mu = Polynomial.parse(F2T, "T^12+t")
    assert Matrix.companion(mu).charpoly() == mu


def test_charpoly_matches_determinant_oracle(Q):
    # independent oracle: interpolate det(xI - A) at integer points
    rng = random.Random(5)
    for n in (2, 3):
        a = Matrix(Q, [[rng.randrange(-3, 4) for _ in range(n)]
                       for _ in range(n)])
        cp = a.charpoly()
        for x in range(-2, 3):
            xi = Matrix.identity(Q, n) * Q.from_int(x) - a
            assert xi.det() == cp.evaluate(Q.from_int(x))


def test_inverse_and_det(Q, F3):
    a = Matrix(Q, [[1, 2], [3, 5]])
    assert a * a.inverse() == Matrix.identity(Q, 2)
    assert a.det() == Q.from_int(-1)
    b = Matrix(F3, [[1, 2], [2, 2]])
    assert b.det() == F3.from_int(1 * 2 - 4)
    assert (b * b.inverse()) == Matrix.identity(F3, 2)


def test_nullspace_solve_rank(Q):
    a = Matrix(Q, [[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    assert a.rank() == 2
    ns = a.nullspace()
    assert len(ns) == 1
    assert all(not c for c in a.mul_vec(ns[0]))
    sol = a.solve(a.mul_vec((Q.from_int(1), Q.from_int(2), Q.from_int(3))))
    assert sol is not None
    inconsistent = Matrix(Q, [[1, 0], [1, 0]]).solve(
        (Q.from_int(1), Q.from_int(2)))
    assert inconsistent is None


def test_block_diag_and_columns(F2):
    a = Matrix(F2, [[1, 1], [0, 1]])
    b = Matrix(F2, [[0]])
    c = Matrix.block_diag(F2, [a, b])
    assert c.nrows == 3 and c[0][1] == F2.one() and not c[2][2]


def test_nonsquare_errors(Q):
    m = Matrix(Q, [[1, 2, 3], [4, 5, 6]])
    with pytest.raises(NonSquareError):
        m.det()
    with pytest.raises(NonSquareError):
        m.charpoly()


def test_matrix_json_roundtrip(F2T):
    from cocharlab.fields import parse_element
    t = parse_element(F2T, "t")
    m = Matrix(F2T, [[t, F2T.one()], [F2T.zero(), t * t]])
    assert Matrix.from_json(m.to_json()) == m
