import itertools
import random
from fractions import Fraction

import pytest

from cocharlab import g2
from cocharlab.errors import (
    InvalidConventionError,
    NonClosedSupportError,
    ParseError,
    ReplayMismatchError,
)
from cocharlab.fields import FieldDescriptor

A, B = (1, 0), (0, 1)
AB, A2B, A3B, A3B2 = (1, 1), (2, 1), (3, 1), (3, 2)


def test_pairing_examples():
    assert g2.pairing(A, g2.coroot(A)) == 2
    assert g2.pairing(B, g2.coroot(B)) == 2
    assert g2.pairing(A, g2.coroot(A3B2)) == 0
    assert g2.pairing(B, g2.coroot(A2B)) == 0
    assert g2.pairing(A2B, g2.coroot(A2B)) == 2
    assert g2.pairing(B, g2.coroot(A)) == -3
    assert g2.pairing(A, g2.coroot(B)) == -1


def test_root_parsing():
    assert g2.parse_root("3a+2b") == A3B2
    assert g2.parse_root("-(a+b)" if False else "-a+b") != AB  # negative root
    assert g2.parse_root("b") == B
    assert g2.root_name((-3, -1)) == "-3a+b"
    assert g2.parse_root(g2.root_name((-3, -1))) == (-3, -1)
    with pytest.raises(ParseError):
        g2.parse_root("4a+b")
    assert g2.parse_coroot("(3a+2b)^") == g2.coroot(A3B2)
    assert g2.parse_coroot("-(a+b)^") == tuple(-x for x in g2.coroot(AB))
    assert g2.parse_coroot("3,5") == (3, 5)


def test_structure_constants():
    system = g2.generate_structure_constants()
    assert system.structure_constant(A, B) == 1
    assert abs(system.structure_constant(A, AB)) == 2
    assert abs(system.structure_constant(A, A2B)) == 3
    for gam in g2.all_roots():
        for delta in g2.all_roots():
            assert system.structure_constant(gam, delta) == \
                -system.structure_constant(delta, gam)
            s = (gam[0] + delta[0], gam[1] + delta[1])
            if g2.is_root(s) and gam != delta:
                expected = g2.string_p(gam, delta) + 1
                assert abs(system.structure_constant(gam, delta)) == expected


def test_invalid_convention():
    with pytest.raises(InvalidConventionError):
        g2.generate_structure_constants({"a": 1})
    with pytest.raises(InvalidConventionError):
        g2.generate_structure_constants({"a+b": 2})


def _abstract_bracket(system):
    """Bracket on the abstract 14-dimensional algebra built from the table:
    basis h_a, h_b, e_gamma; elements are dicts label -> Fraction."""
    roots = g2.all_roots()

    def bracket(x, y):
        out = {}

        def add(lbl, c):
            if c:
                out[lbl] = out.get(lbl, Fraction(0)) + c

        for lx, cx in x.items():
            for ly, cy in y.items():
                c = cx * cy
                if lx in ("ha", "hb") and ly in ("ha", "hb"):
                    continue
                if lx in ("ha", "hb"):
                    vec = (1, 0) if lx == "ha" else (0, 1)
                    add(ly, c * g2.pairing(ly, vec))
                    continue
                if ly in ("ha", "hb"):
                    vec = (1, 0) if ly == "ha" else (0, 1)
                    add(lx, -c * g2.pairing(lx, vec))
                    continue
                s = (lx[0] + ly[0], lx[1] + ly[1])
                if s == (0, 0):
                    cx_, cy_ = g2.coroot(lx)
                    add("ha", c * cx_)
                    add("hb", c * cy_)
                elif g2.is_root(s):
                    add(s, c * system.structure_constant(lx, ly))
        return {k: v for k, v in out.items() if v}

    return bracket, ["ha", "hb"] + roots


def test_jacobi_exhaustive():
    system = g2.generate_structure_constants()
    bracket, basis = _abstract_bracket(system)

    def add_into(acc, d, sign=1):
        for k, v in d.items():
            acc[k] = acc.get(k, Fraction(0)) + sign * v

    singles = [{lbl: Fraction(1)} for lbl in basis]
    for x, y, z in itertools.product(singles, repeat=3):
        acc = {}
        add_into(acc, bracket(x, bracket(y, z)))
        add_into(acc, bracket(y, bracket(z, x)))
        add_into(acc, bracket(z, bracket(x, y)))
        assert all(not v for v in acc.values()), (x, y, z, acc)


def test_collect_examples(F2, F3, F5):
    w = g2.UnipotentWord.parse(F2, "u(a;1)*u(a;1)")
    assert g2.collect(w).literal() == "1"
    w2 = g2.UnipotentWord.parse(F5, "u(2a+b;1)*u(a;1)*u(2a+b;-1)")
    out = g2.collect(w2)
    assert [r for r, _ in out.letters] == [A, A3B]
    coeffs = [c for _, c in out.letters]
    assert coeffs[0] == F5.one()
    assert coeffs[1] in (F5.from_int(3), F5.from_int(-3))
    w3 = g2.UnipotentWord.parse(F3, "u(2a+b;1)*u(a;1)*u(2a+b;-1)")
    assert g2.collect(w3).literal() == "u(a;1)"


def test_collect_idempotent_and_strategy_free(F5):
    rng = random.Random(21)
    roots = list(g2.POSITIVE_ROOTS)
    for _ in range(25):
        letters = tuple((roots[rng.randrange(6)],
                         F5.from_code(rng.randrange(5)))
                        for _ in range(rng.randrange(1, 6)))
        w = g2.UnipotentWord(F5, letters)
        left = g2.collect(w, strategy="leftmost")
        right = g2.collect(w, strategy="rightmost")
        assert left.letters == right.letters
        assert g2.collect(left).letters == left.letters


def test_collect_rejects_negative_roots(F5):
    w = g2.UnipotentWord(F5, (((-1, 0), F5.one()),))
    with pytest.raises(NonClosedSupportError):
        g2.collect(w)


def test_torus_conjugation_consistency(F5):
    # conjugating then collecting equals collecting then conjugating
    rng = random.Random(22)
    roots = list(g2.POSITIVE_ROOTS)
    for _ in range(15):
        letters = tuple((roots[rng.randrange(6)],
                         F5.from_code(rng.randrange(5)))
                        for _ in range(rng.randrange(1, 5)))
        w = g2.UnipotentWord(F5, letters)
        lam = (rng.randrange(-2, 3), rng.randrange(-2, 3))
        a = g2.collect(g2.torus_conjugate(w, lam))
        b = g2.torus_conjugate(g2.collect(w), lam)
        assert a.letters == g2.collect(b).letters


def test_word_limit_examples(F5):
    w = g2.UnipotentWord.parse(F5, "u(a;1)*u(b;1)")
    lim = g2.word_limit(w, g2.coroot(A3B2))
    assert lim.literal() == "u(a;1)"
    w2 = g2.UnipotentWord.parse(F5, "u(b;1)")
    assert g2.word_limit(w2, (0, 0)).literal() == "u(b;1)"
    w3 = g2.UnipotentWord.parse(F5, "u(b;1)*u(2a+b;1)")
    assert g2.word_limit(w3, g2.coroot(B)).literal() == "u(2a+b;1)"
    # a pole: negative pairing with a surviving letter
    assert g2.word_limit(w2, tuple(-x for x in g2.coroot(B))) is None


def test_word_limit_fixed_by_cocharacter(F5):
    rng = random.Random(23)
    roots = list(g2.POSITIVE_ROOTS)
    for _ in range(20):
        letters = tuple((roots[rng.randrange(6)],
                         F5.from_code(rng.randrange(5)))
                        for _ in range(rng.randrange(1, 5)))
        w = g2.UnipotentWord(F5, letters)
        lam = (rng.randrange(-2, 3), rng.randrange(-2, 3))
        lim = g2.word_limit(w, lam)
        if lim is not None:
            for r, _ in lim.letters:
                assert g2.pairing(r, lam) == 0


def test_figure_edges_p_not_3():
    for p in (0, 2, 5):
        edges = g2.figure_edges(p)
        pairs = sorted((e["from"], e["to"]) for e in edges)
        assert pairs == sorted([
            ("G2", "tA1"), ("G2", "A1"), ("G2", "1"),
            ("G2(a1)", "tA1"), ("G2(a1)", "A1"), ("G2(a1)", "1"),
            ("tA1", "A1"), ("tA1", "1"), ("A1", "1")])


def test_figure_edges_p_3():
    edges = g2.figure_edges(3)
    pairs = sorted((e["from"], e["to"]) for e in edges)
    assert pairs == sorted([
        ("G2", "tA1"), ("G2", "A1"), ("G2", "1"),
        ("G2(a1)", "tA1"), ("G2(a1)", "A1"), ("G2(a1)", "1"),
        ("(tA1)3", "tA1"), ("(tA1)3", "A1"), ("(tA1)3", "1"),
        ("tA1", "1"), ("A1", "1")])
    assert ("tA1", "A1") not in pairs     # the +-3 argument vanishes


def test_figure_dot():
    dot = g2.figure_dot(3)
    assert "asserted in the literature, not machine-checked" in dot
    assert '"(tA1)3"' in dot


def test_flipped_convention_replays():
    # both sign choices replay every figure step (the +-3 is convention-bound)
    conv = {k: -1 for k in g2.default_convention()}
    system = g2.generate_structure_constants(conv)
    assert system.structure_constant(A, B) == -1
    terms = system.commutator_terms(A2B, A)
    assert abs(terms[0][3]) == 3
    # default-convention figures pass for all characteristics
    for p in (0, 2, 3, 5):
        g2.figure_edges(p)


def test_cartan_matrix_consistency():
    # pairing matrix of the simples matches the G2 Cartan matrix
    assert [[g2.pairing(r, g2.coroot(c)) for c in (A, B)] for r in (A, B)] \
        == [[2, -1], [-3, 2]]
    # coroot lattice coordinates of all positive coroots are integral
    for root in g2.POSITIVE_ROOTS:
        x, y = g2.coroot(root)
        assert g2.pairing(root, (x, y)) == 2
