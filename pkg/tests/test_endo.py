import random

import pytest

from cocharlab import endo, graph, limits, poly, tuples
from cocharlab.errors import NotRuConjugateError, PreconditionFailedError
from cocharlab.fields import embed, parse_descriptor, parse_element
from cocharlab.limits import Cocharacter, ConjugationModel
from cocharlab.linalg import Matrix
from cocharlab.poly import Polynomial, radical, squarefree_test


def P(field, text):
    return Polynomial.parse(field, text)


def J(field, n):
    rows = [[field.one() if j == i + 1 else field.zero() for j in range(n)]
            for i in range(n)]
    return Matrix(field, rows)


def test_char_poly_examples(Q, F2T):
    mu = P(F2T, "T^12+t")
    assert endo.char_poly(Matrix.companion(mu)) == mu
    assert endo.char_poly(Matrix.zeros(Q, 3)) == P(Q, "T^3")
    assert endo.char_poly(Matrix(Q, [[1, 0], [0, 2]])) == P(Q, "(T-1)*(T-2)")


def test_min_poly_examples(Q, F2T):
    assert endo.min_poly(J(Q, 2)) == P(Q, "T^2")
    assert endo.min_poly(Matrix.identity(Q, 2)) == P(Q, "T-1")
    c = Matrix.companion(P(F2T, "T^2+t"))
    two = Matrix.block_diag(F2T, [c, c])
    assert endo.min_poly(two) == P(F2T, "T^2+t")


def test_invariant_factors_examples(Q):
    assert endo.invariant_factors(J(Q, 2)).label() == "T^2"
    cls = endo.invariant_factors(Matrix(Q, [[1, 0, 0], [0, 2, 0], [0, 0, 2]]))
    assert [d.literal() for d in cls.invariant_factors] == [
        "T-2", "T^2+(-3)*T+2"]
    comp = Matrix.companion(P(Q, "(T-1)^2*(T-2)"))
    assert len(endo.invariant_factors(comp).invariant_factors) == 1


def test_invariant_factors_classify_conjugacy(F2):
    # the identifier is constant on orbits and separates them (desk scale)
    mats = list(graph.all_matrices(F2, 2))
    invertible = [g for g in mats if g.is_invertible()]
    for f in mats[:8]:
        label = endo.invariant_factors(f).label()
        for g in invertible:
            assert endo.invariant_factors(g * f * g.inverse()).label() == label


def test_is_cocharacter_closed(Q, F2T, tower_ka2):
    rep = endo.is_cocharacter_closed(Matrix.companion(P(F2T, "T^12+t")))
    assert rep.closed and rep.factorization is not None
    rep2 = endo.is_cocharacter_closed(J(Q, 2))
    assert not rep2.closed
    assert rep2.cocharacter.weights == (1, -1)
    assert rep2.limit == Matrix.zeros(Q, 2)
    assert rep2.subspace  # a proper f-stable subspace comes with the verdict
    # base change to k(a^2) breaks square-freeness of T^12+t
    f3 = Matrix.companion(P(tower_ka2, "T^12+t"))
    assert not endo.is_cocharacter_closed(f3).closed


def test_is_geometrically_closed(Q, F2T):
    c = Matrix.companion(P(F2T, "T^2+t"))
    assert not endo.is_geometrically_closed(c)
    assert endo.is_cocharacter_closed(c).closed
    assert endo.is_geometrically_closed(Matrix(Q, [[1, 0], [0, 2]]))
    assert not endo.is_geometrically_closed(J(Q, 2))


def test_semisimplification(Q, F5):
    cls = endo.semisimplification(Matrix.companion(P(Q, "(T-1)^2*(T-2)")))
    eldivs = [(q.literal(), e) for q, e in cls.elementary_divisors()]
    assert sorted(eldivs) == [("T-1", 1), ("T-1", 1), ("T-2", 1)]
    assert cls == endo.invariant_factors(
        Matrix(Q, [[1, 0, 0], [0, 1, 0], [0, 0, 2]]))
    # cross-check against the brute-force minimal orbit over F_5
    comp5 = Matrix.companion(P(F5, "(T-1)^2*(T-2)"))
    model = graph.EndoOrbitModel(F5, 3)
    g = graph.accessibility_graph(comp5, model)
    assert g.minimal == endo.semisimplification(comp5).label()
    # fixed points
    d = Matrix(Q, [[1, 0], [0, 2]])
    assert endo.semisimplification(d) == endo.invariant_factors(d)
    assert endo.semisimplification(J(Q, 2)) == endo.invariant_factors(
        Matrix.zeros(Q, 2))


def test_semisimplification_properties(Q, F2T):
    rng = random.Random(4)
    for field, rand in [(Q, lambda: rng.randrange(-2, 3)),
                        (F2T, lambda: rng.randrange(2))]:
        for _ in range(8):
            f = Matrix(field, [[field.from_int(rand()) for _ in range(3)]
                               for _ in range(3)])
            cls = endo.semisimplification(f)
            assert cls.char_poly == endo.char_poly(f)
            assert (endo.min_poly(f) % cls.min_poly).is_zero()
            assert cls.min_poly == radical(endo.min_poly(f))
            again = endo.semisimplification(cls.representative)
            assert again == cls


def test_witness_cocharacter(Q):
    lam, lim = endo.witness_cocharacter(J(Q, 2))
    assert lam.weights == (1, -1) and lam.conjugator is None
    assert lim == Matrix.zeros(Q, 2)
    comp = Matrix.companion(P(Q, "(T-1)^2"))
    lam2, lim2 = endo.witness_cocharacter(comp)
    assert endo.invariant_factors(lim2) == endo.semisimplification(comp)
    assert lim2.charpoly() == comp.charpoly()
    assert endo.min_poly(lim2) == P(Q, "T-1")
    d = Matrix(Q, [[1, 0], [0, 2]])
    lam3, lim3 = endo.witness_cocharacter(d)
    assert lam3.is_trivial() and lim3 == d


def test_witness_class_random(F3):
    rng = random.Random(8)
    for _ in range(20):
        f = Matrix(F3, [[F3.from_int(rng.randrange(3)) for _ in range(3)]
                        for _ in range(3)])
        lam, lim = endo.witness_cocharacter(f)
        assert endo.invariant_factors(lim) == endo.semisimplification(f)


def test_ru_conjugator(Q):
    f = Matrix(Q, [[1, 1], [0, 2]])
    lam = Cocharacter((1, -1))
    u = endo.ru_conjugator(f, Matrix(Q, [[1, 0], [0, 2]]), lam)
    assert u == Matrix(Q, [[1, -1], [0, 1]])
    d = Matrix(Q, [[1, 0], [0, 2]])
    assert endo.ru_conjugator(d, d, lam) == Matrix.identity(Q, 2)
    with pytest.raises(NotRuConjugateError):
        endo.ru_conjugator(J(Q, 2), Matrix.zeros(Q, 2), lam)
    with pytest.raises(PreconditionFailedError):
        endo.ru_conjugator(f, d, Cocharacter((0, 0)))


def test_commutant_dimension(Q):
    assert endo.commutant_dimension(Matrix(Q, [[3, 0], [0, 3]])) == 4
    assert endo.commutant_dimension(J(Q, 2)) == 2
    c = Matrix.companion(P(Q, "T^2+1"))
    assert endo.commutant_dimension(c) == 2


def test_three_way_agreement_small(Q, F2, F2T):
    corpus = [J(Q, 2), Matrix(Q, [[1, 0], [0, 2]]),
              Matrix.companion(P(Q, "(T-1)^2*(T-2)")),
              Matrix.companion(P(F2T, "T^2+t")),
              Matrix.companion(P(F2T, "T^12+t")),
              Matrix.block_diag(F2T, [Matrix.companion(P(F2T, "T^2+t"))] * 2)]
    corpus += list(graph.all_matrices(F2, 2))
    for f in corpus:
        closed = endo.is_cocharacter_closed(f).closed
        assert closed == squarefree_test(endo.min_poly(f))
        assert closed == tuples.is_semisimple((f,)).semisimple


def test_char_min_invariant_under_base_change(F2, GF16):
    rng = random.Random(6)
    for _ in range(10):
        f = Matrix(F2, [[F2.from_code(rng.randrange(2)) for _ in range(3)]
                        for _ in range(3)])
        lifted = f.map(lambda c: embed(c, GF16), GF16)
        assert endo.char_poly(lifted) == endo.char_poly(f).map_coefficients(
            lambda c: embed(c, GF16), GF16)
        assert endo.min_poly(lifted) == endo.min_poly(f).map_coefficients(
            lambda c: embed(c, GF16), GF16)


def test_levi_conjunction(F2):
    rng = random.Random(10)
    for _ in range(30):
        f1 = Matrix(F2, [[F2.from_code(rng.randrange(2)) for _ in range(2)]
                         for _ in range(2)])
        f2 = Matrix(F2, [[F2.from_code(rng.randrange(2)) for _ in range(2)]
                         for _ in range(2)])
        both = Matrix.block_diag(F2, [f1, f2])
        assert endo.is_cocharacter_closed(both).closed == (
            endo.is_cocharacter_closed(f1).closed
            and endo.is_cocharacter_closed(f2).closed)


def test_galois_witness_flip(F2T):
    # T^2+t: closed over k = F_2(t), no longer closed over k(sqrt(t))
    f = Matrix.companion(P(F2T, "T^2+t"))
    assert endo.is_cocharacter_closed(f).closed
    kroot = parse_descriptor("ext(Fp(t):p=2;X^2+t;r)")
    lifted = f.map(lambda c: embed(c, kroot), kroot)
    assert not endo.is_cocharacter_closed(lifted).closed


def test_commutant_grows_along_proper_limits(F2):
    model = graph.EndoOrbitModel(F2, 3)
    seen = set()
    for f in graph.all_matrices(F2, 3):
        oid = model.orbit_id(f)
        if oid in seen:
            continue
        seen.add(oid)
        base = endo.commutant_dimension(f)
        for dst, lam, rep in model.one_step_limits(f):
            if dst != oid:
                assert endo.commutant_dimension(rep) > base


def test_char_is_product_of_invariant_factors(Q, F3):
    rng = random.Random(14)
    for field in (Q, F3):
        for _ in range(10):
            f = Matrix(field, [[field.from_int(rng.randrange(-2, 3))
                                for _ in range(3)] for _ in range(3)])
            cls = endo.invariant_factors(f)
            assert cls.char_poly == endo.char_poly(f)
            assert cls.min_poly == endo.min_poly(f)


def test_invariant_factor_chain_divides(Q, F3):
    rng = random.Random(15)
    for field in (Q, F3):
        for _ in range(10):
            f = Matrix(field, [[field.from_int(rng.randrange(-2, 3))
                                for _ in range(4)] for _ in range(4)])
            cls = endo.invariant_factors(f)
            degs = 0
            for a, b in zip(cls.invariant_factors, cls.invariant_factors[1:]):
                assert (b % a).is_zero()
            for d in cls.invariant_factors:
                degs += d.degree
            assert degs == 4


def test_char_min_invariant_under_tower_base_change(F2T, tower_ksz):
    f = Matrix.companion(P(F2T, "T^12+t"))
    lifted = f.map(lambda c: embed(c, tower_ksz), tower_ksz)
    assert endo.char_poly(lifted) == endo.char_poly(f).map_coefficients(
        lambda c: embed(c, tower_ksz), tower_ksz)
    assert endo.min_poly(lifted) == endo.min_poly(f).map_coefficients(
        lambda c: embed(c, tower_ksz), tower_ksz)


def test_ru_conjugator_with_conjugated_cocharacter(Q):
    h = Matrix(Q, [[1, 2], [1, 3]])
    lam = Cocharacter((1, -1), h)
    base = Matrix(Q, [[1, 1], [0, 2]])
    f = h * base * h.inverse()
    f_lim = h * Matrix(Q, [[1, 0], [0, 2]]) * h.inverse()
    u = endo.ru_conjugator(f, f_lim, lam)
    assert u * f == f_lim * u
    from cocharlab.limits import p_lambda_membership, IN_RU_P
    assert p_lambda_membership(u, lam) == IN_RU_P


def test_gf4_exhaustive_three_way(GF4):
    model = graph.EndoOrbitModel(GF4, 2)
    seen = set()
    for f in graph.all_matrices(GF4, 2):
        oid = model.orbit_id(f)
        sqf = squarefree_test(endo.min_poly(f))
        if oid in seen:
            continue
        seen.add(oid)
        brute = all(dst == oid for dst, _, _ in model.one_step_limits(f))
        assert brute == sqf
        assert graph.accessibility_graph(f, model).minimal == \
            endo.semisimplification(f).label()
    assert len(seen) == 20  # 16 cyclic classes plus 4 scalars


def _poly_det(rows):
    # expansion by the first row; entries are polynomials (oracle-only)
    n = len(rows)
    if n == 1:
        return rows[0][0]
    acc = None
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _poly_det(minor)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def test_invariant_factors_against_minor_gcd_oracle(Q, F2):
    # independent oracle: d_k = D_k / D_{k-1} with D_k the monic gcd of all
    # k x k minors of T*I - f
    from cocharlab.poly import gcd as pgcd_
    import itertools as it
    rng = random.Random(23)
    for field in (Q, F2):
        for _ in range(8):
            n = 3
            f = Matrix(field, [[field.from_int(rng.randrange(-2, 3))
                                for _ in range(n)] for _ in range(n)])
            X = P(field, "T")
            M = [[(X - Polynomial.constant(field, f[i][j]) if i == j
                   else Polynomial.constant(field, -f[i][j]))
                  for j in range(n)] for i in range(n)]
            dets = {0: Polynomial.constant(field, field.one())}
            for k in range(1, n + 1):
                g = Polynomial(field, [])
                for rows_idx in it.combinations(range(n), k):
                    for cols_idx in it.combinations(range(n), k):
                        sub = [[M[i][j] for j in cols_idx] for i in rows_idx]
                        g = pgcd_(g, _poly_det(sub))
                dets[k] = g
            oracle = []
            for k in range(1, n + 1):
                d = (dets[k] // dets[k - 1]).monic()
                if d.degree >= 1:
                    oracle.append(d)
            cls = endo.invariant_factors(f)
            assert list(cls.invariant_factors) == oracle


def test_min_poly_minimality_oracle(Q, F3, F2T):
    # mu annihilates f and no maximal proper divisor does
    rng = random.Random(29)
    corpora = [(Q, lambda: rng.randrange(-2, 3)),
               (F3, lambda: rng.randrange(3))]
    mats = []
    for field, draw in corpora:
        for _ in range(8):
            mats.append(Matrix(field, [[field.from_int(draw())
                                        for _ in range(3)]
                                       for _ in range(3)]))
    mats.append(Matrix.companion(P(F2T, "(T^2+t)^2")))
    for f in mats:
        mu = endo.min_poly(f)
        assert not any(any(row) for row in endo._evaluate(mu, f).rows)
        for q, _ in poly.factor(mu).factors:
            proper = mu // q
            assert any(any(row) for row in endo._evaluate(proper, f).rows)
