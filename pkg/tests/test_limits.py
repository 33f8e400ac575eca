import itertools
import random

import pytest

from cocharlab.errors import PreconditionFailedError
from cocharlab.limits import (
    IN_LEVI,
    IN_P_NOT_LEVI,
    IN_RU_P,
    NOT_IN_P,
    Cocharacter,
    ConjugationModel,
    LinearModel,
    grade_vector,
    iterated_limit_check,
    limit,
    p_lambda_membership,
    torus_to_cocharacter,
)
from cocharlab.linalg import Matrix


def test_grade_vector_conjugation(Q):
    model = ConjugationModel(Q, 2)
    lam = Cocharacter((1, -1))
    e12 = Matrix(Q, [[0, 1], [0, 0]])
    g = grade_vector(e12, lam, model)
    assert list(g.components) == [2]
    assert g.components[2] == e12
    zero_lam = Cocharacter((0, 0))
    g0 = grade_vector(e12, zero_lam, model)
    assert list(g0.components) == [0]


def test_grade_vector_rsquares_line(Q):
    model = LinearModel(Q, [[2]], name="rsquares")
    g = grade_vector((Q.from_int(-1),), Cocharacter((1,)), model)
    assert list(g.components) == [2]


def test_grade_components_sum(Q):
    rng = random.Random(1)
    model = LinearModel(Q, [[1, 0], [0, 1], [1, -2], [-1, 1]])
    for _ in range(20):
        v = tuple(Q.from_int(rng.randrange(-4, 5)) for _ in range(4))
        lam = Cocharacter((rng.randrange(-2, 3), rng.randrange(-2, 3)))
        g = grade_vector(v, lam, model)
        total = (Q.zero(),) * 4
        for comp in g.components.values():
            total = tuple(a + b for a, b in zip(total, comp))
        if not any(v):
            assert not g.components
        else:
            assert total == v


def test_limit_examples(Q):
    model = ConjugationModel(Q, 2)
    lam = Cocharacter((1, -1))
    f = Matrix(Q, [[1, 1], [0, 2]])
    res = limit(f, lam, model)
    assert res.exists and res.value == Matrix(Q, [[1, 0], [0, 2]])
    assert res.classification == "DestabilizesWithinRationalOrbit"
    res2 = limit(Matrix(Q, [[0, 0], [1, 0]]), lam, model)
    assert not res2.exists and res2.value is None
    line = LinearModel(Q, [[2]], name="rsquares")
    res3 = limit((Q.one(),), Cocharacter((1,)), line)
    assert res3.exists and res3.value == (Q.zero(),)


def test_limit_fixed_point(Q):
    model = ConjugationModel(Q, 2)
    res = limit(Matrix(Q, [[1, 0], [0, 2]]), Cocharacter((1, -1)), model)
    assert res.exists and res.classification == "FixesPoint"


def test_limit_with_conjugator(Q):
    model = ConjugationModel(Q, 2)
    g = Matrix(Q, [[1, 1], [0, 1]])
    lam = Cocharacter((1, -1), g)
    f = g * Matrix(Q, [[1, 1], [0, 2]]) * g.inverse()
    res = limit(f, lam, model)
    assert res.exists
    assert res.value == g * Matrix(Q, [[1, 0], [0, 2]]) * g.inverse()


def test_limit_idempotent(Q):
    rng = random.Random(2)
    model = ConjugationModel(Q, 3)
    for _ in range(25):
        f = Matrix(Q, [[rng.randrange(-2, 3) for _ in range(3)]
                       for _ in range(3)])
        lam = Cocharacter(tuple(rng.randrange(-2, 3) for _ in range(3)))
        res = limit(f, lam, model)
        if res.exists:
            again = limit(res.value, lam, model)
            assert again.exists and again.value == res.value
            assert again.classification == "FixesPoint"


def test_p_lambda_membership(Q):
    lam = Cocharacter((1, -1))
    assert p_lambda_membership(Matrix.identity(Q, 2), lam) == IN_LEVI
    assert p_lambda_membership(Matrix(Q, [[1, 5], [0, 1]]), lam) == IN_RU_P
    assert p_lambda_membership(Matrix(Q, [[0, 1], [1, 0]]), lam) == NOT_IN_P
    assert p_lambda_membership(Matrix(Q, [[2, 1], [0, 3]]), lam) == \
        IN_P_NOT_LEVI


def test_p_lambda_closure_and_determinant(F5):
    rng = random.Random(3)
    lam = Cocharacter((2, 0, -1))
    members = []
    for _ in range(200):
        g = Matrix(F5, [[rng.randrange(5) for _ in range(3)]
                        for _ in range(3)])
        if not g.is_invertible():
            continue
        cls = p_lambda_membership(g, lam)
        if cls != NOT_IN_P:
            members.append((g, cls))
    for (g1, _), (g2, _) in zip(members, members[1:]):
        assert p_lambda_membership(g1 * g2, lam) != NOT_IN_P
    for g, cls in members:
        if cls == IN_RU_P:
            assert g.det() == F5.one()


def test_torus_to_cocharacter():
    # frozen from the documented search order (sup-norm, then lex descending)
    assert torus_to_cocharacter([(1, -1)], 2).weights == (1, 0)
    assert torus_to_cocharacter([(1, 0), (0, 1), (1, 1)], 2).weights == (1, 1)
    assert torus_to_cocharacter([], 2).weights == (0, 0)
    chars = [(2, -1, 3), (0, 1, 1), (1, 1, 1), (5, 0, -2)]
    mu = torus_to_cocharacter(chars, 3)
    for c in chars:
        assert sum(a * b for a, b in zip(mu.weights, c)) != 0


def test_iterated_limit_check_basic(Q):
    model = ConjugationModel(Q, 2)
    f = Matrix(Q, [[1, 1], [0, 2]])
    lam = Cocharacter((1, -1))
    n, witness = iterated_limit_check(f, lam, lam, model)
    assert n == 1 and witness.exists
    assert witness.value == Matrix(Q, [[1, 0], [0, 2]])


def test_iterated_limit_check_needs_two(Q):
    # coordinate with weights (1, -1): survives n*lam+mu only at n = 1
    model = LinearModel(Q, [[1, -1], [0, 0]])
    v = (Q.one(), Q.one())
    lam, mu = Cocharacter((1, 0)), Cocharacter((0, 1))
    n, witness = iterated_limit_check(v, lam, mu, model)
    assert n == 2
    assert witness.value == (Q.zero(), Q.one())


def test_iterated_limit_fromf4_shape(F5):
    # x^2 + xy: the sigma-limit is x^2, reproduced by one combined cocharacter
    weights = ((2, 2), (0, 2), (-2, 2), (1, -1), (-1, -1))
    model = LinearModel(F5, weights, name="fromf4")
    v = (F5.one(), F5.one(), F5.zero(), F5.zero(), F5.zero())
    sigma = Cocharacter((-1, 1))
    n, witness = iterated_limit_check(v, sigma, Cocharacter((1, -1)), model)
    assert witness.exists
    assert witness.value == (F5.one(),) + (F5.zero(),) * 4
    assert n == 2


def test_iterated_limit_preconditions(Q):
    model = ConjugationModel(Q, 2)
    f = Matrix(Q, [[0, 0], [1, 0]])
    lam = Cocharacter((1, -1))
    with pytest.raises(PreconditionFailedError):
        iterated_limit_check(f, lam, lam, model)
    g = Matrix(Q, [[1, 1], [0, 1]])
    with pytest.raises(PreconditionFailedError):
        iterated_limit_check(Matrix.identity(Q, 2), lam,
                             Cocharacter((1, -1), g), model)


def _random_commuting_config(field, rng, dim=5, rank=2):
    weight_matrix = [[rng.randrange(-3, 4) for _ in range(rank)]
                     for _ in range(dim)]
    model = LinearModel(field, weight_matrix)
    lam = Cocharacter(tuple(rng.randrange(-2, 3) for _ in range(rank)))
    mu = Cocharacter(tuple(rng.randrange(-2, 3) for _ in range(rank)))
    wl = model.coordinate_weights(lam.weights)
    wm = model.coordinate_weights(mu.weights)
    if field.kind == "GF":
        draw = lambda: field.from_code(rng.randrange(field.order()))
    else:
        draw = lambda: field.from_int(rng.randrange(-3, 4))
    v = tuple(draw() if wl[i] >= 0 and wm[i] >= 0 else field.zero()
              for i in range(dim))
    return model, v, lam, mu


def test_two_ways_lemma_random(Q, F3):
    rng = random.Random(9)
    for field in (Q, F3):
        for _ in range(60):
            model, v, lam, mu = _random_commuting_config(field, rng)
            r1 = limit(v, lam, model)
            r2 = limit(v, mu, model)
            assert r1.exists and r2.exists
            a = limit(r1.value, mu, model).value
            b = limit(r2.value, lam, model).value
            assert a == b
            for m, n in [(1, 1), (2, 1), (1, 3)]:
                combined = Cocharacter(
                    tuple(m * x + n * y
                          for x, y in zip(lam.weights, mu.weights)))
                rc = limit(v, combined, model)
                assert rc.exists and rc.value == a


def test_weight_components_scale_by_power(Q):
    # component n scales by a^n under the cocharacter action (checked with
    # an explicit unit a = 2 on the conjugation model)
    model = ConjugationModel(Q, 3)
    lam = Cocharacter((2, 0, -1))
    f = Matrix(Q, [[1, 2, 3], [4, 5, 6], [7, 8, 9]])
    g = grade_vector(f, lam, model)
    a = Q.from_int(2)
    diag = Matrix(Q, [[a ** w if i == j else Q.zero()
                       for j, w in enumerate(lam.weights)]
                      for i, _ in enumerate(lam.weights)])
    for n, comp in g.components.items():
        scaled = diag * comp * diag.inverse()
        assert scaled == comp * (a ** n)
    # components lie inside the declared ambient weight spaces
    for n, comp in g.components.items():
        from cocharlab.linalg import Echelon
        ech = Echelon([model.to_vector(b) for b in g.weight_spaces[n]])
        assert ech.contains(model.to_vector(comp))


def test_limit_classification_proper(Q):
    model = ConjugationModel(Q, 2)
    res = limit(Matrix(Q, [[0, 1], [0, 0]]), Cocharacter((1, -1)), model)
    assert res.exists and res.classification == "ProperlyDestabilizes"


def test_iterated_limit_with_shared_conjugator(Q):
    g = Matrix(Q, [[1, 1], [0, 1]])
    model = ConjugationModel(Q, 2)
    lam = Cocharacter((1, -1), g)
    f = g * Matrix(Q, [[1, 1], [0, 2]]) * g.inverse()
    n, witness = iterated_limit_check(f, lam, lam, model)
    assert n == 1 and witness.exists
    assert witness.value == g * Matrix(Q, [[1, 0], [0, 2]]) * g.inverse()


def test_weight_spaces_span_ambient(Q):
    model = ConjugationModel(Q, 2)
    lam = Cocharacter((1, -1))
    g = grade_vector(Matrix(Q, [[1, 2], [3, 4]]), lam, model)
    total = sum(len(v) for v in g.weight_spaces.values())
    assert total == model.dim
    assert sorted(g.weight_spaces) == [-2, 0, 2]
    assert len(g.weight_spaces[0]) == 2
