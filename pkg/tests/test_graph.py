import itertools

import pytest

from cocharlab import endo, graph
from cocharlab.errors import EnumerationBudgetExceededError
from cocharlab.fields import FieldDescriptor, parse_element
from cocharlab.limits import Cocharacter
from cocharlab.linalg import Matrix
from cocharlab.poly import Polynomial


def test_one_step_limits_j2(F2):
    model = graph.EndoOrbitModel(F2, 2)
    j2 = Matrix(F2, [[0, 1], [0, 0]])
    ids = sorted(oid for oid, _, _ in model.one_step_limits(j2))
    assert ids == ["T | T", "T^2"]


def test_one_step_limits_semisimple_fixed(F3):
    model = graph.EndoOrbitModel(F3, 2)
    d = Matrix(F3, [[1, 0], [0, 2]])
    ids = [oid for oid, _, _ in model.one_step_limits(d)]
    assert ids == [model.orbit_id(d)]


def test_one_step_witnesses_reproduce_targets(F2):
    from cocharlab import limits as lm
    model = graph.EndoOrbitModel(F2, 3)
    f = Matrix(F2, [[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    for oid, lam, rep in model.one_step_limits(f):
        res = lm.limit(f, lam, model.conj, classify=False)
        assert res.exists
        assert model.orbit_id(res.value) == oid


def test_accessibility_graph_j3(F2):
    model = graph.EndoOrbitModel(F2, 3)
    j3 = Matrix(F2, [[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    g = graph.accessibility_graph(j3, model)
    assert sorted(g.nodes) == ["T | T | T", "T | T^2", "T^3"]
    assert g.minimal == "T | T | T"
    pairs = {(s, d) for s, d, _ in g.edges}
    assert pairs == {("T^3", "T | T^2"), ("T^3", "T | T | T"),
                     ("T | T^2", "T | T | T")}


def test_minimal_matches_semisimplification(F2):
    model = graph.EndoOrbitModel(F2, 3)
    seen = set()
    for f in graph.all_matrices(F2, 3):
        oid = model.orbit_id(f)
        if oid in seen:
            continue
        seen.add(oid)
        g = graph.accessibility_graph(f, model)
        assert g.minimal == endo.semisimplification(f).label()
        # Thm-style consistency: minimal orbits agree along the preorder
        for other in g.nodes.values():
            g2 = graph.accessibility_graph(other, model)
            assert g2.minimal == g.minimal


def test_cocharacter_closed_stable_sets_hit_by_one_step(F2):
    # for any edge-closed node subset meeting the closure, some one-step
    # limit of the seed lands in it
    model = graph.EndoOrbitModel(F2, 2)
    for f in graph.all_matrices(F2, 2):
        g = graph.accessibility_graph(f, model)
        ids = sorted(g.nodes)
        succ = {i: {i} for i in ids}
        for s, d, _ in g.edges:
            succ[s].add(d)
        one_step = {oid for oid, _, _ in
                    model.one_step_limits(g.nodes[g.seed_id])}
        for r in range(1, len(ids) + 1):
            for subset in itertools.combinations(ids, r):
                sub = set(subset)
                if all(succ[i] <= sub for i in sub):
                    assert one_step & sub


def test_rsquares_graph(Q):
    model = graph.RSquaresModel(Q)
    one = Q.from_int(1)
    g = graph.accessibility_graph(one, model)
    assert sorted(g.nodes) == ["0", "1"]
    assert g.minimal == "0"
    assert model.orbit_id(Q.from_int(-1)) == "-1"
    assert model.orbit_id(Q.from_int(-1)) != model.orbit_id(one)
    assert model.orbit_id(Q.from_int(18)) == "2"
    from fractions import Fraction
    assert model.orbit_id(Q.element(Fraction(1, 2))) == "2"


def test_rsquares_finite(F5):
    model = graph.RSquaresModel(F5)
    ids = {model.orbit_id(x) for x in F5.elements()}
    assert len(ids) == 3  # zero and the two square classes


def test_antisymmetry_endo(F2, F3):
    m2 = graph.EndoOrbitModel(F2, 2)
    rep = graph.check_antisymmetry(m2, graph.all_matrices(F2, 2))
    assert rep.ok and rep.classes_checked == 6
    m3 = graph.EndoOrbitModel(F3, 2)
    rep3 = graph.check_antisymmetry(m3, graph.all_matrices(F3, 2))
    assert rep3.ok


def test_antisymmetry_single_orbit_model(Q):
    model = graph.RSquaresModel(Q)
    rep = graph.check_antisymmetry(model, [Q.from_int(1)])
    assert rep.ok


def test_export_dot(F2):
    model = graph.EndoOrbitModel(F2, 2)
    j2 = Matrix(F2, [[0, 1], [0, 0]])
    g = graph.accessibility_graph(j2, model)
    dot = graph.export_dot(g)
    assert dot.startswith("digraph")
    assert '"T^2" -> "T | T"' in dot
    empty_model = graph.RSquaresModel(F2)
    g0 = graph.accessibility_graph(F2.zero(), empty_model)
    assert "digraph" in graph.export_dot(g0)


def test_graph_deterministic(F2):
    model = graph.EndoOrbitModel(F2, 3)
    f = Matrix(F2, [[1, 1, 0], [0, 1, 1], [0, 0, 0]])
    a = graph.accessibility_graph(f, model)
    b = graph.accessibility_graph(f, model)
    assert a.to_json(model) == b.to_json(model)


def test_fromf4_chain(F5):
    model = graph.SymSquareModel(F5)
    zero, one = F5.zero(), F5.one()
    v = (zero, one, zero, one, zero)
    vp = (zero, one, zero, zero, zero)
    vpp = (one, zero, zero, zero, zero)
    id_v, id_vp, id_vpp = (model.orbit_id(x) for x in (v, vp, vpp))
    assert len({id_v, id_vp, id_vpp}) == 3
    steps_v = {oid for oid, _, _ in model.one_step_limits(v)}
    steps_vp = {oid for oid, _, _ in model.one_step_limits(vp)}
    assert id_vp in steps_v
    assert id_vpp in steps_vp
    assert id_vpp not in steps_v          # 1-accessibility is not transitive
    g = graph.accessibility_graph(v, model)
    assert id_vpp in g.nodes              # but it is 2-accessible
    assert g.minimal == model.orbit_id((zero,) * 5)


def test_fromf4_frozen_expectations(F5):
    # frozen output of the brute-force oracle over F_5
    model = graph.SymSquareModel(F5)
    zero, one = F5.zero(), F5.one()
    v = (zero, one, zero, one, zero)
    assert model.orbit_id(v) == "(0,1,0,0,1)"
    steps = sorted(oid for oid, _, _ in model.one_step_limits(v))
    assert steps == ["(0,0,0,0,0)", "(0,0,0,0,1)", "(0,1,0,0,0)",
                     "(0,1,0,0,1)"]
    g = graph.accessibility_graph(v, model)
    assert sorted(g.nodes) == [
        "(0,0,0,0,0)", "(0,0,0,0,1)", "(0,0,1,0,0)", "(0,0,2,0,0)",
        "(0,1,0,0,0)", "(0,1,0,0,1)"]


def test_fromf4_stated_cocharacters(F5):
    from cocharlab import limits as lm
    model = graph.SymSquareModel(F5)
    zero, one = F5.zero(), F5.one()
    v = (zero, one, zero, one, zero)
    res = lm.limit(v, Cocharacter((1, 0)), model.linear)
    assert res.exists and res.value == (zero, one, zero, zero, zero)
    u = ((one, one, zero, one), one)      # upper unitriangular, b = 1
    uvp = model.act(u, (zero, one, zero, zero, zero))
    assert uvp == (one, one, zero, zero, zero)  # x^2 + xy
    res2 = lm.limit(uvp, Cocharacter((-1, 1)), model.linear)
    assert res2.exists and res2.value == (one, zero, zero, zero, zero)


def test_pgl2_demo():
    k = FieldDescriptor.function_field(2, "t")
    rep = graph.pgl2_adjoint_demo(k)
    assert rep["proper_limit_over_k"] is False
    assert rep["t_is_square"] is False
    assert rep["extension_limit_is_zero"] is True


def test_budget_errors(F2):
    small = graph.Budgets(max_group_order=10)
    with pytest.raises(EnumerationBudgetExceededError):
        list(graph.all_matrices(F2, 2, small))
    with pytest.raises(EnumerationBudgetExceededError):
        graph.EndoOrbitModel(F2, 9, graph.Budgets())


def test_tuple_model_orbit_ids(F2):
    model = graph.TupleOrbitModel(F2, 2, 2)
    a = Matrix(F2, [[1, 1], [0, 1]])
    b = Matrix(F2, [[1, 0], [0, 1]])
    t = (a, b)
    oid = model.orbit_id(t)
    for g in model.group():
        assert model.orbit_id(model.act(g, t)) == oid
    # identifiers separate: conjugate tuples share ids, others may not
    other = (b, a)
    assert model.orbit_id(other) != oid


def test_fromf4_action_axioms(F5):
    # identity acts trivially; composition is compatible
    import random as _random
    model = graph.SymSquareModel(F5)
    rng = _random.Random(31)
    one = F5.one()
    ident = ((one, F5.zero(), F5.zero(), one), one)
    group = model.group()
    for _ in range(25):
        v = tuple(F5.from_code(rng.randrange(5)) for _ in range(5))
        assert model.act(ident, v) == v
        g1 = group[rng.randrange(len(group))]
        g2 = group[rng.randrange(len(group))]
        (a1, b1, c1, d1), u1 = g1
        (a2, b2, c2, d2), u2 = g2
        prod = ((a1 * a2 + b1 * c2, a1 * b2 + b1 * d2,
                 c1 * a2 + d1 * c2, c1 * b2 + d1 * d2), u1 * u2)
        assert model.act(g1, model.act(g2, v)) == model.act(prod, v)


def test_endo_orbit_id_matches_conjugation_partition(F2):
    # identifiers separate the actual conjugation orbits (enumerated)
    model = graph.EndoOrbitModel(F2, 2)
    gl2 = [g for g in graph.all_matrices(F2, 2) if g.is_invertible()]
    by_id = {}
    for f in graph.all_matrices(F2, 2):
        by_id.setdefault(model.orbit_id(f), set()).add(f.rows)
    for f in graph.all_matrices(F2, 2):
        orbit = {(g * f * g.inverse()).rows for g in gl2}
        assert orbit == by_id[model.orbit_id(f)]


def test_minimal_orbit_helper(F2):
    model = graph.EndoOrbitModel(F2, 2)
    g = graph.accessibility_graph(Matrix(F2, [[0, 1], [0, 0]]), model)
    assert graph.minimal_orbit(g) == "T | T"


def test_default_budget_matches_documented_bounds(F5, F3):
    graph.EndoOrbitModel(F3, 4)                  # allowed: 81 vectors
    with pytest.raises(EnumerationBudgetExceededError):
        graph.EndoOrbitModel(F5, 4)              # 625 vectors: over budget
    big = graph.Budgets(max_subspace_vectors=1024)
    graph.EndoOrbitModel(F5, 4, big)             # configurable per call


def test_fromf4_grid_covers_every_sign_cell():
    # one-step enumeration is exhaustive because limit existence and value
    # depend only on the signs of the five weight forms, and every sign cell
    # of the three-line arrangement meets the [-2, 2]^2 grid
    def signs(m, n):
        forms = (2 * m + 2 * n, 2 * n, -2 * m + 2 * n, m - n, -m - n)
        return tuple((x > 0) - (x < 0) for x in forms)

    window = {signs(m, n) for m in range(-25, 26) for n in range(-25, 26)}
    grid = {signs(m, n) for (m, n) in graph.SymSquareModel.GRID}
    assert grid == window
