"""Accessibility digraphs at desk scale: enumerate one-step limits, build the
BFS closure of an orbit, find the unique cocharacter-closed node, check
antisymmetry of the accessibility preorder, and export DOT.

Orbit identifiers are strings: invariant-factor labels for conjugation
models, lexicographically least orbit points elsewhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

from . import endo, fields, limits
from .errors import (
    EnumerationBudgetExceededError,
    NonUniqueMinimalError,
    UnsupportedFieldError,
)
from .fields import is_nth_power
from .limits import Cocharacter, ConjugationModel
from .linalg import Matrix


@dataclass
class Budgets:
    # the q^n cap keeps flag enumeration at n <= 4 over F_2/F_3 and n <= 3
    # over F_5 by default; raise it per call for larger experiments
    max_subspace_vectors: int = 256
    max_group_order: int = 100_000
    max_endo_dim: int = 4
    max_nodes: int = 512

    def check_vectors(self, count):
        if count > self.max_subspace_vectors:
            raise EnumerationBudgetExceededError(
                f"{count} vectors exceed the subspace enumeration budget")

    def check_group(self, order):
        if order > self.max_group_order:
            raise EnumerationBudgetExceededError(
                f"group order {order} exceeds the budget")


DEFAULT_BUDGETS = Budgets()


# ---------------------------------------------------------------------------
# subspace lattice over a finite field (cached per field/dimension)
# ---------------------------------------------------------------------------

_SUBSPACE_CACHE = {}


def _rref_rows(field, vectors):
    if not vectors:
        return ()
    m = Matrix(field, vectors)
    R, pivots = m.rref()
    return tuple(R.rows[i] for i in range(len(pivots)))


def _reduce_against(field, rows, v):
    """Reduce v against RREF rows; returns the residual vector."""
    v = list(v)
    for row in rows:
        piv = next(i for i, c in enumerate(row) if c)
        if v[piv]:
            c = v[piv]
            v = [x - c * y for x, y in zip(v, row)]
    return tuple(v)


def _in_span(field, rows, v):
    return all(not c for c in _reduce_against(field, rows, v))


def all_subspaces(field, n, budgets=DEFAULT_BUDGETS):
    """Every proper nonzero subspace of F_q^n as RREF row tuples."""
    key = (field, n)
    if key in _SUBSPACE_CACHE:
        return _SUBSPACE_CACHE[key]
    q = field.order()
    budgets.check_vectors(q ** n)
    elems = list(field.elements())
    vectors = [v for v in itertools.product(elems, repeat=n) if any(v)]
    level = {(): None}
    out = []
    for dim in range(1, n):
        new = {}
        for rows in level:
            for v in vectors:
                if rows and _in_span(field, rows, v):
                    continue
                key2 = _rref_rows(field, list(rows) + [list(v)])
                if len(key2) == dim:
                    new[key2] = None
        out.extend(new.keys())
        level = new
    _SUBSPACE_CACHE[key] = out
    return out


def _invariant(field, rows, mats):
    for m in mats:
        for row in rows:
            if not _in_span(field, rows, m.mul_vec(row)):
                return False
    return True


# ---------------------------------------------------------------------------
# enumerable models
# ---------------------------------------------------------------------------


class EndoOrbitModel:
    """GL_n(k) conjugation on End(k^n) with one-step limits enumerated from
    f-stable flags of invariant subspaces (finite fields)."""

    name = "endo"

    def __init__(self, field, n, budgets=DEFAULT_BUDGETS):
        self.field = field
        self.n = n
        self.budgets = budgets
        if field.is_finite():
            if n > budgets.max_endo_dim:
                raise EnumerationBudgetExceededError(
                    f"dimension {n} exceeds the endo budget")
            budgets.check_vectors(field.order() ** n)
        self.conj = ConjugationModel(field, n)
        self._id_cache = {}

    def orbit_id(self, f):
        key = f.rows
        if key not in self._id_cache:
            self._id_cache[key] = endo.invariant_factors(f).label()
        return self._id_cache[key]

    def canonical_rep(self, f):
        return endo.invariant_factors(f)

    def point_to_json(self, f):
        return f.to_json()["rows"]

    def _invariant_chains(self, mats):
        fld = self.field
        subs = [s for s in all_subspaces(fld, self.n, self.budgets)
                if _invariant(fld, s, mats)]

        def contains(a, b):  # a <= b
            return all(_in_span(fld, b, v) for v in a)

        chains = [()]
        def dfs(chain):
            chains.append(tuple(chain))
            for t in subs:
                if t != chain[-1] and contains(chain[-1], t):
                    dfs(chain + [t])
        for s in subs:
            dfs([s])
        # deduplicate (dfs may revisit through different midpoints? no: chains
        # are recorded once per exact sequence)
        return chains

    def chain_cocharacter(self, chain):
        """Adapted-basis cocharacter: deeper chain members get larger weights."""
        fld = self.field
        n = self.n
        basis = []
        weights = []
        r = len(chain)
        prev = []
        for depth, rows in enumerate(chain):
            ext = endo._extend_basis(fld, prev, [tuple(v) for v in rows])
            new = ext[len(prev):]
            basis.extend(new)
            weights.extend([r - depth] * len(new))
            prev = ext
        std = [tuple(fld.one() if i == k else fld.zero() for i in range(n))
               for k in range(n)]
        ext = endo._extend_basis(fld, prev, std)
        new = ext[len(prev):]
        basis.extend(new)
        weights.extend([0] * len(new))
        g = Matrix.from_columns(fld, basis)
        conj = None if g == Matrix.identity(fld, n) else g
        return Cocharacter(tuple(weights), conj)

    def one_step_limits(self, f):
        """All (orbit id, witness cocharacter, representative) reachable by a
        single limit; includes the trivial self-step."""
        if not self.field.is_finite():
            raise EnumerationBudgetExceededError(
                "one-step enumeration needs a finite field")
        out = []
        seen = {}
        for chain in self._invariant_chains([f]):
            lam = self.chain_cocharacter(chain)
            res = limits.limit(f, lam, self.conj, classify=False)
            assert res.exists
            oid = self.orbit_id(res.value)
            if oid not in seen:
                seen[oid] = (lam, res.value)
                out.append((oid, lam, res.value))
        return out


class TupleOrbitModel:
    """Simultaneous conjugation on r-tuples of n x n matrices over a finite
    field; orbit identity is the lexicographically least point of the orbit."""

    name = "tuple"

    def __init__(self, field, n, r, budgets=DEFAULT_BUDGETS):
        self.field = field
        self.n = n
        self.r = r
        self.budgets = budgets
        budgets.check_vectors(field.order() ** n)
        self.conj = ConjugationModel(field, n)
        self._group = None

    def group(self):
        if self._group is None:
            fld, n = self.field, self.n
            self.budgets.check_group(fld.order() ** (n * n))
            elems = list(fld.elements())
            mats = []
            for entries in itertools.product(elems, repeat=n * n):
                m = Matrix(fld, [entries[i * n:(i + 1) * n] for i in range(n)])
                if m.is_invertible():
                    mats.append(m)
            self._group = mats
        return self._group

    def act(self, g, point):
        gi = g.inverse()
        return tuple(g * m * gi for m in point)

    def _point_key(self, point):
        return tuple(c.sort_key() for m in point for row in m.rows for c in row)

    def orbit(self, point):
        return [self.act(g, point) for g in self.group()]

    def orbit_id(self, point):
        best = min(self.orbit(point), key=self._point_key)
        return "(" + "; ".join(
            ",".join(c.literal() for row in m.rows for c in row)
            for m in best) + ")"

    def canonical_rep(self, point):
        return min(self.orbit(point), key=self._point_key)

    def point_to_json(self, point):
        return [m.to_json()["rows"] for m in point]

    def one_step_limits(self, point):
        endo_model = EndoOrbitModel(self.field, self.n, self.budgets)
        out = []
        seen = {}
        for chain in endo_model._invariant_chains(list(point)):
            lam = endo_model.chain_cocharacter(chain)
            values = []
            ok = True
            for m in point:
                res = limits.limit(m, lam, self.conj, classify=False)
                if not res.exists:
                    ok = False
                    break
                values.append(res.value)
            assert ok  # jointly invariant chains always admit the limit
            target = tuple(values)
            oid = self.orbit_id(target)
            if oid not in seen:
                seen[oid] = True
                out.append((oid, lam, target))
        return out


class RSquaresModel:
    """The multiplicative group acting on the affine line with weight two:
    a . z = a^2 z.  Orbits are square classes."""

    name = "rsquares"

    def __init__(self, field, budgets=DEFAULT_BUDGETS):
        self.field = field
        self.budgets = budgets
        self.linear = limits.LinearModel(field, [[2]], name="rsquares")

    def orbit_id(self, z):
        z = z[0] if isinstance(z, tuple) else z
        if not z:
            return "0"
        f = self.field
        if f.kind == "Q":
            q = z.payload
            m = abs(q.numerator) * q.denominator
            sf = 1
            d = 2
            while d * d <= m:
                while m % (d * d) == 0:
                    m //= d * d
                if m % d == 0:
                    sf *= d
                    m //= d
                d += 1
            sf *= m
            return str(sf if q > 0 else -sf)
        if f.is_finite():
            best = min((a * a * z for a in f.elements() if a),
                       key=lambda x: x.sort_key())
            return best.literal()
        raise UnsupportedFieldError(
            f"square classes not implemented over {f}")

    def canonical_rep(self, z):
        return z

    def point_to_json(self, z):
        z = z[0] if isinstance(z, tuple) else z
        return [z.literal()]

    def one_step_limits(self, z):
        z = z[0] if isinstance(z, tuple) else z
        out = [(self.orbit_id(z), Cocharacter((0,)), z)]
        if z:
            out.append(("0", Cocharacter((1,)), self.field.zero()))
        return out


class SymSquareModel:
    """SL_2 x multiplicative group acting on S^2(E) + E; the weight-two twist
    on S^2(E) and weight minus-one twist on E.  Coordinates are
    (x^2, xy, y^2, e1, e2); cocharacters of the torus are pairs (m, n)."""

    name = "fromf4"

    # weights of (m, n) on the five coordinates
    WEIGHTS = ((2, 2), (0, 2), (-2, 2), (1, -1), (-1, -1))
    # every sign cell of the weight arrangement (lines n = -m, n = 0, n = m)
    # contains a point with coordinates in [-2, 2]
    GRID = [(m, n) for m in range(-2, 3) for n in range(-2, 3)]

    def __init__(self, field, budgets=DEFAULT_BUDGETS):
        if not field.is_finite():
            raise UnsupportedFieldError("fromf4 model needs a finite field")
        self.field = field
        self.budgets = budgets
        self.linear = limits.LinearModel(field, self.WEIGHTS, name="fromf4")
        self._group = None
        self._orbit_cache = {}
        self._id_cache = {}

    def group(self):
        if self._group is None:
            fld = self.field
            elems = list(fld.elements())
            q = fld.order()
            self.budgets.check_group((q ** 3) * (q - 1))
            sl2 = []
            one = fld.one()
            for a, b, c, d in itertools.product(elems, repeat=4):
                if a * d - b * c == one:
                    sl2.append((a, b, c, d))
            self._group = [(h, u) for h in sl2 for u in elems if u]
        return self._group

    def act(self, g, v):
        (a, b, c, d), u = g
        x2, xy, y2, e1, e2 = v
        u2 = u * u
        ui = u.inverse()
        nx2 = a * a * x2 + a * b * xy + b * b * y2
        nxy = 2 * (a * c * x2) + (a * d + b * c) * xy + 2 * (b * d * y2)
        ny2 = c * c * x2 + c * d * xy + d * d * y2
        ne1 = a * e1 + b * e2
        ne2 = c * e1 + d * e2
        return (u2 * nx2, u2 * nxy, u2 * ny2, ui * ne1, ui * ne2)

    def _key(self, v):
        return tuple(c.sort_key() for c in v)

    def orbit(self, v):
        key = self._key(v)
        if key in self._orbit_cache:
            return self._orbit_cache[key]
        seen = {}
        for g in self.group():
            w = self.act(g, v)
            seen[self._key(w)] = w
        for k in seen:
            self._orbit_cache[k] = seen
        return seen

    def orbit_id(self, v):
        key = self._key(v)
        if key not in self._id_cache:
            orb = self.orbit(v)
            best = orb[min(orb)]
            oid = "(" + ",".join(c.literal() for c in best) + ")"
            for k in orb:
                self._id_cache[k] = oid
        return self._id_cache[key]

    def canonical_rep(self, v):
        orb = self.orbit(v)
        return orb[min(orb)]

    def point_to_json(self, v):
        return [c.literal() for c in v]

    def one_step_limits(self, v):
        out = []
        seen = {}
        for w in self.orbit(v).values():
            for m, n in self.GRID:
                weights = [2 * m + 2 * n, 2 * n, -2 * m + 2 * n,
                           m - n, -m - n]
                if any(w[i] and weights[i] < 0 for i in range(5)):
                    continue
                val = tuple(w[i] if weights[i] == 0 else self.field.zero()
                            for i in range(5))
                oid = self.orbit_id(val)
                if oid not in seen:
                    seen[oid] = True
                    out.append((oid, Cocharacter((m, n)), val))
        return out


def make_model(name, field, budgets=DEFAULT_BUDGETS, dim=2, tuple_length=2):
    if name == "endo":
        return EndoOrbitModel(field, dim, budgets)
    if name == "tuple":
        return TupleOrbitModel(field, dim, tuple_length, budgets)
    if name == "rsquares":
        return RSquaresModel(field, budgets)
    if name == "fromf4":
        return SymSquareModel(field, budgets)
    raise UnsupportedFieldError(f"unknown model {name!r}")


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------


@dataclass
class AccessibilityGraph:
    model_name: str
    seed_id: str
    nodes: dict               # id -> representative point
    edges: list               # (src, dst, witness Cocharacter), no self loops
    closed_nodes: list        # ids whose one-step limits all stay inside
    minimal: str

    def to_json(self, model):
        return {
            "model": self.model_name,
            "seed": self.seed_id,
            "nodes": [{"id": i, "representative": model.point_to_json(p)}
                      for i, p in sorted(self.nodes.items())],
            "edges": [{"from": s, "to": d, "cocharacter": w.to_json()}
                      for s, d, w in self.edges],
            "minimal": self.minimal,
        }


def one_step_limits(point, model):
    """Orbits of limits along k-defined cocharacters, with witnesses."""
    return model.one_step_limits(point)


def accessibility_graph(seed, model, budgets=DEFAULT_BUDGETS):
    """BFS closure of the one-step limit relation from the seed orbit."""
    seed_id = model.orbit_id(seed)
    nodes = {seed_id: seed}
    steps = {}
    frontier = [seed_id]
    while frontier:
        frontier.sort()
        cur = frontier.pop(0)
        if cur in steps:
            continue
        if len(nodes) > budgets.max_nodes:
            raise EnumerationBudgetExceededError("graph node budget exceeded")
        result = model.one_step_limits(nodes[cur])
        steps[cur] = result
        for oid, lam, rep in result:
            if oid not in nodes:
                nodes[oid] = rep
                frontier.append(oid)
    edges = []
    closed = []
    for src in sorted(steps):
        outs = steps[src]
        if all(oid == src for oid, _, _ in outs):
            closed.append(src)
        for oid, lam, rep in outs:
            if oid != src:
                edges.append((src, oid, lam))
    minimal = None
    if len(closed) == 1:
        minimal = closed[0]
    elif len(closed) > 1:
        raise NonUniqueMinimalError(
            f"multiple cocharacter-closed nodes: {closed}")
    else:
        raise NonUniqueMinimalError("no cocharacter-closed node found")
    return AccessibilityGraph(model.name, seed_id, nodes, edges, closed,
                              minimal)


def minimal_orbit(graph):
    return graph.minimal


@dataclass
class AntisymmetryReport:
    ok: bool
    classes_checked: int
    violations: list = dc_field(default_factory=list)

    def to_json(self):
        return {"antisymmetric": self.ok,
                "classes_checked": self.classes_checked,
                "violations": self.violations}


def check_antisymmetry(model, points, budgets=DEFAULT_BUDGETS):
    """No two distinct orbit classes may be mutually accessible."""
    reps = {}
    pending = []
    for p in points:
        oid = model.orbit_id(p)
        if oid not in reps:
            reps[oid] = p
            pending.append(oid)
    rel = {}
    while pending:
        oid = pending.pop()
        if oid in rel:
            continue
        rel[oid] = set()
        for dst, _, rep in model.one_step_limits(reps[oid]):
            rel[oid].add(dst)
            if dst not in reps:
                reps[dst] = rep
                pending.append(dst)
    # transitive closure
    changed = True
    while changed:
        changed = False
        for a in rel:
            new = set()
            for b in rel[a]:
                new |= rel.get(b, set())
            if not new <= rel[a]:
                rel[a] |= new
                changed = True
    violations = []
    ids = sorted(rel)
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            if b in rel[a] and a in rel[b]:
                violations.append((a, b))
    return AntisymmetryReport(not violations, len(ids), violations)


def export_dot(graph):
    """Deterministic DOT rendering of an accessibility graph."""
    lines = ["digraph accessibility {"]
    for nid in sorted(graph.nodes):
        shape = "doublecircle" if nid == graph.minimal else "ellipse"
        lines.append(f'  "{nid}" [shape={shape}];')
    for src, dst, lam in sorted(graph.edges,
                                key=lambda e: (e[0], e[1])):
        label = ",".join(str(w) for w in lam.weights)
        lines.append(f'  "{src}" -> "{dst}" [label="({label})"];')
    lines.append("}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# corpora and demos
# ---------------------------------------------------------------------------


def all_matrices(field, n, budgets=DEFAULT_BUDGETS):
    budgets.check_group(field.order() ** (n * n))
    elems = list(field.elements())
    for entries in itertools.product(elems, repeat=n * n):
        yield Matrix(field, [entries[i * n:(i + 1) * n] for i in range(n)])


def all_tuples(field, n, r, budgets=DEFAULT_BUDGETS):
    budgets.check_group(field.order() ** (n * n * r))
    for mats in itertools.product(list(all_matrices(field, n, budgets)),
                                  repeat=r):
        yield tuple(mats)


def pgl2_adjoint_demo(field, extension_gen="x"):
    """The adjoint PGL_2 example in characteristic two: the class of
    [[0,1],[t,0]] admits no proper one-step limit over k exactly when t is
    not a square; over k(x) with x^2 = t a destabilizing cocharacter with
    limit zero appears."""
    if field.characteristic() != 2:
        raise UnsupportedFieldError("the adjoint demo lives in characteristic 2")
    t = field.generator_names()[field.var] if field.kind == "FF" else None
    if t is None:
        raise UnsupportedFieldError("demo expects a rational function field")
    report = {"field": str(field)}
    sq = is_nth_power(t, 2)
    report["t_is_square"] = sq is not None
    report["proper_limit_over_k"] = sq is not None
    # over the inseparable quadratic extension the class collapses
    ext = fields.make_extension_from_coeffs(
        field, [-t, field.zero(), field.one()], extension_gen)
    x = fields.parse_element(ext, extension_gen)
    v = Matrix(ext, [[0, 1], [fields.embed(t, ext), 0]])
    g = Matrix(ext, [[1, 0], [x, 1]])
    lam = Cocharacter((1, -1), g)
    model = ConjugationModel(ext, 2)
    res = limits.limit(v, lam, model, classify=False)
    lim = res.value
    norm = lim - Matrix.identity(ext, 2) * lim[0][0]  # pgl2 normalization
    report["extension"] = str(ext)
    report["extension_cocharacter"] = lam.to_json()
    report["extension_limit_is_zero"] = all(
        not c for row in norm.rows for c in row)
    return report
