"""Cocharacters as integer weight vectors, weight gradings, limits and
parabolic membership for matrix groups.

A cocharacter is stored in diagonalized coordinates (integer weights with
respect to a declared basis) together with an optional conjugator g, encoding
g . lambda.  Operations apply the conjugator to the input point rather than to
the cocharacter, which keeps all weight arithmetic integer-only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import (
    DimensionMismatchError,
    NotLinearizableError,
    PreconditionFailedError,
)
from .linalg import Matrix

IN_RU_P = "InRuP"
IN_LEVI = "InLevi"
IN_P_NOT_LEVI = "InPNotLevi"
NOT_IN_P = "NotInP"

FIXES_POINT = "FixesPoint"
WITHIN_RATIONAL_ORBIT = "DestabilizesWithinRationalOrbit"
PROPERLY_DESTABILIZES = "ProperlyDestabilizes"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Cocharacter:
    weights: tuple
    conjugator: Matrix = None

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if self.conjugator is not None and not self.conjugator.is_invertible():
            raise PreconditionFailedError("conjugator must be invertible")

    def is_trivial(self):
        return not any(self.weights)

    def scaled_plus(self, n, other):
        """n*self + other for commuting (same-conjugator) cocharacters."""
        if len(self.weights) != len(other.weights):
            raise DimensionMismatchError("cocharacter ranks differ")
        return Cocharacter(
            tuple(n * a + b for a, b in zip(self.weights, other.weights)),
            self.conjugator)

    def to_json(self):
        out = {"weights": list(self.weights)}
        if self.conjugator is not None:
            out["conjugator"] = self.conjugator.to_json()["rows"]
        return out


@dataclass
class WeightGrading:
    """Decomposition of a point into cocharacter weight components, plus a
    basis of each ambient weight space (all in original coordinates)."""

    components: dict
    weight_spaces: dict


@dataclass
class LimitResult:
    exists: bool
    value: object = None
    classification: str = UNKNOWN

    def to_json(self, model=None):
        val = None
        if self.exists:
            val = (model.point_to_json(self.value) if model is not None
                   else self.value)
        return {"exists": self.exists, "value": val,
                "classification": self.classification}


class ActionModel:
    """A linear action of a matrix group on a coordinatized space.

    Subclasses fix the point representation and say how diagonal cocharacter
    weights induce weights on the coordinates.
    """

    name = "abstract"

    def __init__(self, field, dim):
        self.field = field
        self.dim = dim

    def to_vector(self, point):
        return tuple(point)

    def from_vector(self, vec):
        return tuple(vec)

    def coordinate_weights(self, weights):
        raise NotLinearizableError("model exposes no linear structure")

    def conjugate(self, point, g, inverse=False):
        raise NotLinearizableError("model has no conjugation action")

    def orbit_id(self, point):
        return None

    def point_to_json(self, point):
        return [c.literal() for c in self.to_vector(point)]

    def points_equal(self, a, b):
        return self.to_vector(a) == self.to_vector(b)


class ConjugationModel(ActionModel):
    """GL_n acting on End(W) by conjugation; points are n x n matrices."""

    name = "endo"

    def __init__(self, field, n):
        super().__init__(field, n * n)
        self.n = n

    def to_vector(self, point):
        return tuple(c for row in point.rows for c in row)

    def from_vector(self, vec):
        n = self.n
        return Matrix(self.field, [vec[i * n:(i + 1) * n] for i in range(n)])

    def coordinate_weights(self, weights):
        if len(weights) != self.n:
            raise DimensionMismatchError("cocharacter length != matrix size")
        return tuple(weights[i] - weights[j]
                     for i in range(self.n) for j in range(self.n))

    def conjugate(self, point, g, inverse=False):
        if inverse:
            gi = g.inverse()
            return gi * point * g
        return g * point * g.inverse()

    def orbit_id(self, point):
        from . import endo

        return endo.invariant_factors(point).orbit_id()

    def point_to_json(self, point):
        return point.to_json()["rows"]


class LinearModel(ActionModel):
    """Representation given by an explicit dim x rank integer weight matrix:
    coordinate i scales by a^(row_i . lambda) under the torus."""

    def __init__(self, field, weight_matrix, name="linear"):
        super().__init__(field, len(weight_matrix))
        self.weight_matrix = tuple(tuple(int(x) for x in row)
                                   for row in weight_matrix)
        self.rank = len(self.weight_matrix[0]) if self.weight_matrix else 0
        self.name = name

    def coordinate_weights(self, weights):
        if len(weights) != self.rank:
            raise DimensionMismatchError("cocharacter rank mismatch")
        return tuple(sum(r * w for r, w in zip(row, weights))
                     for row in self.weight_matrix)

    def conjugate(self, point, g, inverse=False):
        if inverse:
            g = g.inverse()
        return g.mul_vec(tuple(point))


def _diagonal_point(point, lam, model):
    if lam.conjugator is not None:
        return model.conjugate(point, lam.conjugator, inverse=True)
    return point


def _original_point(point, lam, model):
    if lam.conjugator is not None:
        return model.conjugate(point, lam.conjugator)
    return point


def grade_vector(point, lam, model):
    """Decompose a point into cocharacter weight components."""
    dv = model.to_vector(_diagonal_point(point, lam, model))
    w = model.coordinate_weights(lam.weights)
    zero = model.field.zero()
    one = model.field.one()
    components = {}
    for n in sorted(set(w)):
        comp = tuple(dv[i] if w[i] == n else zero for i in range(len(dv)))
        if any(comp):
            components[n] = _original_point(model.from_vector(comp), lam, model)
    spaces = {}
    for n in sorted(set(w)):
        basis = []
        for i in range(len(dv)):
            if w[i] == n:
                e = tuple(one if j == i else zero for j in range(len(dv)))
                basis.append(_original_point(model.from_vector(e), lam, model))
        spaces[n] = basis
    return WeightGrading(components, spaces)


def limit(point, lam, model, classify=True):
    """Limit of a point along a cocharacter: the weight-zero projection when
    no negative weight component is present."""
    dv = model.to_vector(_diagonal_point(point, lam, model))
    w = model.coordinate_weights(lam.weights)
    zero = model.field.zero()
    for i, c in enumerate(dv):
        if c and w[i] < 0:
            return LimitResult(False, None, UNKNOWN)
    val_diag = tuple(dv[i] if w[i] == 0 else zero for i in range(len(dv)))
    value = _original_point(model.from_vector(val_diag), lam, model)
    if model.points_equal(value, point):
        return LimitResult(True, value, FIXES_POINT)
    if not classify:
        return LimitResult(True, value, UNKNOWN)
    src_id = model.orbit_id(point)
    if src_id is None:
        return LimitResult(True, value, UNKNOWN)
    cls = (WITHIN_RATIONAL_ORBIT if model.orbit_id(value) == src_id
           else PROPERLY_DESTABILIZES)
    return LimitResult(True, value, cls)


def p_lambda_membership(g, lam):
    """Classify an invertible matrix relative to the weight flag of lambda."""
    if not g.is_square() or len(lam.weights) != g.nrows:
        raise DimensionMismatchError("matrix/cocharacter size mismatch")
    if not g.is_invertible():
        raise PreconditionFailedError("group element must be invertible")
    a = g
    if lam.conjugator is not None:
        h = lam.conjugator
        a = h.inverse() * g * h
    w = lam.weights
    n = a.nrows
    one, _ = g.field.one(), g.field.zero()
    in_p = all(not a[i][j] or w[i] >= w[j]
               for i in range(n) for j in range(n))
    if not in_p:
        return NOT_IN_P
    block_diag = all(not a[i][j] or w[i] == w[j]
                     for i in range(n) for j in range(n))
    if block_diag:
        return IN_LEVI
    unit_blocks = all(a[i][j] == (one if i == j else g.field.zero())
                      for i in range(n) for j in range(n) if w[i] == w[j])
    return IN_RU_P if unit_blocks else IN_P_NOT_LEVI


def torus_to_cocharacter(characters, rank):
    """A cocharacter with nonzero pairing against every listed nonzero
    character: searched in increasing sup-norm, lexicographically descending
    within each shell."""
    chars = [tuple(int(x) for x in c) for c in characters]
    for c in chars:
        if len(c) != rank:
            raise DimensionMismatchError("character rank mismatch")
    chars = [c for c in chars if any(c)]
    if not chars:
        return Cocharacter((0,) * rank)
    cap = 1 + max(sum(abs(x) for x in c) for c in chars) * len(chars)
    for m in range(1, cap + 1):
        for v in itertools.product(range(m, -m - 1, -1), repeat=rank):
            if max(abs(x) for x in v) != m:
                continue
            if all(sum(a * b for a, b in zip(v, c)) for c in chars):
                return Cocharacter(v)
    raise RuntimeError("no avoiding cocharacter found within bound")


def iterated_limit_check(point, lam, mu, model):
    """Smallest N with lim along n*lam+mu equal to the two-step limit for all
    tested n >= N, plus that common value."""
    if lam.conjugator != mu.conjugator:
        raise PreconditionFailedError(
            "cocharacters must be simultaneously diagonal")
    first = limit(point, lam, model)
    if not first.exists:
        raise PreconditionFailedError("limit along the first cocharacter is missing")
    second = limit(first.value, mu, model)
    if not second.exists:
        raise PreconditionFailedError("two-step limit is missing")
    target = second.value
    wl = model.coordinate_weights(lam.weights)
    wm = model.coordinate_weights(mu.weights)
    bound = 1 + 2 * max([abs(x) for x in wl + wm] or [0])
    ok = []
    for n in range(1, bound + 1):
        combined = lam.scaled_plus(n, mu)
        res = limit(point, combined, model)
        ok.append(res.exists and model.points_equal(res.value, target))
    N = bound
    witness = None
    for n in range(bound, 0, -1):
        if not ok[n - 1]:
            break
        N = n
        witness = limit(point, lam.scaled_plus(n, mu), model)
    if witness is None:
        raise PreconditionFailedError("combined limits never stabilize")
    return N, witness
