"""Tuples of matrices as modules over the algebra they generate:
semisimplicity, composition series, semisimplification, the
extension-point-to-tuple trick, and complete reducibility for matrix groups.

Irreducibility over finite fields uses a Norton-style test: nullspace vectors
of a singular algebra element are spun to candidate submodules, with the dual
module checked the other way; the randomized element search is seeded and the
seed is recorded in the report.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field

from . import endo, poly
from .errors import (
    BasisMismatchError,
    EnumerationBudgetExceededError,
    PreconditionFailedError,
    UnsupportedFieldError,
)
from .linalg import Matrix

_PROBE_LIMIT = 64
_VECTOR_BUDGET = 1 << 12
_ALGEBRA_BUDGET = 1 << 16


@dataclass
class ModuleReport:
    algebra_dimension: int
    radical_dimension: int
    composition_factors: list      # (dimension, fingerprint string)
    semisimple: bool
    seed: int
    submodule_witness: list = dc_field(default_factory=list)

    def to_json(self):
        return {
            "algebra_dimension": self.algebra_dimension,
            "radical_dimension": self.radical_dimension,
            "composition_factors": [
                {"dimension": d, "fingerprint": f}
                for d, f in self.composition_factors],
            "semisimple": self.semisimple,
            "seed": self.seed,
            "submodule_witness": self.submodule_witness,
        }


def _flatten(m):
    return tuple(c for row in m.rows for c in row)


def enveloping_basis(mats):
    """Basis of the unital algebra generated by the tuple: breadth-first word
    closure with Gaussian reduction."""
    if not mats:
        raise PreconditionFailedError("empty tuple")
    field = mats[0].field
    n = mats[0].nrows
    rows = []      # echelon rows over the flattened n^2 coordinates
    basis = []

    def try_add(m):
        v = list(_flatten(m))
        for row, piv in rows:
            if v[piv]:
                c = v[piv]
                v = [x - c * y for x, y in zip(v, row)]
        piv = next((i for i, c in enumerate(v) if c), None)
        if piv is None:
            return False
        inv = v[piv].inverse()
        rows.append(([x * inv for x in v], piv))
        basis.append(m)
        return True

    queue = [Matrix.identity(field, n)]
    while queue:
        m = queue.pop(0)
        if try_add(m):
            for g in mats:
                queue.append(m * g)
    return basis


def _spin(field, vectors, mats):
    """Smallest subspace containing the vectors and stable under the tuple."""
    rows = []

    def reduce(v):
        v = list(v)
        for row, piv in rows:
            if v[piv]:
                c = v[piv]
                v = [x - c * y for x, y in zip(v, row)]
        return v

    def add(v):
        v = reduce(v)
        piv = next((i for i, c in enumerate(v) if c), None)
        if piv is None:
            return False
        inv = v[piv].inverse()
        rows.append(([x * inv for x in v], piv))
        return True

    queue = [tuple(v) for v in vectors]
    while queue:
        v = queue.pop(0)
        if add(v):
            for m in mats:
                queue.append(m.mul_vec(v))
    # canonical reduced echelon: sorted pivots, back-eliminated
    rows.sort(key=lambda rp: rp[1])
    for i, (row, piv) in enumerate(rows):
        for j, (other, _) in enumerate(rows):
            if i != j and other[piv]:
                c = other[piv]
                rows[j] = ([x - c * y for x, y in zip(other, row)],
                           rows[j][1])
    return tuple(tuple(row) for row, _ in rows)


def _subspace_basis_matrix(field, rows):
    return Matrix.from_columns(field, [tuple(r) for r in rows])


def _restrict(field, mats, rows):
    """Action matrices on an invariant subspace, in the given basis."""
    B = _subspace_basis_matrix(field, rows)
    out = []
    for a in mats:
        cols = []
        for r in rows:
            img = a.mul_vec(tuple(r))
            x = B.solve(img)
            if x is None:
                raise PreconditionFailedError("subspace is not invariant")
            cols.append(x)
        out.append(Matrix.from_columns(field, cols))
    return out


def _quotient(field, mats, rows):
    """Action on the quotient by an invariant subspace, in extended-basis
    coordinates; also returns the change of basis."""
    n = mats[0].nrows
    std = [tuple(field.one() if i == k else field.zero() for i in range(n))
           for k in range(n)]
    full = endo._extend_basis(field, [tuple(r) for r in rows], std)
    g = Matrix.from_columns(field, full)
    gi = g.inverse()
    d = len(rows)
    outs = []
    for a in mats:
        ap = gi * a * g
        outs.append(Matrix(field, [row[d:] for row in ap.rows[d:]]))
    return outs, g


def _transpose_module(mats):
    return [a.transpose() for a in mats]


def _all_vectors(field, n):
    count = field.order() ** n
    if count > _VECTOR_BUDGET:
        raise EnumerationBudgetExceededError(
            f"{count} vectors exceed the module enumeration budget")
    elems = list(field.elements())
    return [v for v in itertools.product(elems, repeat=n) if any(v)]


def _span_vectors(field, rows):
    """All nonzero vectors of the span of echelon rows (finite field)."""
    d = len(rows)
    count = field.order() ** d
    if count > _VECTOR_BUDGET:
        raise EnumerationBudgetExceededError("kernel too large to enumerate")
    elems = list(field.elements())
    out = []
    for coeffs in itertools.product(elems, repeat=d):
        if not any(coeffs):
            continue
        v = None
        for c, r in zip(coeffs, rows):
            w = tuple(c * x for x in r)
            v = w if v is None else tuple(a + b for a, b in zip(v, w))
        out.append(v)
    return out


def _norton(field, mats, a):
    """Norton test on a singular nonzero algebra element: returns a proper
    nonzero submodule basis, or None meaning the module is irreducible."""
    n = mats[0].nrows
    K = Matrix(field, [list(r) for r in a.rows]).nullspace()
    if not K:
        return None  # invertible element, inconclusive probe
    for v in _span_vectors(field, K):
        s = _spin(field, [v], mats)
        if 0 < len(s) < n:
            return s
    dual = _transpose_module(mats)
    Kt = Matrix(field, [list(r) for r in a.transpose().rows]).nullspace()
    for w in _span_vectors(field, Kt):
        s = _spin(field, [w], dual)
        if 0 < len(s) < n:
            sub = Matrix(field, [list(r) for r in s]).nullspace()
            return tuple(tuple(x) for x in sub)
    return "irreducible"


def _find_proper_submodule(field, mats, rng):
    """A proper nonzero invariant subspace, or None if irreducible."""
    n = mats[0].nrows
    if n == 1:
        return None
    zero, one = field.zero(), field.one()
    std = [tuple(one if i == k else zero for i in range(n)) for k in range(n)]
    for e in std:
        s = _spin(field, [e], mats)
        if 0 < len(s) < n:
            return s
    alg = enveloping_basis(mats)
    if field.kind == "Q":
        return _find_submodule_q(field, mats, alg, rng)
    if not field.is_finite():
        raise UnsupportedFieldError(
            f"multi-matrix module theory unsupported over {field}")
    # probe sequence: generators, pairwise sums and products, random combos
    probes = list(mats)
    for a, b in itertools.combinations(mats, 2):
        probes.append(a + b)
        probes.append(a * b)
    q = field.order()
    for _ in range(_PROBE_LIMIT):
        coeffs = [field.from_code(rng.randrange(q)) for _ in alg]
        m = Matrix.zeros(field, n)
        for c, basis_elt in zip(coeffs, alg):
            m = m + basis_elt * c
        probes.append(m)
    for a in probes:
        if not any(any(row) for row in a.rows):
            continue
        verdict = _norton(field, mats, a)
        if verdict == "irreducible":
            return None
        if verdict is not None:
            return verdict
    # exhaustive fallback over the algebra (or certify the division case)
    if q ** len(alg) <= _ALGEBRA_BUDGET:
        elems = list(field.elements())
        for coeffs in itertools.product(elems, repeat=len(alg)):
            if not any(coeffs):
                continue
            m = Matrix.zeros(field, n)
            for c, basis_elt in zip(coeffs, alg):
                m = m + basis_elt * c
            verdict = _norton(field, mats, m)
            if verdict == "irreducible":
                return None
            if verdict is not None:
                return verdict
        # every nonzero element invertible: the algebra is a field
        # (Wedderburn) and all spins were full, so the module is irreducible
        return None
    raise EnumerationBudgetExceededError("algebra too large for Norton search")


def _find_submodule_q(field, mats, alg, rng):
    n = mats[0].nrows
    rad = _algebra_radical_q(field, alg)
    if rad:
        std = [tuple(field.one() if i == k else field.zero() for i in range(n))
               for k in range(n)]
        vecs = [r.mul_vec(e) for r in rad for e in std]
        s = _spin(field, [v for v in vecs if any(v)], mats)
        if 0 < len(s) < n:
            return s
    # semisimple case: split through the center of the commutant
    comm = _commutant_basis(field, mats)
    sub = _center_split(field, mats, comm)
    if sub is not None:
        return sub
    # kernel probes over factored minimal polynomials
    probes = list(mats)
    for a, b in itertools.combinations(mats, 2):
        probes.append(a + b)
        probes.append(a * b)
    for a, b in itertools.combinations(comm, 2):
        probes.append(a * b)
        probes.append(a + b)
    probes.extend(comm)
    for _ in range(_PROBE_LIMIT):
        m = Matrix.zeros(field, n)
        for basis_elt in alg:
            m = m + basis_elt * field.from_int(rng.randrange(-3, 4))
        probes.append(m)
    for a in probes:
        if not any(any(row) for row in a.rows):
            continue
        mu = endo.min_poly(a)
        for qf, _ in poly.factor(mu).factors:
            if qf.degree == mu.degree:
                continue
            ker = Matrix(field,
                         [list(r) for r in endo._evaluate(qf, a).rows]
                         ).nullspace()
            for v in ker:
                s = _spin(field, [v], mats)
                if 0 < len(s) < n:
                    return s
    return None


def _algebra_radical_q(field, alg):
    """Radical of the enveloping algebra via the trace bilinear form."""
    gram = Matrix(field, [[(a * b).trace() for b in alg] for a in alg])
    out = []
    for coeffs in gram.nullspace():
        m = Matrix.zeros(field, alg[0].nrows)
        for c, basis_elt in zip(coeffs, alg):
            m = m + basis_elt * c
        out.append(m)
    return out


def _commutant_basis(field, mats):
    n = mats[0].nrows
    zero = field.zero()
    rows = []
    for a in mats:
        for i in range(n):
            for j in range(n):
                row = [zero] * (n * n)
                for k in range(n):
                    row[i * n + k] = row[i * n + k] + a[k][j]
                    row[k * n + j] = row[k * n + j] - a[i][k]
                rows.append(row)
    out = []
    for v in Matrix(field, rows).nullspace():
        out.append(Matrix(field, [v[i * n:(i + 1) * n] for i in range(n)]))
    return out


def _center_split(field, mats, comm):
    """Idempotent splitting from the center of the commutant (char 0)."""
    n = mats[0].nrows
    if len(comm) <= 1:
        return None
    # center of the commutant: elements commuting with every basis element
    zero = field.zero()
    m = len(comm)
    rows = []
    for c in comm:
        for i in range(n):
            for j in range(n):
                row = []
                for z in comm:
                    e = (z * c)[i][j] - (c * z)[i][j]
                    row.append(e)
                rows.append(row)
    center = []
    for coeffs in Matrix(field, rows).nullspace():
        z = Matrix.zeros(field, n)
        for c, basis_elt in zip(coeffs, comm):
            z = z + basis_elt * c
        center.append(z)
    if len(center) <= 1:
        return None
    # a primitive element of the (commutative, semisimple) center
    best = None
    for z in center:
        mu = endo.min_poly(z)
        if best is None or mu.degree > best[1].degree:
            best = (z, mu)
        if mu.degree == len(center):
            break
    for i, z1 in enumerate(center):
        if best[1].degree == len(center):
            break
        for z2 in center[i + 1:]:
            z = z1 + z2
            mu = endo.min_poly(z)
            if mu.degree > best[1].degree:
                best = (z, mu)
    z, mu = best
    for qf, _ in poly.factor(mu).factors:
        if qf.degree == mu.degree:
            continue
        ker = Matrix(field,
                     [list(r) for r in endo._evaluate(qf, z).rows]).nullspace()
        if ker:
            s = _spin(field, ker, mats)
            if 0 < len(s) < mats[0].nrows:
                return s
    return None


def _module_radical(field, mats, rng):
    """Radical of the module: annihilator of the socle of the dual module
    over finite fields, rad(A).W over the rationals."""
    n = mats[0].nrows
    if field.kind == "Q":
        alg = enveloping_basis(mats)
        rad = _algebra_radical_q(field, alg)
        std = [tuple(field.one() if i == k else field.zero()
                     for i in range(n)) for k in range(n)]
        vecs = [r.mul_vec(e) for r in rad for e in std]
        vecs = [v for v in vecs if any(v)]
        return _spin(field, vecs, mats) if vecs else ()
    dual = _transpose_module(mats)
    spins = {}
    for v in _all_vectors(field, n):
        s = _spin(field, [v], dual)
        spins[s] = None
    minimal = []
    for s in spins:
        if all(t == s or not _contains(field, s, t) for t in spins):
            minimal.append(s)
    soc_rows = []
    for s in minimal:
        soc_rows.extend(s)
    if not soc_rows:
        return ()
    kernel = Matrix(field, [list(r) for r in soc_rows]).nullspace()
    return tuple(tuple(v) for v in kernel)


def _contains(field, big, small):
    """small <= big for echelon row tuples."""
    rows = [(list(r), next(i for i, c in enumerate(r) if c)) for r in big]
    for v in small:
        v = list(v)
        for row, piv in rows:
            if v[piv]:
                c = v[piv]
                v = [x - c * y for x, y in zip(v, row)]
        if any(v):
            return False
    return True


def _composition_flag(field, mats, rng):
    """A full flag of submodules 0 < U_1 < ... < W, as lists of basis rows."""
    n = mats[0].nrows
    sub = _find_proper_submodule(field, mats, rng)
    if sub is None:
        return []
    rows = [tuple(r) for r in sub]
    inner_mats = _restrict(field, mats, rows)
    B = _subspace_basis_matrix(field, rows)
    inner_flag = []
    for f in _composition_flag(field, inner_mats, rng):
        inner_flag.append(tuple(B.mul_vec(v) for v in f))
    quot_mats, g = _quotient(field, mats, rows)
    d = len(rows)
    outer_flag = []
    for f in _composition_flag(field, quot_mats, rng):
        lifted = list(rows)
        for v in f:
            full = (field.zero(),) * d + tuple(v)
            lifted.append(g.mul_vec(full))
        outer_flag.append(tuple(lifted))
    return inner_flag + [tuple(rows)] + outer_flag


def _fingerprint(field, mats):
    return "dim=%d;%s" % (mats[0].nrows if mats else 0,
                          "|".join(endo.min_poly(a).literal() for a in mats))


def _graded_pieces(field, mats, flag):
    """Adapted basis from a flag plus per-layer graded action matrices."""
    n = mats[0].nrows
    basis = []
    sizes = []
    prev = []
    std = [tuple(field.one() if i == k else field.zero() for i in range(n))
           for k in range(n)]
    for rows in list(flag) + [tuple(std)]:
        ext = endo._extend_basis(field, prev, [tuple(r) for r in rows])
        new = ext[len(prev):]
        basis.extend(new)
        sizes.append(len(new))
        prev = ext
    g = Matrix.from_columns(field, basis)
    gi = g.inverse()
    graded = []
    offs = []
    off = 0
    for s in sizes:
        offs.append((off, off + s))
        off += s
    factors = []
    for lo, hi in offs:
        if lo == hi:
            continue
        piece = []
        for a in mats:
            ap = gi * a * g
            piece.append(Matrix(field,
                                [row[lo:hi] for row in ap.rows[lo:hi]]))
        factors.append(piece)
    return factors, g


def is_semisimple(t, seed=0):
    """Module report for a tuple: radical, composition factors, verdict."""
    t = tuple(t)
    if not t:
        raise PreconditionFailedError("empty tuple")
    field = t[0].field
    for a in t:
        if not a.is_square() or a.nrows != t[0].nrows:
            raise PreconditionFailedError("tuple entries must share one size")
    if field.kind not in ("Q", "GF") and len(t) > 1:
        raise UnsupportedFieldError(
            "semisimplicity of multi-matrix tuples needs Q or GF(q)")
    rng = random.Random(seed)
    if field.kind in ("Q", "GF"):
        alg = enveloping_basis(t)
        rad = _module_radical(field, t, rng)
        flag = _composition_flag(field, t, rng)
        factors, _ = _graded_pieces(field, t, flag)
        comp = [(p[0].nrows, _fingerprint(field, p)) for p in factors]
        return ModuleReport(
            algebra_dimension=len(alg),
            radical_dimension=len(rad),
            composition_factors=comp,
            semisimple=not rad,
            seed=seed,
            submodule_witness=[[c.literal() for c in v] for v in
                               (flag[0] if flag else [])])
    # single matrix over a factorization-backed field: k[T]-module theory
    f = t[0]
    mu = endo.min_poly(f)
    rad_poly = poly.radical(mu)
    R = endo._evaluate(rad_poly, f)
    rad_dim = Matrix(field, [list(r) for r in R.rows]).rank()
    eldivs = endo.invariant_factors(f).elementary_divisors()
    comp = []
    for qf, e in eldivs:
        for _ in range(e):
            comp.append((qf.degree, "dim=%d;%s" % (qf.degree, qf.literal())))
    return ModuleReport(
        algebra_dimension=mu.degree,
        radical_dimension=rad_dim,
        composition_factors=comp,
        semisimple=poly.squarefree_test(mu),
        seed=seed)


def has_complement(t, rows):
    """Solve the linear splitting system: is the invariant subspace a direct
    summand?"""
    field = t[0].field
    n = t[0].nrows
    d = len(rows)
    B = _subspace_basis_matrix(field, rows)
    # unknown projection pi: W -> W with im(pi) <= U, pi|_U = id, pi a == a pi
    zero = field.zero()
    unknowns = [(i, j) for i in range(d) for j in range(n)]  # pi = B * X
    eq_rows = []
    rhs = []
    # pi|_U = id: X * B = I_d
    for c in range(d):
        col = B.column(c)
        for i in range(d):
            row = [zero] * len(unknowns)
            for j in range(n):
                row[i * n + j] = col[j]
            eq_rows.append(row)
            rhs.append(field.one() if i == c else zero)
    # equivariance: X a = (restriction of a) X for every generator
    restr = _restrict(field, t, rows)
    for a, ar in zip(t, restr):
        for i in range(d):
            for j in range(n):
                row = [zero] * len(unknowns)
                for k in range(n):
                    row[i * n + k] = row[i * n + k] + a[k][j]
                for k in range(d):
                    row[k * n + j] = row[k * n + j] - ar[i][k]
                eq_rows.append(row)
                rhs.append(zero)
    return Matrix(field, eq_rows).solve(tuple(rhs)) is not None


def semisimplify_tuple(t, seed=0):
    """Block-diagonal tuple of composition factors (the associated graded of
    a composition series)."""
    t = tuple(t)
    field = t[0].field
    if field.kind not in ("Q", "GF") and len(t) > 1:
        raise UnsupportedFieldError(
            "semisimplification of multi-matrix tuples needs Q or GF(q)")
    if field.kind not in ("Q", "GF"):
        cls = endo.semisimplification(t[0])
        return (cls.representative,)
    rng = random.Random(seed)
    flag = _composition_flag(field, t, rng)
    factors, _ = _graded_pieces(field, t, flag)
    n = t[0].nrows
    out = []
    for idx in range(len(t)):
        out.append(Matrix.block_diag(field, [p[idx] for p in factors]))
    return tuple(out)


def gcr_over_k(generators, seed=0):
    """Complete reducibility of the matrix group generated by the tuple:
    semisimplicity of the natural module over the group algebra."""
    generators = tuple(generators)
    for g in generators:
        if not g.is_invertible():
            raise PreconditionFailedError("generators must be invertible")
    report = is_semisimple(generators, seed=seed)
    return report.semisimple, report


def tuple_from_extension_point(v, basis, base_field):
    """Write v = sum_i alpha_i v_i with v_i over the base field; returns the
    tuple (v_1, ..., v_r)."""
    v = tuple(v)
    if not basis:
        raise BasisMismatchError("empty basis")
    k1 = basis[0].field
    for a in basis:
        if a.field != k1:
            raise BasisMismatchError("basis elements live in different fields")

    def coords(x):
        if k1.kind == "EXT" and k1.base == base_field:
            return list(x.payload)
        if k1.kind == "GF" and base_field.kind == "GF" \
                and base_field.p == k1.p and base_field.e == 1:
            payload = x.payload if k1.e > 1 else (x.payload,)
            return [base_field.from_int(c) for c in payload]
        if k1 == base_field:
            return [x]
        raise BasisMismatchError(
            f"cannot take coordinates of {k1} over {base_field}")

    cols = [coords(a) for a in basis]
    d = len(cols[0])
    if len(basis) != d:
        raise BasisMismatchError("basis size does not match the degree")
    B = Matrix.from_columns(base_field, [tuple(c) for c in cols])
    if not B.is_invertible():
        raise BasisMismatchError("not a basis of the extension")
    Bi = B.inverse()
    parts = [[] for _ in range(d)]
    for entry in v:
        x = Bi.mul_vec(tuple(coords(entry)))
        for i in range(d):
            parts[i].append(x[i])
    return tuple(tuple(p) for p in parts)
