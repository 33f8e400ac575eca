"""GL(W) acting by conjugation on End(W): invariant factors, the square-free
criterion for cocharacter-closedness, semisimplification with a witness
cocharacter, and rational unipotent conjugators.

A conjugation orbit is identified by its invariant-factor sequence, which
classifies GL_n(k)-conjugacy over every field.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from . import limits, poly
from .errors import (
    NonSquareError,
    NotRuConjugateError,
    PreconditionFailedError,
)
from .linalg import Echelon, Matrix
from .limits import Cocharacter, ConjugationModel
from .poly import Polynomial, factor, gcd, lcm, radical, squarefree_test


@dataclass(frozen=True)
class EndoClass:
    """A GL_n(k)-conjugacy class, identified by invariant factors d_1 | ... | d_r."""

    representative: Matrix
    invariant_factors: tuple

    @property
    def min_poly(self):
        return self.invariant_factors[-1]

    @property
    def char_poly(self):
        out = Polynomial.constant(self.representative.field,
                                  self.representative.field.one())
        for d in self.invariant_factors:
            out = out * d
        return out

    def elementary_divisors(self):
        """Prime-power pieces (q, e) with multiplicity, canonically sorted."""
        out = []
        for d in self.invariant_factors:
            for q, e in factor(d).factors:
                out.append((q, e))
        out.sort(key=lambda it: (it[0].sort_key(), it[1]))
        return out

    def commutant_dimension(self):
        return commutant_dimension(self.representative)

    def orbit_id(self):
        return tuple(d.coeffs for d in self.invariant_factors)

    def __eq__(self, other):
        if not isinstance(other, EndoClass):
            return NotImplemented
        return self.orbit_id() == other.orbit_id()

    def __hash__(self):
        return hash(self.orbit_id())

    def label(self):
        return " | ".join(d.literal() for d in self.invariant_factors)

    def to_json(self):
        return {"invariant_factors": [d.literal()
                                      for d in self.invariant_factors],
                "representative": self.representative.to_json()["rows"]}


def _require_square(f):
    if not f.is_square():
        raise NonSquareError("endomorphism must be a square matrix")


def char_poly(f):
    """Monic characteristic polynomial, computed division-free."""
    _require_square(f)
    return f.charpoly()


def min_poly(f):
    """Smallest-degree monic annihilator, via iterated Krylov spans."""
    _require_square(f)
    fld = f.field
    n = f.nrows
    zero, one = fld.zero(), fld.one()
    m = Polynomial.constant(fld, one)
    for start in range(n):
        e = tuple(one if i == start else zero for i in range(n))
        ech = Echelon([e])
        krylov = [e]
        v = e
        while True:
            v = f.mul_vec(v)
            if ech.add(v):
                krylov.append(v)
            else:
                break
        sol = Matrix.from_columns(fld, krylov).solve(v)
        local = Polynomial(fld, [-c for c in sol] + [one])
        m = lcm(m, local)
        if m.degree == n:
            break
    return m.monic()


def _smith_invariant_factors(f):
    """Invariant factors of f from the Smith form of T*I - f over k[T]."""
    fld = f.field
    n = f.nrows
    X = Polynomial.x(fld)
    M = [[(X - Polynomial.constant(fld, f[i][j])) if i == j
          else Polynomial.constant(fld, -f[i][j])
          for j in range(n)] for i in range(n)]

    def nonzero_min(k):
        best = None
        for i in range(k, n):
            for j in range(k, n):
                if not M[i][j].is_zero():
                    if best is None or M[i][j].degree < M[best[0]][best[1]].degree:
                        best = (i, j)
        return best

    for k in range(n):
        while True:
            pos = nonzero_min(k)
            if pos is None:
                break
            i0, j0 = pos
            if i0 != k:
                M[k], M[i0] = M[i0], M[k]
            if j0 != k:
                for row in M:
                    row[k], row[j0] = row[j0], row[k]
            dirty = False
            for i in range(k + 1, n):
                if not M[i][k].is_zero():
                    q = M[i][k] // M[k][k]
                    M[i] = [a - q * b for a, b in zip(M[i], M[k])]
                    if not M[i][k].is_zero():
                        dirty = True
            for j in range(k + 1, n):
                if not M[k][j].is_zero():
                    q = M[k][j] // M[k][k]
                    for i in range(n):
                        M[i][j] = M[i][j] - q * M[i][k]
                    if not M[k][j].is_zero():
                        dirty = True
            if dirty:
                continue
            if any(not M[i][k].is_zero() for i in range(k + 1, n)) or \
               any(not M[k][j].is_zero() for j in range(k + 1, n)):
                continue
            # pivot must divide the rest of the submatrix
            bad = None
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    if not (M[i][j] % M[k][k]).is_zero():
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            M[k] = [a + b for a, b in zip(M[k], M[bad])]
    diag = [M[k][k].monic() for k in range(n)]
    for i in range(n - 1):
        if not (diag[i + 1] % diag[i]).is_zero():
            g = gcd(diag[i], diag[i + 1])
            l = ((diag[i] * diag[i + 1]) // g).monic()
            diag[i], diag[i + 1] = g, l
    return tuple(d for d in diag if d.degree >= 1)


def invariant_factors(f):
    _require_square(f)
    return EndoClass(f, _smith_invariant_factors(f))


def commutant_dimension(f):
    """Dimension of {x : xf = fx} as a k-vector space."""
    _require_square(f)
    fld = f.field
    n = f.nrows
    zero = fld.zero()
    rows = []
    for i in range(n):
        for j in range(n):
            row = [zero] * (n * n)
            # (xf - fx)[i][j] = sum_k x[i][k] f[k][j] - f[i][k] x[k][j]
            for k in range(n):
                row[i * n + k] = row[i * n + k] + f[k][j]
                row[k * n + j] = row[k * n + j] - f[i][k]
            rows.append(row)
    return len(Matrix(fld, rows).nullspace())


def is_geometrically_closed(f):
    """True iff the geometric orbit is cocharacter-closed over the closure,
    i.e. the minimal polynomial is separable."""
    return poly.is_separable(min_poly(f))


@dataclass
class CocharClosedReport:
    closed: bool
    min_poly: Polynomial
    factorization: object = None       # FactorReport when closed (if available)
    subspace: list = dc_field(default_factory=list)  # f-stable flag witness
    cocharacter: Cocharacter = None
    limit: Matrix = None

    def to_json(self):
        out = {"cocharacter_closed": self.closed,
               "min_poly": self.min_poly.literal()}
        if self.factorization is not None:
            out["squarefree_factorization"] = [
                (g.literal(), m) for g, m in self.factorization.factors]
        if self.subspace:
            out["invariant_subspace"] = [[c.literal() for c in v]
                                         for v in self.subspace]
        if self.cocharacter is not None:
            out["cocharacter"] = self.cocharacter.to_json()
        if self.limit is not None:
            out["limit"] = self.limit.to_json()["rows"]
        return out


def is_cocharacter_closed(f):
    """Square-freeness of the minimal polynomial, with a certificate: the
    square-free factorization when closed, otherwise an f-stable subspace and
    a destabilizing cocharacter whose limit leaves the rational orbit."""
    _require_square(f)
    mu = min_poly(f)
    if squarefree_test(mu):
        try:
            rep = factor(mu)
        except poly.UnsupportedFieldError:
            rep = None
        return CocharClosedReport(True, mu, factorization=rep)
    lam, lim = witness_cocharacter(f)
    r = radical(mu)
    rad_image = _evaluate(r, f)
    basis = _column_space_basis(rad_image)
    return CocharClosedReport(False, mu, subspace=basis,
                              cocharacter=lam, limit=lim)


def _evaluate(p, f):
    fld = f.field
    acc = Matrix.zeros(fld, f.nrows)
    for c in reversed(list(p.coeffs)):
        acc = acc * f + Matrix.identity(fld, f.nrows) * c
    return acc


def _column_space_basis(m):
    ech = Echelon()
    return [v for v in m.columns() if ech.add(v)]


def _extend_basis(fld, vectors, new_candidates):
    ech = Echelon(vectors)
    out = list(vectors)
    for v in new_candidates:
        if ech.add(v):
            out.append(v)
    return out


def semisimplification(f):
    """The unique cocharacter-closed class in the cocharacter-closure of the
    orbit: elementary divisors are the distinct irreducible factors of the
    minimal polynomial, counted with their multiplicities in the
    characteristic polynomial."""
    _require_square(f)
    fld = f.field
    mu = min_poly(f)
    chi = char_poly(f)
    rep = factor(mu)
    pieces = []
    for q, _ in rep.factors:
        mult = 0
        rest = chi
        while True:
            quo, rem = divmod(rest, q)
            if not rem.is_zero():
                break
            rest = quo
            mult += 1
        pieces.append((q, mult))
    pieces.sort(key=lambda it: it[0].sort_key())
    blocks = []
    for q, mult in pieces:
        blocks.extend([Matrix.companion(q)] * mult)
    representative = Matrix.block_diag(fld, blocks)
    max_mult = max(m for _, m in pieces)
    inv_factors = []
    for j in range(max_mult, 0, -1):
        d = Polynomial.constant(fld, fld.one())
        for q, m in pieces:
            if m >= j:
                d = d * q
        inv_factors.append(d)
    return EndoClass(representative, tuple(inv_factors))


def witness_cocharacter(f):
    """A k-defined cocharacter whose limit exists and lies in the
    semisimplification class: weights strictly increase along the radical
    filtration W >= r(f)W >= r(f)^2 W >= ..., layer j getting weight
    2j - (depth - 1)."""
    _require_square(f)
    fld = f.field
    n = f.nrows
    mu = min_poly(f)
    if squarefree_test(mu):
        return Cocharacter((0,) * n), f
    r = radical(mu)
    R = _evaluate(r, f)
    # filtration by images of powers of r(f); R is nilpotent here
    filtr = []
    power = Matrix.identity(fld, n)
    while True:
        power = power * R if filtr else R
        basis = _column_space_basis(power)
        if not basis:
            break
        filtr.append(basis)
    depth = len(filtr) + 1  # number of layers
    # adapted basis: deepest layer first, each extended from the previous
    ordered = []
    weights = []
    prev = []
    for j in range(depth - 1, -1, -1):
        space = filtr[j - 1] if j > 0 else \
            [tuple(fld.one() if i == k else fld.zero() for i in range(n))
             for k in range(n)]
        extended = _extend_basis(fld, prev, space)
        new = extended[len(prev):]
        ordered.extend(new)
        weights.extend([2 * j - (depth - 1)] * len(new))
        prev = extended
    g = Matrix.from_columns(fld, ordered)
    conj = None if g == Matrix.identity(fld, n) else g
    lam = Cocharacter(tuple(weights), conj)
    model = ConjugationModel(fld, n)
    res = limits.limit(f, lam, model, classify=False)
    if not res.exists:
        raise RuntimeError("witness cocharacter admits no limit (bug)")
    lim = res.value
    if invariant_factors(lim) != semisimplification(f):
        raise RuntimeError("witness limit is not the semisimplification (bug)")
    return lam, lim


def ru_conjugator(f, f_limit, lam):
    """Unipotent u, block upper triangular for lam with identity diagonal
    blocks, with u f u^-1 = f_limit; exists when f_limit is the limit of f
    along lam and both lie in one geometric (= rational, here) orbit."""
    _require_square(f)
    fld = f.field
    n = f.nrows
    model = ConjugationModel(fld, n)
    res = limits.limit(f, lam, model, classify=False)
    if not res.exists or not model.points_equal(res.value, f_limit):
        raise PreconditionFailedError("f_limit is not the limit of f along lam")
    if _smith_invariant_factors(f) != _smith_invariant_factors(f_limit):
        raise NotRuConjugateError(
            "matrices are not conjugate: invariant factors differ")
    h = lam.conjugator
    a = f if h is None else h.inverse() * f * h
    b = f_limit if h is None else h.inverse() * f_limit * h
    w = lam.weights
    unknowns = [(i, j) for i in range(n) for j in range(n) if w[i] > w[j]]
    zero = fld.zero()
    rows = []
    rhs = []
    # solve x a - b x = b - a over the strictly-triangular coordinates
    for i in range(n):
        for j in range(n):
            row = [zero] * len(unknowns)
            for idx, (p_, q_) in enumerate(unknowns):
                c = zero
                if p_ == i:
                    c = c + a[q_][j]
                if q_ == j:
                    c = c - b[i][p_]
                row[idx] = c
            rows.append(row)
            rhs.append(b[i][j] - a[i][j])
    sol = Matrix(fld, rows).solve(tuple(rhs)) if unknowns else (
        None if any(rhs_i for rhs_i in rhs) else ())
    if sol is None:
        raise NotRuConjugateError("no unipotent conjugator exists")
    u = [[fld.one() if i == j else zero for j in range(n)] for i in range(n)]
    for idx, (i, j) in enumerate(unknowns):
        u[i][j] = sol[idx]
    um = Matrix(fld, u)
    if h is not None:
        um = h * um * h.inverse()
    if um * f != f_limit * um:
        raise NotRuConjugateError("no unipotent conjugator exists")
    return um
