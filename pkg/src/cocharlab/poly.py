"""Univariate polynomial toolbox: gcd, derivative, separability, square-free
testing over possibly imperfect fields, and irreducible factorization.

Backends: Q (square-free decomposition + Hensel lifting mod p), GF(q)
(distinct-degree / equal-degree splitting), F_p(t) (bivariate factorization by
specialization and lifting in powers of t - c), and extension towers handled
through the flattening isomorphisms in :mod:`cocharlab.fields`.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from . import fields
from .errors import (
    DegreeTooLargeError,
    UnsupportedFieldError,
    ZeroPolynomialError,
)
from .fields import (
    FieldDescriptor,
    padd,
    pdivmod,
    peval,
    pextgcd,
    pgcd,
    pmod,
    pmul,
    pscale,
    psub,
    ptrim,
)

# desk-scale budgets; beyond these factor() raises DegreeTooLargeError
MAX_Q_DEGREE = 24
MAX_BI_DEG_MAIN = 64
MAX_BI_DEG_AUX = 48
MAX_MODULAR_FACTORS = 16
MAX_SPECIALIZE_EXT = 8


def _seed(*parts):
    h = hashlib.sha256("|".join(str(p) for p in parts).encode()).hexdigest()
    return int(h[:16], 16)


class Polynomial:
    """Dense univariate polynomial over a FieldDescriptor (variable T)."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        cs = []
        for c in coeffs:
            if isinstance(c, int):
                c = field.from_int(c)
            cs.append(c)
        self.field = field
        self.coeffs = tuple(ptrim(cs))

    # -- constructors --------------------------------------------------------

    @staticmethod
    def constant(field, c):
        return Polynomial(field, [c])

    @staticmethod
    def x(field):
        return Polynomial(field, [0, 1])

    @staticmethod
    def parse(field, text, var="T"):
        return Polynomial(field, fields.parse_poly_coeffs(field, text, var))

    # -- structure -----------------------------------------------------------

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    @property
    def lc(self):
        if not self.coeffs:
            raise ZeroPolynomialError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def monic(self):
        if self.is_zero() or self.lc == self.field.one():
            return self
        inv = self.lc.inverse()
        return Polynomial(self.field, [c * inv for c in self.coeffs])

    def __getitem__(self, i):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.field.zero()

    # -- arithmetic ------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, fields.FieldElement)):
            return Polynomial.constant(self.field, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Polynomial(self.field, padd(list(self.coeffs), list(other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Polynomial(self.field, psub(list(self.coeffs), list(other.coeffs)))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Polynomial(
            self.field,
            pmul(list(self.coeffs), list(other.coeffs), self.field.zero()))

    __rmul__ = __mul__

    def __neg__(self):
        return Polynomial(self.field, [-c for c in self.coeffs])

    def __divmod__(self, other):
        other = self._coerce(other)
        q, r = pdivmod(list(self.coeffs), list(other.coeffs))
        return Polynomial(self.field, q), Polynomial(self.field, r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __pow__(self, n):
        out = Polynomial.constant(self.field, self.field.one())
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def evaluate(self, x):
        return peval(list(self.coeffs), x, x.field.zero())

    def derivative(self):
        f = self.field
        return Polynomial(f, [f.from_int(i) * c
                              for i, c in enumerate(self.coeffs)][1:])

    def map_coefficients(self, fn, new_field):
        return Polynomial(new_field, [fn(c) for c in self.coeffs])

    def shift_down(self, p):
        """For f with f = v(T^p) return v."""
        return Polynomial(self.field, list(self.coeffs)[::p])

    def sort_key(self):
        return (self.degree, tuple(c.sort_key() for c in self.coeffs))

    def literal(self, var="T"):
        return fields._poly_literal([c.literal() for c in self.coeffs], var)

    def __str__(self):
        return self.literal()

    def __repr__(self):
        return f"<poly {self.literal()} over {self.field}>"

    def to_json(self):
        return {"descriptor": str(self.field),
                "coeffs": [c.literal() for c in self.coeffs]}

    @staticmethod
    def from_json(obj):
        field = fields.parse_descriptor(obj["descriptor"])
        return Polynomial(field, [fields.parse_element(field, c)
                                  for c in obj["coeffs"]])


@dataclass(frozen=True)
class FactorReport:
    """Complete factorization: unit * prod(factor^multiplicity) == input."""

    unit: fields.FieldElement
    factors: tuple  # of (Polynomial monic irreducible, multiplicity)

    def reconstruct(self):
        field = self.unit.field
        out = Polynomial.constant(field, self.unit)
        for g, m in self.factors:
            out = out * g ** m
        return out

    def is_squarefree(self):
        return all(m == 1 for _, m in self.factors)


def _report(unit, pairs):
    merged = {}
    for g, m in pairs:
        merged[g] = merged.get(g, 0) + m
    ordered = sorted(merged.items(), key=lambda it: it[0].sort_key())
    return FactorReport(unit, tuple(ordered))


# ---------------------------------------------------------------------------
# gcd / derivative / separability / square-freeness
# ---------------------------------------------------------------------------


def gcd(f, g):
    """Monic greatest common divisor; gcd(0, 0) = 0."""
    return Polynomial(f.field, pgcd(list(f.coeffs), list(g.coeffs)))


def lcm(f, g):
    if f.is_zero() or g.is_zero():
        return Polynomial(f.field, [])
    d = gcd(f, g)
    return ((f * g) // d).monic()


def derivative(f):
    return f.derivative()


def is_separable(f):
    """True iff f has no repeated root over the algebraic closure."""
    if f.is_zero():
        raise ZeroPolynomialError("separability of the zero polynomial")
    if f.degree <= 1:
        return True
    fp = f.derivative()
    if fp.is_zero():
        return False
    return gcd(f, fp).degree == 0


def squarefree_test(f):
    """True iff f has no repeated monic irreducible factor in k[T].

    Characteristic p: the gcd recursion handles the separable part and the
    fully inseparable residue w = v(T^p) is resolved through the factorization
    backend plus the p-th-power-coefficient criterion.
    """
    if f.is_zero():
        raise ZeroPolynomialError("square-freeness of the zero polynomial")
    f = f.monic()
    if f.degree <= 1:
        return True
    p = f.field.characteristic()
    fp = f.derivative()
    if fp.is_zero():
        # only possible in characteristic p: f = v(T^p)
        v = f.shift_down(p)
        rep = factor(v)
        for g, m in rep.factors:
            if m > 1:
                return False
            if all(fields.pth_root(c) is not None for c in g.coeffs):
                return False  # g(T^p) is a p-th power
        return True
    w = gcd(f, fp)
    if w.degree == 0:
        return True
    g = f // w
    if gcd(g, g.derivative()).degree > 0:
        return False
    if gcd(g, w).degree > 0:
        return False
    return squarefree_test(w)


def radical(f):
    """Monic product of the distinct irreducible factors of f."""
    if f.is_zero():
        raise ZeroPolynomialError("radical of the zero polynomial")
    if f.degree == 0:
        return Polynomial.constant(f.field, f.field.one())
    if f.field.characteristic() == 0:
        return (f // gcd(f, f.derivative())).monic()
    rep = factor(f)
    out = Polynomial.constant(f.field, f.field.one())
    for g, _ in rep.factors:
        out = out * g
    return out


def is_irreducible(f):
    if f.is_zero() or f.degree == 0:
        return False
    if f.degree == 1:
        return True
    rep = factor(f)
    return len(rep.factors) == 1 and rep.factors[0][1] == 1


# ---------------------------------------------------------------------------
# factor dispatch
# ---------------------------------------------------------------------------


def factor(f):
    """Complete irreducible factorization of f over its own field."""
    if f.is_zero():
        raise ZeroPolynomialError("factorization of the zero polynomial")
    kind = f.field.kind
    if f.degree == 0:
        return FactorReport(f.lc, ())
    if kind == "Q":
        return _factor_q(f)
    if kind == "GF":
        return _factor_gf(f)
    if kind == "FF":
        return _factor_ff(f)
    # extension tower: flatten, factor, map back
    std, fwd, back = fields.standardize(f.field)
    if std == f.field:
        raise UnsupportedFieldError(
            f"no factorization backend for {f.field}")
    g = f.map_coefficients(fwd, std)
    rep = factor(g)
    factors = tuple((h.map_coefficients(back, f.field), m)
                    for h, m in rep.factors)
    return _report(back(rep.unit), factors)


# ---------------------------------------------------------------------------
# finite fields: square-free decomposition, DDF, EDF
# ---------------------------------------------------------------------------


def _powmod(base, exp, mod):
    out = Polynomial.constant(base.field, base.field.one())
    base = base % mod
    while exp:
        if exp & 1:
            out = (out * base) % mod
        base = (base * base) % mod
        exp >>= 1
    return out


def _gf_sqf_list(f):
    """[(squarefree monic, multiplicity)] over GF(q); f monic."""
    p = f.field.characteristic()
    out = []
    n = 1
    while f.degree > 0:
        d = f.derivative()
        if not d.is_zero():
            g = gcd(f, d)
            h = f // g
            i = 1
            while h.degree > 0:
                gh = gcd(g, h)
                part = h // gh
                if part.degree > 0:
                    out.append((part, i * n))
                g = g // gh
                h = gh
                i += 1
            f = g
        if f.degree > 0:
            # f is a polynomial in T^p with perfect-field coefficients
            v = f.shift_down(p)
            root = Polynomial(f.field,
                              [fields._gf_pth_root(c) for c in v.coeffs])
            f = root
            n *= p
    return out


def _ddf(f):
    """Distinct-degree factorization of a monic squarefree f over GF(q)."""
    field = f.field
    q = field.order()
    out = []
    x = Polynomial.x(field)
    h = _powmod(x, q, f)
    d = 1
    while f.degree >= 2 * d:
        g = gcd(h - x, f)
        if g.degree > 0:
            out.append((g, d))
            f = f // g
            h = h % f
        h = _powmod(h, q, f) if f.degree > 0 else h
        d += 1
    if f.degree > 0:
        out.append((f, f.degree))
    return out


def _edf(f, d, rng):
    """Equal-degree splitting: f monic squarefree, all factors of degree d."""
    field = f.field
    if f.degree == d:
        return [f]
    q = field.order()
    p = field.characteristic()
    n = f.degree
    while True:
        r = Polynomial(field,
                       [field.from_code(rng.randrange(q)) for _ in range(n)])
        if r.degree < 1:
            continue
        if p == 2:
            s = Polynomial(field, [])
            t = r % f
            e = field.e * d
            for _ in range(e):
                s = (s + t) % f
                t = _powmod(t, 2, f)
            g = gcd(s, f)
        else:
            s = _powmod(r, (q ** d - 1) // 2, f)
            g = gcd(s - 1, f)
        if 0 < g.degree < f.degree:
            return _edf(g, d, rng) + _edf(f // g, d, rng)


def _factor_gf(f):
    unit = f.lc
    f = f.monic()
    rng = random.Random(_seed("edf", f.field, f.literal()))
    pairs = []
    for sqf, mult in _gf_sqf_list(f):
        for prod, d in _ddf(sqf):
            for irr in _edf(prod, d, rng):
                pairs.append((irr, mult))
    return _report(unit, pairs)


# ---------------------------------------------------------------------------
# rationals: Yun + Zassenhaus
# ---------------------------------------------------------------------------


def _yun(f):
    """Square-free decomposition of a monic rational polynomial (char 0)."""
    out = []
    d = f.derivative()
    a = gcd(f, d)
    b = f // a
    c = d // a
    i = 1
    while b.degree > 0:
        w = c - b.derivative()
        g = gcd(b, w)
        if g.degree > 0:
            out.append((g, i))
        b = b // g
        c = w // g
        i += 1
    return out


def _to_int_poly(f):
    """Primitive integer coefficient list (positive lc) plus no unit tracking."""
    den = 1
    for c in f.coeffs:
        den = den * c.payload.denominator // math.gcd(den, c.payload.denominator)
    ints = [int(c.payload * den) for c in f.coeffs]
    g = 0
    for c in ints:
        g = math.gcd(g, abs(c))
    if g:
        ints = [c // g for c in ints]
    if ints and ints[-1] < 0:
        ints = [-c for c in ints]
    return ints


def _int_poly_mul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    while out and out[-1] == 0:
        out.pop()
    return out


def _factor_z_squarefree(a, field):
    """Irreducible factors of a primitive squarefree integer polynomial."""
    n = len(a) - 1
    if n <= 1:
        return [a]
    from .fields import _zgcd, _ztrim

    # choose a prime keeping the degree and square-freeness
    p = 3
    while True:
        if a[-1] % p:
            ap = [c % p for c in a]
            dp = _ztrim([(i * c) % p for i, c in enumerate(ap)][1:])
            if len(_zgcd(ap, dp, p)) == 1:
                break
        p += 2
        while not fields._is_prime(p):
            p += 2
    gf = FieldDescriptor.finite(p)
    fp = Polynomial(gf, [c % p for c in a]).monic()
    rep = _factor_gf(fp)
    mods = [[c.payload for c in g.coeffs] for g, _ in rep.factors]
    if len(mods) == 1:
        return [a]
    if len(mods) > MAX_MODULAR_FACTORS:
        raise DegreeTooLargeError(
            f"too many modular factors ({len(mods)}) for recombination")
    # Mignotte-style bound on factor coefficients
    norm = math.isqrt(sum(c * c for c in a)) + 1
    bound = 2 ** (n + 1) * norm * abs(a[-1])
    K = 1
    pk = p
    while pk <= 2 * bound:
        pk *= p
        K += 1
    lifted = _hensel_lift_z(a, mods, p, K)
    return _recombine_z(a, lifted, p ** K, field)


def _hensel_lift_z(a, mods, p, K):
    """Linear multifactor Hensel lifting of monic factors mod p to mod p^K."""
    # Bezout cofactors mod p
    from .fields import _zdivmod, _zmod, _zmul, _zsub

    def zinv_mod(g, h):
        # inverse of g modulo h over GF(p)
        r0, r1 = list(h), _zmod(g, h, p)
        s0, s1 = [], [1]
        while r1:
            q, r = _zdivmod(r0, r1, p)
            r0, r1 = r1, r
            s0, s1 = s1, _zsub(s0, _zmul(q, s1, p), p)
        inv = pow(r0[-1] if r0 else 1, p - 2, p)
        return [(c * inv) % p for c in s0]

    sig = []
    for i, g in enumerate(mods):
        rest = [1]
        for j, h in enumerate(mods):
            if i != j:
                rest = _zmod(_zmul(rest, h, p), g, p)
        sig.append(zinv_mod(rest, g))

    lc = a[-1]
    G = [list(g) for g in mods]
    pk = p
    for _ in range(K - 1):
        prod = [lc]
        for g in G:
            prod = _int_poly_mul(prod, g)
        err = [(x - y) for x, y in zip(a + [0] * len(prod), prod + [0] * len(a))]
        err = [(c // pk) % p for c in err]
        while err and err[-1] == 0:
            err.pop()
        if err:
            lci = pow(lc % p, p - 2, p)
            err = [(c * lci) % p for c in err]
            for i, g in enumerate(G):
                delta = _zmod(_zmul(sig[i], err, p), [c % p for c in g], p)
                for k, c in enumerate(delta):
                    g[k] += pk * c
        pk *= p
    return G


def _recombine_z(a, lifted, pK, field):
    def sym(c):
        c %= pK
        return c - pK if c > pK // 2 else c

    def prim(c):
        g = 0
        for x in c:
            g = math.gcd(g, abs(x))
        if g > 1:
            c = [x // g for x in c]
        if c and c[-1] < 0:
            c = [-x for x in c]
        return c

    remaining = list(range(len(lifted)))
    a_poly = Polynomial(field, [field.element(Fraction(c)) for c in a])
    out = []
    size = 1
    while 2 * size <= len(remaining):
        found = True
        while found:
            found = False
            for subset in combinations(remaining, size):
                cand = [a[-1]]
                for i in subset:
                    cand = _int_poly_mul(cand, lifted[i])
                cand = prim([sym(c) for c in cand])
                cp = Polynomial(field, [field.element(Fraction(c)) for c in cand])
                if cp.degree >= 1 and (a_poly % cp).is_zero():
                    out.append(cand)
                    a_poly = a_poly // cp
                    a = _to_int_poly(a_poly)
                    remaining = [i for i in remaining if i not in subset]
                    found = 2 * size <= len(remaining)
                    break
        size += 1
    if a_poly.degree >= 1:
        out.append(_to_int_poly(a_poly))
    return out


def _factor_q(f):
    if f.degree > MAX_Q_DEGREE:
        raise DegreeTooLargeError(
            f"degree {f.degree} exceeds the rational backend bound")
    unit = f.lc
    f = f.monic()
    pairs = []
    for sqf, mult in _yun(f):
        a = _to_int_poly(sqf)
        for part in _factor_z_squarefree(a, f.field):
            g = Polynomial(f.field, [f.field.element(Fraction(c)) for c in part]).monic()
            pairs.append((g, mult))
    return _report(unit, pairs)


# ---------------------------------------------------------------------------
# F_p(t): bivariate factorization over the constant field
# ---------------------------------------------------------------------------
#
# Bivariate polynomials are dicts {(i, j): constant} with i the exponent of
# the main variable and j the exponent of the auxiliary variable.


def _bi_trim(d):
    return {k: v for k, v in d.items() if v}


def _bi_deg_main(d):
    return max((i for i, _ in d), default=-1)


def _bi_deg_aux(d):
    return max((j for _, j in d), default=-1)


def _bi_mul(a, b):
    out = {}
    for (i1, j1), x in a.items():
        for (i2, j2), y in b.items():
            k = (i1 + i2, j1 + j2)
            v = out.get(k)
            out[k] = x * y if v is None else v + x * y
    return _bi_trim(out)


def _bi_swap(d):
    return {(j, i): v for (i, j), v in d.items()}


def _bi_deriv_main(d, const):
    out = {}
    for (i, j), v in d.items():
        if i:
            w = const.from_int(i) * v
            if w:
                out[(i - 1, j)] = w
    return out


def _bi_main_coeffs(d, const):
    """Main-variable coefficients as lists of constant-poly coefficients."""
    n = _bi_deg_main(d)
    cols = [[] for _ in range(n + 1)]
    for i in range(n + 1):
        m = max((j for (ii, j) in d if ii == i), default=-1)
        col = [const.zero()] * (m + 1)
        for (ii, j), v in d.items():
            if ii == i:
                col[j] = v
        cols[i] = ptrim(col)
    return cols


def _bi_from_main_coeffs(cols):
    out = {}
    for i, col in enumerate(cols):
        for j, v in enumerate(col):
            if v:
                out[(i, j)] = v
    return out


def _bi_content_aux(d, const):
    """gcd of the main-variable coefficients in constants[aux]."""
    cols = _bi_main_coeffs(d, const)
    g = []
    for col in cols:
        g = pgcd(g, col)
        if len(g) == 1:
            break
    return g


def _bi_div_aux_poly(d, g, const):
    """Divide every main coefficient by g (a constants[aux] polynomial)."""
    cols = _bi_main_coeffs(d, const)
    out = []
    for col in cols:
        q, r = pdivmod(col, g) if col else ([], [])
        if ptrim(r):
            raise ArithmeticError("content division not exact")
        out.append(q)
    return _bi_from_main_coeffs(out)


def _ff_from_bi(d, ff):
    """BiPoly -> Polynomial over the function field (main variable = T)."""
    cols = _bi_main_coeffs(d, ff.constants)
    one = ff.constants.one()
    return Polynomial(ff, [ff.element((tuple(col), (one,))) for col in cols])


def _bi_from_ff(f):
    """Clear denominators: f monic over FF -> primitive BiPoly, unit-free."""
    ff = f.field
    const = ff.constants
    den = [const.one()]
    for c in f.coeffs:
        _, d = c.payload
        den = pdivmod(pmul(den, list(d), const.zero()),
                      pgcd(den, list(d)))[0]
    out = {}
    for i, c in enumerate(f.coeffs):
        n, d = c.payload
        q, r = pdivmod(pmul(list(n), den, const.zero()), list(d))
        assert not ptrim(r)
        for j, v in enumerate(q):
            if v:
                out[(i, j)] = v
    cont = _bi_content_aux(out, const)
    if len(cont) > 1:
        out = _bi_div_aux_poly(out, cont, const)
    return out


def _bi_exact_div(a, b, const):
    """Exact quotient a / b of bivariate polynomials, or None."""
    ff = FieldDescriptor.function_field(const, "_u")
    fa, fb = _ff_from_bi(a, ff), _ff_from_bi(b, ff)
    if fb.is_zero():
        raise ZeroDivisionError
    q, r = divmod(fa, fb)
    if not r.is_zero() or q.is_zero():
        return None
    qb = _bi_from_ff(q.monic())
    # restore the scale: a = b * q exactly, qb is primitive up to a constant
    lead_a = _bi_main_coeffs(a, const)[-1]
    lead_p = _bi_main_coeffs(_bi_mul(b, qb), const)[-1]
    qq, rr = pdivmod(lead_a, lead_p)
    if ptrim(rr) or len(qq) != 1:
        return None
    scale = qq[0]
    qb = {k: scale * v for k, v in qb.items()}
    if _bi_mul(b, qb) != _bi_trim(dict(a)):
        return None
    return qb


def _bi_pth_root(d, const):
    p = const.p
    out = {}
    for (i, j), v in d.items():
        if i % p or j % p:
            return None
        out[(i // p, j // p)] = fields._gf_pth_root(v)
    return out


def _factor_bi(P, const, depth=0):
    """Irreducible factors with multiplicities of a bivariate polynomial over
    the finite constant field; factors are primitive in the aux variable."""
    P = _bi_trim(P)
    if not P:
        raise ZeroPolynomialError("bivariate zero polynomial")
    if depth > 8:
        raise DegreeTooLargeError("bivariate recursion too deep")
    pairs = []
    # aux-variable content
    cont = _bi_content_aux(P, const)
    if len(cont) > 1:
        gf_poly = Polynomial(const, cont)
        for g, m in _factor_gf(gf_poly).factors:
            pairs.append(({(0, j): v for j, v in enumerate(g.coeffs) if v}, m))
        P = _bi_div_aux_poly(P, cont, const)
    nmain = _bi_deg_main(P)
    if nmain <= 0:
        return pairs
    if nmain == 1:
        return pairs + [(P, 1)]
    dmain = _bi_deriv_main(P, const)
    if not dmain:
        daux = _bi_deriv_main(_bi_swap(P), const)
        if not daux:
            root = _bi_pth_root(P, const)
            for g, m in _factor_bi(root, const, depth + 1):
                pairs.append((g, m * const.p))
            return pairs
        for g, m in _factor_bi(_bi_swap(P), const, depth + 1):
            pairs.append((_bi_swap(g), m))
        return pairs
    # separable part
    ff = FieldDescriptor.function_field(const, "_u")
    fP = _ff_from_bi(P, ff).monic()
    fD = _ff_from_bi(dmain, ff)
    w = gcd(fP, fD)
    sep = (fP // w).monic()
    if sep.degree > 0:
        sep_bi = _bi_from_ff(sep)
        for g in _factor_bi_separable(sep_bi, const, depth):
            m = 0
            rest = P
            while True:
                q = _bi_exact_div(rest, g, const)
                if q is None:
                    break
                rest = q
                m += 1
            if m:
                pairs.append((g, m))
                P = rest
    P = _bi_trim(P)
    if _bi_deg_main(P) > 0 or _bi_deg_aux(P) > 0:
        cont2 = _bi_content_aux(P, const)
        if len(cont2) > 1 or _bi_deg_main(P) > 0:
            pairs.extend(_factor_bi(P, const, depth + 1))
    return pairs


# -- truncated power series over a finite field ------------------------------


def _ser_add(a, b, zero, N):
    out = [zero] * N
    for i in range(N):
        x = a[i] if i < len(a) else zero
        y = b[i] if i < len(b) else zero
        out[i] = x + y
    return out


def _ser_mul(a, b, zero, N):
    out = [zero] * N
    for i, x in enumerate(a[:N]):
        if x:
            for j, y in enumerate(b[: N - i]):
                if y:
                    out[i + j] = out[i + j] + x * y
    return out


def _ser_inv(a, zero, N):
    inv0 = a[0].inverse()
    out = [inv0] + [zero] * (N - 1)
    for k in range(1, N):
        acc = zero
        for i in range(1, k + 1):
            ai = a[i] if i < len(a) else zero
            acc = acc + ai * out[k - i]
        out[k] = -inv0 * acc
    return out


def _factor_bi_separable(g, const, depth):
    """Factor a primitive bivariate polynomial that is squarefree and
    separable in its main variable: specialize, lift, recombine."""
    nmain = _bi_deg_main(g)
    naux = max(_bi_deg_aux(g), 0)
    if nmain > MAX_BI_DEG_MAIN or naux > MAX_BI_DEG_AUX:
        raise DegreeTooLargeError("bivariate degrees exceed the desk bounds")
    if nmain == 1:
        return [g]
    # find a good specialization point in a constant-field extension
    for m in range(1, MAX_SPECIALIZE_EXT + 1):
        big = (const if m == 1
               else FieldDescriptor.finite(const.p, const.e * m))
        lift_c = (lambda x: x) if m == 1 else fields._gf_embedding(const, big)
        g_big = {k: lift_c(v) for k, v in g.items()}
        cols = _bi_main_coeffs(g_big, big)
        lc_coeffs = cols[-1]
        found = None
        for cand in big.elements():
            if not peval(lc_coeffs, cand, big.zero()):
                continue
            spec = Polynomial(big, [peval(col, cand, big.zero())
                                    for col in cols])
            if spec.degree == nmain and gcd(spec, spec.derivative()).degree == 0:
                found = cand
                break
        if found is not None:
            break
    else:
        raise DegreeTooLargeError("no good specialization point found")
    c = found
    zero, one = big.zero(), big.one()
    N = 2 * naux + 2
    # shift aux variable: H(T, u) = g(T, u + c)
    H_cols = []
    for col in cols:
        shifted = [zero] * max(len(col), 1)
        for j, v in enumerate(col):
            if not v:
                continue
            # v * (u + c)^j
            term = [one]
            for _ in range(j):
                term = padd([x * c for x in term], [zero] + term)
            for k, tv in enumerate(term):
                shifted[k] = shifted[k] + v * tv
        H_cols.append(ptrim(shifted))
    spec0 = Polynomial(big, [col[0] if col else zero for col in H_cols])
    rep = _factor_gf(spec0.monic())
    hats = [h for h, _ in rep.factors]
    if len(hats) == 1:
        return [g]
    if len(hats) > MAX_MODULAR_FACTORS:
        raise DegreeTooLargeError("too many modular factors in bivariate lift")
    # make H monic over the series ring
    lc_ser = list(H_cols[-1]) + [zero] * N
    lc_inv = _ser_inv(lc_ser, zero, N)
    Hm = []
    for col in H_cols:
        ser = list(col) + [zero] * N
        Hm.append(_ser_mul(ser[:N], lc_inv, zero, N))
    Hm[-1] = [one] + [zero] * (N - 1)
    # Bezout cofactors at u = 0
    sig = []
    for i, h in enumerate(hats):
        rest = Polynomial.constant(big, one)
        for j, h2 in enumerate(hats):
            if i != j:
                rest = (rest * h2) % h
        ginv, u, _ = pextgcd(list(rest.coeffs), list(h.coeffs), one)
        sig.append(ptrim(pscale(u, ginv[0].inverse())))
    # lift: G_i as main-coeff lists of series
    G = []
    for h in hats:
        gc = [[cc] + [zero] * (N - 1) for cc in h.coeffs]
        G.append(gc)

    def up_mul(A, B):
        out = [[zero] * N for _ in range(len(A) + len(B) - 1)]
        for i, sa in enumerate(A):
            for j, sb in enumerate(B):
                prod = _ser_mul(sa, sb, zero, N)
                tgt = out[i + j]
                for k in range(N):
                    tgt[k] = tgt[k] + prod[k]
        return out

    for k in range(1, N):
        prod = G[0]
        for gi in G[1:]:
            prod = up_mul(prod, gi)
        ek = []
        for idx in range(len(Hm)):
            hv = Hm[idx][k]
            pv = prod[idx][k] if idx < len(prod) else zero
            ek.append(hv - pv)
        ek = ptrim(ek)
        if not ek:
            continue
        for i, h in enumerate(hats):
            delta = pmod(pmul(sig[i], ek, zero), list(h.coeffs))
            for idx, dv in enumerate(delta):
                G[i][idx][k] = G[i][idx][k] + dv
    # recombination over subsets, targeting factors over the original constants
    member = _membership_solver(const, big) if m > 1 else None
    lc_ser_full = lc_ser[:N]
    remaining = list(range(len(hats)))
    out = []
    current = g

    def reconstruct(subset):
        A = [lc_ser_full]
        for i in subset:
            A = up_mul(A, G[i])
        bi = {}
        for idx, ser in enumerate(A):
            # unshift: polynomial in u -> polynomial in (t - c) -> t
            coeffs = ptrim(list(ser))
            shifted = [zero] * max(len(coeffs), 1)
            for j, v in enumerate(coeffs):
                if not v:
                    continue
                term = [one]
                for _ in range(j):
                    term = padd([x * -c for x in term], [zero] + term)
                for kk, tv in enumerate(term):
                    shifted[kk] = shifted[kk] + v * tv
            for kk, tv in enumerate(ptrim(shifted)):
                if tv:
                    bi[(idx, kk)] = tv
        if not bi:
            return None
        cont = _bi_content_aux(bi, big)
        if len(cont) > 1:
            bi = _bi_div_aux_poly(bi, cont, big)
        # normalize so the top main-coefficient is monic in aux
        lead = _bi_main_coeffs(bi, big)[-1]
        s = lead[-1].inverse()
        bi = {kk: s * v for kk, v in bi.items()}
        if member is not None:
            down = {}
            for kk, v in bi.items():
                dv = member(v)
                if dv is None:
                    return None
                down[kk] = dv
            bi = down
        return bi

    size = 1
    while 2 * size <= len(remaining):
        progressed = True
        while progressed:
            progressed = False
            for subset in combinations(remaining, size):
                cand = reconstruct(subset)
                if cand is None:
                    continue
                q = _bi_exact_div(current, cand, const)
                if q is not None:
                    out.append(cand)
                    current = q
                    remaining = [i for i in remaining if i not in subset]
                    progressed = 2 * size <= len(remaining)
                    break
        size += 1
    if _bi_deg_main(current) > 0:
        out.append(current)
    return out


def _membership_solver(small, big):
    """Map elements of big GF back into small GF when they lie in its image."""
    fwd = fields._gf_embedding(small, big)
    elems = [fwd(x) for x in small.elements()]
    table = {e: x for e, x in zip(elems, small.elements())}

    def member(v):
        return table.get(v)

    return member


def _factor_ff(f):
    unit = f.lc
    fm = f.monic()
    if fm.degree > MAX_BI_DEG_MAIN:
        raise DegreeTooLargeError("degree exceeds the function-field bound")
    const = f.field.constants
    P = _bi_from_ff(fm)
    pairs = []
    for bi, mult in _factor_bi(P, const):
        if _bi_deg_main(bi) == 0:
            continue  # aux-only factors are units of the function field
        g = _ff_from_bi(bi, f.field).monic()
        pairs.append((g, mult))
    return _report(unit, pairs)
