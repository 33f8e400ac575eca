"""The G2 root system with computed Chevalley structure constants, commutator
collection for words in root-group generators, torus limits of unipotent
words, and the unipotent-class accessibility figure.

The structure constants are not transcribed from tables: the split octonion
algebra is built as Zorn vector matrices, its derivation algebra is carved out
weight space by weight space, and a Chevalley basis is normalized inside it.
Commutator constants for the root groups are then fitted by peeling ordered
products of exponentials in that faithful 8-dimensional representation, which
verifies them at construction time.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import fields
from .errors import (
    InvalidConventionError,
    NonClosedSupportError,
    ParseError,
    ReplayMismatchError,
)
from .linalg import Matrix

# positive roots as coordinates (m, n) for m*alpha + n*beta, alpha short
POSITIVE_ROOTS = ((1, 0), (0, 1), (1, 1), (2, 1), (3, 1), (3, 2))
ROOT_ORDER = POSITIVE_ROOTS  # collection order: by height, alpha before beta
_GRAM = ((Fraction(2), Fraction(-3)), (Fraction(-3), Fraction(6)))


def height(root):
    return root[0] + root[1]


def is_root(v):
    return v in POSITIVE_ROOTS or (-v[0], -v[1]) in POSITIVE_ROOTS


def all_roots():
    return list(POSITIVE_ROOTS) + [(-m, -n) for m, n in POSITIVE_ROOTS]


def inner(g1, g2):
    acc = Fraction(0)
    for i in range(2):
        for j in range(2):
            acc += g1[i] * _GRAM[i][j] * g2[j]
    return acc


def pairing(root, coroot_vec):
    """<root, x*alpha^ + y*beta^> by bilinear extension of the Cartan data."""
    m, n = root
    x, y = coroot_vec
    return x * (2 * m - 3 * n) + y * (-m + 2 * n)


def coroot(root):
    """Coordinates of root^ in the basis (alpha^, beta^)."""
    m, n = root
    norm = inner(root, root)
    x, y = Fraction(2 * m) / norm, Fraction(6 * n) / norm
    if x.denominator != 1 or y.denominator != 1:
        raise ArithmeticError("coroot is not a lattice vector")
    return (int(x), int(y))


def root_name(root):
    m, n = root
    sign = ""
    if (m, n) not in POSITIVE_ROOTS:
        m, n = -m, -n
        sign = "-"
    parts = []
    if m:
        parts.append("a" if m == 1 else f"{m}a")
    if n:
        parts.append("b" if n == 1 else f"{n}b")
    return sign + "+".join(parts)


def parse_root(text):
    text = text.strip().replace(" ", "")
    neg = text.startswith("-")
    if neg:
        text = text[1:]
    m = n = 0
    for term in text.split("+"):
        if not term:
            raise ParseError(f"bad root literal {text!r}")
        if term.endswith("a"):
            m = int(term[:-1]) if term[:-1] else 1
        elif term.endswith("b"):
            n = int(term[:-1]) if term[:-1] else 1
        else:
            raise ParseError(f"bad root term {term!r}")
    root = (-m, -n) if neg else (m, n)
    if not is_root(root):
        raise ParseError(f"{text!r} is not a G2 root")
    return root


def parse_coroot(text):
    """Literals like (3a+2b)^, -(a+b)^ or a raw pair x,y."""
    text = text.strip()
    if "," in text:
        x, y = text.split(",")
        return (int(x), int(y))
    neg = text.startswith("-")
    if neg:
        text = text[1:]
    text = text.strip()
    if text.endswith("^"):
        text = text[:-1]
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    x, y = coroot(parse_root(text))
    return (-x, -y) if neg else (x, y)


def string_p(gamma, delta):
    """Largest i with delta - i*gamma a root."""
    p = 0
    cur = (delta[0] - gamma[0], delta[1] - gamma[1])
    while is_root(cur):
        p += 1
        cur = (cur[0] - gamma[0], cur[1] - gamma[1])
    return p


def extraspecial_pairs():
    """For each non-simple positive root, its extraspecial pair (minimal
    first member in the root order)."""
    out = {}
    for xi in POSITIVE_ROOTS:
        if height(xi) == 1:
            continue
        pairs = []
        for g in POSITIVE_ROOTS:
            d = (xi[0] - g[0], xi[1] - g[1])
            if d in POSITIVE_ROOTS and ROOT_ORDER.index(g) < ROOT_ORDER.index(d):
                pairs.append((g, d))
        pairs.sort(key=lambda p: ROOT_ORDER.index(p[0]))
        out[xi] = pairs[0]
    return out


# ---------------------------------------------------------------------------
# split octonions (Zorn vector matrices) and their derivation algebra
# ---------------------------------------------------------------------------
#
# basis: E1, V1, V2, V3, W1, W2, W3, E2 with torus weights
_ZORN_WEIGHTS = ((0, 0), (1, 0), (-1, 1), (0, -1),
                 (-1, 0), (1, -1), (0, 1), (0, 0))


def _zorn_table():
    """Structure tensor mult[i][j] = coordinates of basis_i * basis_j."""
    def cross(u, v):
        return (u[1] * v[2] - u[2] * v[1],
                u[2] * v[0] - u[0] * v[2],
                u[0] * v[1] - u[1] * v[0])

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    def unpack(c):
        a, b = c[0], c[7]
        v = c[1:4]
        w = c[4:7]
        return a, v, w, b

    def mul(c1, c2):
        a1, v1, w1, b1 = unpack(c1)
        a2, v2, w2, b2 = unpack(c2)
        a = a1 * a2 + dot(v1, w2)
        v = tuple(a1 * v2[i] + b2 * v1[i] - cross(w1, w2)[i] for i in range(3))
        w = tuple(a2 * w1[i] + b1 * w2[i] + cross(v1, v2)[i] for i in range(3))
        b = b1 * b2 + dot(w1, v2)
        return (a,) + v + w + (b,)

    basis = [tuple(Fraction(1 if i == k else 0) for i in range(8))
             for k in range(8)]
    return [[mul(x, y) for y in basis] for x in basis]


_Q = fields.FieldDescriptor.rationals()


def _qmat(rows):
    return Matrix(_Q, [[_Q.element(Fraction(c)) for c in row] for row in rows])


def _derivation_equations(table):
    """Rows of the linear system D(xy) = D(x)y + x D(y) on the 64 entries."""
    rows = []
    for i in range(8):
        for j in range(8):
            prod = table[i][j]
            for r in range(8):
                row = [Fraction(0)] * 64
                # D(x_i x_j)_r = sum_s prod_s D[r][s]
                for s in range(8):
                    row[r * 8 + s] += prod[s]
                # (D(x_i) x_j)_r = sum_s D[s][i] (x_s x_j)_r
                for s in range(8):
                    row[s * 8 + i] -= table[s][j][r]
                for s in range(8):
                    row[s * 8 + j] -= table[i][s][r]
                rows.append(row)
    return rows


def _weight_cell_entries(mu):
    return [(r, c) for r in range(8) for c in range(8)
            if (_ZORN_WEIGHTS[r][0] - _ZORN_WEIGHTS[c][0],
                _ZORN_WEIGHTS[r][1] - _ZORN_WEIGHTS[c][1]) == mu]


def _solve_weight_derivations(eq_rows, mu):
    """Derivations supported on one torus weight cell."""
    entries = _weight_cell_entries(mu)
    if not entries:
        return []
    cols = [r * 8 + c for r, c in entries]
    sub = [[row[c] for c in cols] for row in eq_rows]
    sub = [row for row in sub if any(row)]
    if not sub:
        return []
    null = _qmat(sub).nullspace()
    out = []
    for v in null:
        m = [[Fraction(0)] * 8 for _ in range(8)]
        for (r, c), x in zip(entries, v):
            m[r][c] = x.payload
        out.append(m)
    return out


def _cartan_matrices():
    """The explicit torus derivations diag(1,-1,0) and diag(0,1,-1)."""
    out = []
    for d in ((1, -1, 0), (0, 1, -1)):
        m = [[Fraction(0)] * 8 for _ in range(8)]
        for i in range(3):
            m[1 + i][1 + i] = Fraction(d[i])
            m[4 + i][4 + i] = Fraction(-d[i])
        out.append(m)
    return out


def _mat_mul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(8)) for j in range(8)]
            for i in range(8)]


def _mat_sub(a, b):
    return [[a[i][j] - b[i][j] for j in range(8)] for i in range(8)]


def _mat_scale(a, s):
    return [[a[i][j] * s for j in range(8)] for i in range(8)]


def _bracket(a, b):
    return _mat_sub(_mat_mul(a, b), _mat_mul(b, a))


def _is_zero_mat(a):
    return all(not a[i][j] for i in range(8) for j in range(8))


# bivariate rational polynomials {(i, j): Fraction} for the commutator fit


def _pp_mul(a, b):
    out = {}
    for k1, x in a.items():
        for k2, y in b.items():
            k = (k1[0] + k2[0], k1[1] + k2[1])
            out[k] = out.get(k, Fraction(0)) + x * y
    return {k: v for k, v in out.items() if v}


def _pp_add(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, Fraction(0)) + v
    return {k: v for k, v in out.items() if v}


def _pmat_mul(A, B):
    n = len(A)
    out = [[{} for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for k in range(n):
            if A[i][k]:
                for j in range(n):
                    if B[k][j]:
                        out[i][j] = _pp_add(out[i][j], _pp_mul(A[i][k], B[k][j]))
    return out


def _pmat_exp(M, var_index):
    """exp(x*M) with polynomial entries; M nilpotent rational 8x8."""
    n = 8
    out = [[({} if i != j else {(0, 0): Fraction(1)}) for j in range(n)]
           for i in range(n)]
    power = [[{(0, 0): Fraction(1)} if i == j else {} for j in range(n)]
             for i in range(n)]
    Mp = [[({(1, 0) if var_index == 0 else (0, 1): M[i][j]} if M[i][j] else {})
           for j in range(n)] for i in range(n)]
    k = 1
    fact = 1
    while True:
        power = _pmat_mul(power, Mp)
        if all(not power[i][j] for i in range(n) for j in range(n)):
            break
        fact *= k
        term = [[{kk: v / fact for kk, v in power[i][j].items()}
                 for j in range(n)] for i in range(n)]
        out = [[_pp_add(out[i][j], term[i][j]) for j in range(n)]
               for i in range(n)]
        k += 1
        if k > 10:
            raise RuntimeError("root vector is not nilpotent")
    return out


# ---------------------------------------------------------------------------
# the root system object
# ---------------------------------------------------------------------------


@dataclass
class RootSystemG2:
    convention: dict          # extraspecial sign record, root-name -> +-1
    constants: dict           # (gamma, delta) -> integer N
    commutators: dict         # ordered positive pair -> ((eps, i, j, K), ...)
    rep: dict                 # root -> 8x8 rational matrix (Fraction rows)
    cartan_rep: tuple         # the two Cartan derivation matrices

    def structure_constant(self, gamma, delta):
        return self.constants.get((gamma, delta), 0)

    def commutator_terms(self, gamma, delta):
        return self.commutators[(gamma, delta)]

    def to_json(self):
        return {
            "convention": {k: v for k, v in sorted(self.convention.items())},
            "constants": {f"{root_name(g)},{root_name(d)}": n
                          for (g, d), n in sorted(self.constants.items())},
        }


_SYSTEM_CACHE = {}


def default_convention():
    return {root_name(xi): 1 for xi in POSITIVE_ROOTS if height(xi) > 1}


def generate_structure_constants(convention=None):
    """Build the full constant table for a sign convention on the
    extraspecial pairs; verified inside a faithful representation."""
    conv = default_convention()
    if convention:
        for key, val in convention.items():
            if key not in conv or val not in (1, -1):
                raise InvalidConventionError(
                    f"bad convention entry {key!r}: {val!r}")
            conv[key] = val
    key = tuple(sorted(conv.items()))
    if key in _SYSTEM_CACHE:
        return _SYSTEM_CACHE[key]
    system = _build_system(conv)
    _SYSTEM_CACHE[key] = system
    return system


def _build_system(conv):
    table = _zorn_table()
    eq_rows = _derivation_equations(table)
    h1, h2 = _cartan_matrices()
    for h in (h1, h2):
        col = [sum(eq_rows[r][i * 8 + j] * h[i][j]
                   for i in range(8) for j in range(8))
               for r in range(len(eq_rows))]
        if any(col):
            raise RuntimeError("Cartan candidates are not derivations")
    # root vectors: one-dimensional weight cells of the derivation algebra
    weight_vectors = {}
    for mu in itertools.product(range(-3, 4), repeat=2):
        if mu == (0, 0):
            continue
        ders = _solve_weight_derivations(eq_rows, mu)
        if len(ders) == 1:
            weight_vectors[mu] = ders[0]
        elif len(ders) > 1:
            raise RuntimeError("weight space of dimension > 1")
    if len(weight_vectors) != 12:
        raise RuntimeError(f"expected 12 roots, found {len(weight_vectors)}")
    # identify simple roots combinatorially
    weights = sorted(weight_vectors)
    # choose a positivity functional with no zeroes
    for N in range(3, 20):
        if all(N * mu[0] + mu[1] for mu in weights):
            phi = lambda mu, N=N: N * mu[0] + mu[1]
            break
    pos = [mu for mu in weights if phi(mu) > 0]
    simples = [mu for mu in pos
               if not any((mu[0] - a[0], mu[1] - a[1]) in pos for a in pos)]
    if len(simples) != 2:
        raise RuntimeError("simple root identification failed")

    def in_phi(mu):
        return mu in weight_vectors

    def cartan_number(gamma, delta):
        # <gamma, delta^> = p - q for the delta-string through gamma
        p = 0
        cur = (gamma[0] - delta[0], gamma[1] - delta[1])
        while in_phi(cur):
            p += 1
            cur = (cur[0] - delta[0], cur[1] - delta[1])
        q = 0
        cur = (gamma[0] + delta[0], gamma[1] + delta[1])
        while in_phi(cur):
            q += 1
            cur = (cur[0] + delta[0], cur[1] + delta[1])
        return p - q

    s1, s2 = simples
    if cartan_number(s2, s1) == -3:
        alpha, beta = s1, s2
    elif cartan_number(s1, s2) == -3:
        alpha, beta = s2, s1
    else:
        raise RuntimeError("could not identify the short simple root")
    # coordinates of every weight in the (alpha, beta) basis
    det = alpha[0] * beta[1] - alpha[1] * beta[0]
    root_of = {}
    for mu in weights:
        m = Fraction(mu[0] * beta[1] - mu[1] * beta[0], det)
        n = Fraction(alpha[0] * mu[1] - alpha[1] * mu[0], det)
        if m.denominator != 1 or n.denominator != 1:
            raise RuntimeError("weight outside the root lattice")
        root_of[mu] = (int(m), int(n))
    mu_of = {v: k for k, v in root_of.items()}
    if set(root_of.values()) != set(all_roots()):
        raise RuntimeError("weights do not match the G2 root system")

    evec = {root_of[mu]: weight_vectors[mu] for mu in weights}

    def h_for(root):
        """Cartan element acting on weight mu by <root-coords(mu), root^>."""
        x, y = coroot(root)
        # solve c1*mu1 + c2*mu2 = pairing for the two simples
        a1, a2 = mu_of[(1, 0)], mu_of[(0, 1)]
        tgt1 = Fraction(pairing((1, 0), (x, y)))
        tgt2 = Fraction(pairing((0, 1), (x, y)))
        d = Fraction(a1[0] * a2[1] - a1[1] * a2[0])
        c1 = (tgt1 * a2[1] - tgt2 * a1[1]) / d
        c2 = (tgt2 * a1[0] - tgt1 * a2[0]) / d
        return [[c1 * h1[i][j] + c2 * h2[i][j] for j in range(8)]
                for i in range(8)]

    # normalize [e, f] = h for every positive root
    for g in POSITIVE_ROOTS:
        e, f = evec[g], evec[(-g[0], -g[1])]
        br = _bracket(e, f)
        target = h_for(g)
        ratio = None
        for i in range(8):
            for j in range(8):
                if target[i][j]:
                    ratio = br[i][j] / target[i][j]
                elif br[i][j]:
                    raise RuntimeError("[e,f] not proportional to the coroot")
        if not ratio:
            raise RuntimeError("degenerate root pair")
        for i in range(8):
            for j in range(8):
                if not (_mat_sub(br, _mat_scale(target, ratio)))[i][j] == 0:
                    raise RuntimeError("[e,f] not proportional to the coroot")
        evec[(-g[0], -g[1])] = _mat_scale(f, 1 / ratio)

    # fix extraspecial signs in height order
    espec = extraspecial_pairs()
    for xi in sorted(espec, key=height):
        g, d = espec[xi]
        want = Fraction(conv[root_name(xi)] * (string_p(g, d) + 1))
        br = _bracket(evec[g], evec[d])
        cur = None
        for i in range(8):
            for j in range(8):
                if evec[xi][i][j]:
                    cur = br[i][j] / evec[xi][i][j]
                    break
            if cur is not None:
                break
        if not cur:
            raise RuntimeError("extraspecial bracket vanished")
        scale = cur / want
        evec[xi] = _mat_scale(evec[xi], scale)
        mxi = (-xi[0], -xi[1])
        evec[mxi] = _mat_scale(evec[mxi], 1 / scale)

    # read off all structure constants
    constants = {}
    for g in all_roots():
        for d in all_roots():
            s = (g[0] + d[0], g[1] + d[1])
            if g == d or not is_root(s):
                continue
            br = _bracket(evec[g], evec[d])
            ratio = Fraction(0)
            for i in range(8):
                for j in range(8):
                    if evec[s][i][j]:
                        ratio = br[i][j] / evec[s][i][j]
                        break
                else:
                    continue
                break
            check = _mat_sub(br, _mat_scale(evec[s], ratio))
            if not _is_zero_mat(check):
                raise RuntimeError("bracket not proportional to a root vector")
            if ratio.denominator != 1:
                raise RuntimeError("non-integral structure constant")
            N = int(ratio)
            expected = string_p(g, d) + 1
            if N and abs(N) != expected:
                raise RuntimeError("structure constant magnitude is wrong")
            if N:
                constants[(g, d)] = N

    commutators = _fit_commutators(evec, root_of)
    system = RootSystemG2(conv, constants, commutators,
                          {g: evec[g] for g in all_roots()}, (h1, h2))
    return system


def _fit_commutators(evec, root_of):
    """Commutator relations u_g(c) u_d(s) = u_d(s) u_g(c) * prod of
    corrections, fitted and verified inside the Zorn representation."""
    mu_of = {v: k for k, v in root_of.items()}
    exps = {}
    for g in POSITIVE_ROOTS:
        exps[(g, 0)] = _pmat_exp(evec[g], 0)  # variable c
        exps[(g, 1)] = _pmat_exp(evec[g], 1)  # variable s

    def neg(A, var):
        # substitute the variable by its negative
        out = [[{k: (v if (k[var] % 2 == 0) else -v)
                 for k, v in A[i][j].items()} for j in range(8)]
               for i in range(8)]
        return out

    table = {}
    for g in POSITIVE_ROOTS:
        for d in POSITIVE_ROOTS:
            if g == d:
                continue
            targets = []
            for i in range(1, 5):
                for j in range(1, 5):
                    eps = (i * g[0] + j * d[0], i * g[1] + j * d[1])
                    if eps in POSITIVE_ROOTS:
                        targets.append((height(eps), eps, i, j))
            targets.sort()
            Ug, Ud = exps[(g, 0)], exps[(d, 1)]
            rest = _pmat_mul(_pmat_mul(neg(Ug, 0), neg(Ud, 1)),
                             _pmat_mul(Ug, Ud))
            terms = []
            for _, eps, i, j in targets:
                cell = _weight_cell_entries(mu_of[eps])
                coef = None
                for (r, c) in cell:
                    if evec[eps][r][c]:
                        entry = rest[r][c]
                        coef = {k: v / evec[eps][r][c]
                                for k, v in entry.items()}
                        break
                K = coef.get((i, j), Fraction(0)) if coef else Fraction(0)
                if coef and any(k != (i, j) for k in coef):
                    raise RuntimeError("commutator term is not a monomial")
                if K.denominator != 1:
                    raise RuntimeError("non-integral commutator constant")
                K = int(K)
                if K:
                    terms.append((eps, i, j, K))
                    corr = _exp_monomial(evec[eps], -K, i, j)
                    rest = _pmat_mul(corr, rest)
            ident = all(rest[r][c] == ({(0, 0): Fraction(1)} if r == c else {})
                        for r in range(8) for c in range(8))
            if not ident:
                raise RuntimeError("commutator peeling did not terminate")
            table[(g, d)] = tuple(terms)
    return table


def _exp_monomial(M, K, i, j):
    """exp(K * c^i s^j * M) for nilpotent rational M."""
    n = 8
    out = [[{(0, 0): Fraction(1)} if r == c else {} for c in range(n)]
           for r in range(n)]
    power = [[{(0, 0): Fraction(1)} if r == c else {} for c in range(n)]
             for r in range(n)]
    base = [[({(i, j): Fraction(K) * M[r][c]} if M[r][c] else {})
             for c in range(n)] for r in range(n)]
    k = 1
    fact = 1
    while True:
        power = _pmat_mul(power, base)
        if all(not power[r][c] for r in range(n) for c in range(n)):
            break
        fact *= k
        term = [[{kk: v / fact for kk, v in power[r][c].items()}
                 for c in range(n)] for r in range(n)]
        out = [[_pp_add(out[r][c], term[r][c]) for c in range(n)]
               for r in range(n)]
        k += 1
        if k > 10:
            raise RuntimeError("non-nilpotent correction")
    return out


# ---------------------------------------------------------------------------
# Laurent polynomials in the limit parameter
# ---------------------------------------------------------------------------


class Laurent:
    """Laurent polynomial in the one-parameter subgroup variable, with field
    coefficients."""

    __slots__ = ("field", "terms")

    def __init__(self, field, terms):
        self.field = field
        self.terms = {d: c for d, c in terms.items() if c}

    @staticmethod
    def constant(field, c):
        return Laurent(field, {0: c})

    @staticmethod
    def monomial(field, c, deg):
        return Laurent(field, {deg: c})

    def _lift(self, other):
        if isinstance(other, Laurent):
            return other
        if isinstance(other, int):
            return Laurent.constant(self.field, self.field.from_int(other))
        if isinstance(other, fields.FieldElement):
            return Laurent.constant(self.field, other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for d, c in other.terms.items():
            out[d] = out.get(d, self.field.zero()) + c
        return Laurent(self.field, out)

    __radd__ = __add__

    def __neg__(self):
        return Laurent(self.field, {d: -c for d, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        return self + (-other)

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        out = {}
        for d1, c1 in self.terms.items():
            for d2, c2 in other.terms.items():
                d = d1 + d2
                out[d] = out.get(d, self.field.zero()) + c1 * c2
        return Laurent(self.field, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = Laurent.constant(self.field, self.field.one())
        for _ in range(n):
            out = out * self
        return out

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, Laurent):
            return self.field == other.field and self.terms == other.terms
        return NotImplemented

    def has_negative(self):
        return any(d < 0 for d in self.terms)

    def at_zero(self):
        if self.has_negative():
            raise ArithmeticError("pole at zero")
        return self.terms.get(0, self.field.zero())

    def __repr__(self):
        return f"<laurent {self.terms}>"


# ---------------------------------------------------------------------------
# words in root-group generators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnipotentWord:
    field: fields.FieldDescriptor
    letters: tuple  # of (root, coefficient)

    def literal(self):
        if not self.letters:
            return "1"
        return "*".join(f"u({root_name(r)};{c.literal()})"
                        for r, c in self.letters)

    @staticmethod
    def parse(field, text):
        text = text.strip()
        if text in ("1", ""):
            return UnipotentWord(field, ())
        letters = []
        for part in text.split("*"):
            part = part.strip()
            if not (part.startswith("u(") and part.endswith(")")):
                raise ParseError(f"bad word letter {part!r}")
            body = part[2:-1]
            if ";" not in body:
                raise ParseError(f"letter needs u(root;coeff): {part!r}")
            root_s, coeff_s = body.split(";", 1)
            letters.append((parse_root(root_s),
                            fields.parse_element(field, coeff_s)))
        return UnipotentWord(field, tuple(letters))

    def to_json(self):
        return {"descriptor": str(self.field), "word": self.literal()}


def collect(word, system=None, order=ROOT_ORDER, strategy="leftmost"):
    """Normal form: one letter per root, in the given order.  Positive-root
    support only; collection inserts commutator corrections, which have
    strictly larger height, so the rewriting terminates."""
    system = system or generate_structure_constants()
    letters = [(r, c) for r, c in word.letters]
    for r, _ in letters:
        if r not in POSITIVE_ROOTS:
            raise NonClosedSupportError(
                f"letter {root_name(r)} is not a positive root")
    index = {r: i for i, r in enumerate(order)}
    while True:
        action = None
        rng = range(len(letters) - 1)
        if strategy == "rightmost":
            rng = range(len(letters) - 2, -1, -1)
        for k in rng:
            (r1, c1), (r2, c2) = letters[k], letters[k + 1]
            if r1 == r2:
                action = ("merge", k)
                break
            if index[r1] > index[r2]:
                action = ("swap", k)
                break
        if action is None:
            letters = [(r, c) for r, c in letters if c]
            return UnipotentWord(word.field, tuple(letters))
        kind, k = action
        if kind == "merge":
            (r1, c1), (_, c2) = letters[k], letters[k + 1]
            letters[k: k + 2] = [(r1, c1 + c2)]
            continue
        (g, c), (d, s) = letters[k], letters[k + 1]
        corrections = []
        for eps, i, j, K in system.commutator_terms(g, d):
            corrections.append((eps, K * (c ** i) * (s ** j)))
        letters[k: k + 2] = [(d, s), (g, c)] + corrections


def torus_conjugate(word, coroot_vec):
    """lambda(a) u_g(c) lambda(a)^{-1} = u_g(a^{<g,lambda>} c), with the
    parameter kept as a Laurent coefficient."""
    field = word.field
    letters = []
    for r, c in word.letters:
        if isinstance(c, Laurent):
            coef = c * Laurent.monomial(field, field.one(),
                                        pairing(r, coroot_vec))
        else:
            coef = Laurent.monomial(field, c, pairing(r, coroot_vec))
        letters.append((r, coef))
    return UnipotentWord(field, tuple(letters))


def word_limit(word, coroot_vec, system=None):
    """Limit of the word along the given coroot-lattice cocharacter; None
    when a letter keeps a pole after collection."""
    system = system or generate_structure_constants()
    conj = torus_conjugate(word, coroot_vec)
    collected = collect(conj, system)
    out = []
    for r, c in collected.letters:
        if c.has_negative():
            return None
        v = c.at_zero()
        if v:
            out.append((r, v))
    return UnipotentWord(word.field, tuple(out))


def conjugate_by_letter(word, root, coeff, system=None):
    """u_root(coeff) * word * u_root(-coeff), collected."""
    system = system or generate_structure_constants()
    letters = ((root, coeff),) + word.letters + ((root, -coeff),)
    return collect(UnipotentWord(word.field, letters), system)


# ---------------------------------------------------------------------------
# the unipotent-class figure
# ---------------------------------------------------------------------------

ALPHA, BETA = (1, 0), (0, 1)
AB, A2B = (1, 1), (2, 1)
A3B, A3B2 = (3, 1), (3, 2)

# class representatives (Table rows); words over the field of char p
CLASS_REPS = {
    "G2": ((ALPHA, 1), (BETA, 1)),
    "G2(a1)": ((BETA, 1), (A2B, 1)),
    "(tA1)3": ((BETA, 1), (AB, 1)),       # exists only when p = 3
    "tA1": ((ALPHA, 1),),
    "A1": ((BETA, 1),),
    "1": (),
}

# a dominant regular coroot vector: positive pairing with every positive root
_REGULAR = (3, 5)


def _class_word(field, label):
    return UnipotentWord(field, tuple((r, field.from_int(c))
                                      for r, c in CLASS_REPS[label]))


def figure_edges(p):
    """Replay the recorded destabilization of every positive edge of the
    unipotent-class figure in characteristic p and return the edge list."""
    if p == 0:
        field = fields.FieldDescriptor.rationals()
    else:
        field = fields.FieldDescriptor.finite(p)
    system = generate_structure_constants()
    recipes = [
        ("G2", "tA1", coroot(A3B2), None, ((ALPHA, 1),)),
        ("G2", "A1", coroot(A2B), None, ((BETA, 1),)),
        ("G2", "1", _REGULAR, None, ()),
        ("G2(a1)", "A1", coroot(A2B), None, ((BETA, 1),)),
        ("G2(a1)", "tA1", coroot(BETA), None, ((A2B, 1),)),
        ("G2(a1)", "1", _REGULAR, None, ()),
        ("tA1", "1", _REGULAR, None, ()),
        ("A1", "1", _REGULAR, None, ()),
    ]
    if p == 3:
        recipes += [
            ("(tA1)3", "A1", coroot(A2B), None, ((BETA, 1),)),
            ("(tA1)3", "tA1", tuple(-x for x in coroot(A3B)), None, ((AB, 1),)),
            ("(tA1)3", "1", _REGULAR, None, ()),
        ]
    edges = []
    for src, dst, lam, conj, target in recipes:
        word = _class_word(field, src)
        if conj is not None:
            word = conjugate_by_letter(word, conj[0], field.from_int(conj[1]),
                                       system)
        lim = word_limit(word, lam, system)
        expected = UnipotentWord(field, tuple((r, field.from_int(c))
                                              for r, c in target))
        if lim is None or collect(lim, system).letters != \
                collect(expected, system).letters:
            raise ReplayMismatchError(
                f"edge {src} -> {dst}: limit {lim and lim.literal()} != "
                f"{expected.literal()}")
        edges.append({"from": src, "to": dst,
                      "cocharacter": list(lam),
                      "conjugation": None if conj is None else
                      {"root": root_name(conj[0]), "coeff": conj[1]},
                      "limit": lim.literal()})
    # the conjugation edge out of tA1: the +-3 argument lives or dies with p
    word = _class_word(field, "tA1")
    conjugated = conjugate_by_letter(word, A2B, field.one(), system)
    terms = system.commutator_terms(A2B, ALPHA)
    if len(terms) != 1 or terms[0][0] != A3B or abs(terms[0][3]) != 3:
        raise ReplayMismatchError("the +-3 constant has the wrong shape")
    K = terms[0][3]
    lam = tuple(-x for x in coroot(AB))
    lim = word_limit(conjugated, lam, system)
    if p == 3:
        expected = UnipotentWord(field, ())
        if lim is None or lim.letters != expected.letters:
            raise ReplayMismatchError(
                "characteristic 3: the +-3 argument must vanish")
    else:
        expected = UnipotentWord(field, ((A3B, field.from_int(K)),))
        if lim is None or lim.letters != expected.letters:
            raise ReplayMismatchError(
                f"tA1 -> A1 replay failed: {lim and lim.literal()}")
        edges.append({"from": "tA1", "to": "A1",
                      "cocharacter": list(lam),
                      "conjugation": {"root": root_name(A2B), "coeff": 1},
                      "limit": lim.literal()})
    edges.sort(key=lambda e: (e["from"], e["to"]))
    return edges


def figure_dot(p):
    """DOT rendering of the positive edges; the non-edges rest on centralizer
    arguments from the literature and are annotated as unchecked."""
    edges = figure_edges(p)
    labels = ["G2", "G2(a1)", "tA1", "A1", "1"]
    if p == 3:
        labels.insert(2, "(tA1)3")
    lines = [f"digraph g2_unipotent_p{p} {{"]
    lines.append('  // non-edges (nothing reaches G2(a1) or (tA1)3):')
    lines.append('  // asserted in the literature, not machine-checked')
    for lab in labels:
        lines.append(f'  "{lab}";')
    for e in edges:
        lam = ",".join(str(x) for x in e["cocharacter"])
        lines.append(f'  "{e["from"]}" -> "{e["to"]}" [label="({lam})"];')
    lines.append("}")
    return "\n".join(lines)
