"""Exact dense linear algebra over the supported fields.

Matrices are immutable tuples of tuples of field elements; vectors are plain
tuples.  Everything runs at desk scale (n up to a dozen or so).
"""

from __future__ import annotations

from . import fields
from .errors import DimensionMismatchError, DomainError, NonSquareError
from .poly import Polynomial


def vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(a, s):
    return tuple(x * s for x in a)


def vec_dot(a, b):
    it = iter(zip(a, b))
    try:
        x, y = next(it)
    except StopIteration:
        raise DimensionMismatchError("dot product of empty vectors")
    acc = x * y
    for x, y in it:
        acc = acc + x * y
    return acc


def vec_is_zero(a):
    return all(not x for x in a)


class Echelon:
    """Incremental row echelon; add returns whether the vector was new."""

    __slots__ = ("rows",)

    def __init__(self, vectors=()):
        self.rows = []
        for v in vectors:
            self.add(v)

    def reduce(self, v):
        v = list(v)
        for row, piv in self.rows:
            c = v[piv]
            if c:
                v = [x - c * y for x, y in zip(v, row)]
        return v

    def add(self, v):
        r = self.reduce(v)
        piv = next((i for i, c in enumerate(r) if c), None)
        if piv is None:
            return False
        inv = r[piv].inverse()
        self.rows.append(([x * inv for x in r], piv))
        return True

    def contains(self, v):
        return not any(self.reduce(v))

    @property
    def rank(self):
        return len(self.rows)


class Matrix:
    __slots__ = ("field", "rows")

    def __init__(self, field, rows):
        fixed = []
        width = None
        for row in rows:
            r = tuple(field.from_int(c) if isinstance(c, int) else c
                      for c in row)
            if width is None:
                width = len(r)
            elif len(r) != width:
                raise DimensionMismatchError("ragged rows")
            fixed.append(r)
        self.field = field
        self.rows = tuple(fixed)

    # -- constructors --------------------------------------------------------

    @staticmethod
    def identity(field, n):
        one, zero = field.one(), field.zero()
        return Matrix(field, [[one if i == j else zero for j in range(n)]
                              for i in range(n)])

    @staticmethod
    def zeros(field, n, m=None):
        zero = field.zero()
        m = n if m is None else m
        return Matrix(field, [[zero] * m for _ in range(n)])

    @staticmethod
    def companion(p):
        """Companion matrix of a monic polynomial."""
        p = p.monic()
        n = p.degree
        if n < 1:
            raise DomainError("companion matrix needs degree >= 1")
        field = p.field
        zero = field.zero()
        rows = [[zero] * n for _ in range(n)]
        for i in range(1, n):
            rows[i][i - 1] = field.one()
        for i in range(n):
            rows[i][n - 1] = -p[i]
        return Matrix(field, rows)

    @staticmethod
    def block_diag(field, blocks):
        n = sum(b.nrows for b in blocks)
        zero = field.zero()
        rows = [[zero] * n for _ in range(n)]
        off = 0
        for b in blocks:
            for i in range(b.nrows):
                for j in range(b.ncols):
                    rows[off + i][off + j] = b.rows[i][j]
            off += b.nrows
        return Matrix(field, rows)

    @staticmethod
    def from_columns(field, cols):
        return Matrix(field, [[cols[j][i] for j in range(len(cols))]
                              for i in range(len(cols[0]))])

    # -- shape / access --------------------------------------------------------

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def ncols(self):
        return len(self.rows[0]) if self.rows else 0

    def __getitem__(self, i):
        return self.rows[i]

    def is_square(self):
        return self.nrows == self.ncols

    def column(self, j):
        return tuple(row[j] for row in self.rows)

    def columns(self):
        return [self.column(j) for j in range(self.ncols)]

    # -- arithmetic ------------------------------------------------------------

    def __add__(self, other):
        return Matrix(self.field, [vec_add(r, s)
                                   for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return Matrix(self.field, [vec_sub(r, s)
                                   for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return Matrix(self.field, [[-c for c in row] for row in self.rows])

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise DimensionMismatchError(
                    f"{self.nrows}x{self.ncols} times {other.nrows}x{other.ncols}")
            bt = other.columns()
            return Matrix(self.field,
                          [[vec_dot(row, col) for col in bt]
                           for row in self.rows])
        if isinstance(other, (int, fields.FieldElement)):
            s = (self.field.from_int(other) if isinstance(other, int)
                 else other)
            return Matrix(self.field, [[c * s for c in row]
                                       for row in self.rows])
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, fields.FieldElement)):
            return self * other
        return NotImplemented

    def mul_vec(self, v):
        if len(v) != self.ncols:
            raise DimensionMismatchError("matrix-vector size mismatch")
        return tuple(vec_dot(row, v) for row in self.rows)

    def transpose(self):
        return Matrix(self.field, [self.column(j) for j in range(self.ncols)])

    def trace(self):
        acc = self.field.zero()
        for i in range(self.nrows):
            acc = acc + self.rows[i][i]
        return acc

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field == other.field and self.rows == other.rows

    def __hash__(self):
        return hash((self.field, self.rows))

    def map(self, fn, new_field):
        return Matrix(new_field, [[fn(c) for c in row] for row in self.rows])

    # -- elimination -----------------------------------------------------------

    def rref(self):
        """Reduced row echelon form; returns (Matrix, pivot column list)."""
        rows = [list(r) for r in self.rows]
        nr, nc = self.nrows, self.ncols
        pivots = []
        r = 0
        for c in range(nc):
            piv = None
            for i in range(r, nr):
                if rows[i][c]:
                    piv = i
                    break
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            inv = rows[r][c].inverse()
            rows[r] = [x * inv for x in rows[r]]
            for i in range(nr):
                if i != r and rows[i][c]:
                    m = rows[i][c]
                    rows[i] = [x - m * y for x, y in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == nr:
                break
        return Matrix(self.field, rows), pivots

    def rank(self):
        return len(self.rref()[1])

    def nullspace(self):
        """Basis of the right kernel, as vectors."""
        R, pivots = self.rref()
        nc = self.ncols
        free = [c for c in range(nc) if c not in pivots]
        basis = []
        zero, one = self.field.zero(), self.field.one()
        for fcol in free:
            v = [zero] * nc
            v[fcol] = one
            for r, pcol in enumerate(pivots):
                v[pcol] = -R.rows[r][fcol]
            basis.append(tuple(v))
        return basis

    def solve(self, b):
        """One solution of self * x = b, or None."""
        nr, nc = self.nrows, self.ncols
        aug = Matrix(self.field,
                     [list(self.rows[i]) + [b[i]] for i in range(nr)])
        R, pivots = aug.rref()
        if nc in pivots:
            return None
        zero = self.field.zero()
        x = [zero] * nc
        for r, pcol in enumerate(pivots):
            x[pcol] = R.rows[r][nc]
        return tuple(x)

    def det(self):
        if not self.is_square():
            raise NonSquareError("determinant of a non-square matrix")
        rows = [list(r) for r in self.rows]
        n = self.nrows
        acc = self.field.one()
        for c in range(n):
            piv = None
            for i in range(c, n):
                if rows[i][c]:
                    piv = i
                    break
            if piv is None:
                return self.field.zero()
            if piv != c:
                rows[c], rows[piv] = rows[piv], rows[c]
                acc = -acc
            acc = acc * rows[c][c]
            inv = rows[c][c].inverse()
            for i in range(c + 1, n):
                if rows[i][c]:
                    m = rows[i][c] * inv
                    rows[i] = [x - m * y for x, y in zip(rows[i], rows[c])]
        return acc

    def is_invertible(self):
        return self.is_square() and bool(self.det())

    def inverse(self):
        if not self.is_square():
            raise NonSquareError("inverse of a non-square matrix")
        n = self.nrows
        ident = Matrix.identity(self.field, n)
        aug = Matrix(self.field,
                     [list(self.rows[i]) + list(ident.rows[i])
                      for i in range(n)])
        R, pivots = aug.rref()
        if pivots != list(range(n)):
            raise DomainError("matrix is singular")
        return Matrix(self.field, [row[n:] for row in R.rows])

    # -- characteristic polynomial (Berkowitz, division-free) -------------------

    def charpoly(self):
        if not self.is_square():
            raise NonSquareError("characteristic polynomial needs a square matrix")
        f = self.field
        n = self.nrows
        prev = [f.one()]
        for k in range(1, n + 1):
            a = self.rows[k - 1][k - 1]
            R = self.rows[k - 1][: k - 1]
            C = [self.rows[i][k - 1] for i in range(k - 1)]
            M = [row[: k - 1] for row in self.rows[: k - 1]]
            t = [f.one(), -a]
            v = C
            for i in range(2, k + 1):
                t.append(-vec_dot(R, v) if R else f.zero())
                if i < k and M:
                    v = [vec_dot(row, v) for row in M]
            new = []
            for j in range(k + 1):
                s = f.zero()
                for i in range(max(0, j - len(prev) + 1), min(j, k) + 1):
                    s = s + t[i] * prev[j - i]
                new.append(s)
            prev = new
        return Polynomial(f, list(reversed(prev)))

    # -- formatting --------------------------------------------------------------

    def __repr__(self):
        body = "; ".join(",".join(c.literal() for c in row)
                         for row in self.rows)
        return f"<matrix [{body}] over {self.field}>"

    def to_json(self):
        return {"descriptor": str(self.field),
                "rows": [[c.literal() for c in row] for row in self.rows]}

    @staticmethod
    def from_json(obj):
        field = fields.parse_descriptor(obj["descriptor"])
        return Matrix(field, [[fields.parse_element(field, c) for c in row]
                              for row in obj["rows"]])
