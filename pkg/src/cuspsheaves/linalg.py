"""Dense exact linear algebra over a :class:`~cuspsheaves.field.Field`."""
from __future__ import annotations

from .errors import InvariantError, MathPreconditionError
from .field import Field


def rref(rows, field: Field, ncols: int | None = None):
    """Reduced row echelon form.  Returns (rows, pivot_columns)."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = field.one / m[r][c]
        m[r] = [x * inv for x in m[r]]
        pr = m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], pr)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


class Echelon:
    """Incrementally maintained row-echelon basis of a subspace of k^n.

    ``add`` reduces a vector against the basis and keeps it if it is new;
    rows are stored fully reduced on their pivots so membership is a single
    sweep.
    """

    def __init__(self, field: Field, n: int):
        self.field = field
        self.n = n
        self.rows = {}  # pivot column -> row with 1 at pivot

    def __len__(self):
        return len(self.rows)

    def reduce(self, v):
        v = list(v)
        for c, row in self.rows.items():
            x = v[c]
            if x:
                for j in range(self.n):
                    y = row[j]
                    if y:
                        v[j] -= x * y
        return v

    def add(self, v) -> bool:
        v = self.reduce(v)
        for c in range(self.n):
            if v[c]:
                inv = self.field.one / v[c]
                v = [x * inv for x in v]
                for pc, row in self.rows.items():
                    x = row[c]
                    if x:
                        self.rows[pc] = [a - x * b for a, b in zip(row, v)]
                self.rows[c] = v
                return True
        return False

    def contains(self, v) -> bool:
        return not any(self.reduce(v))


def rank_of(rows, field: Field) -> int:
    return len(rref(rows, field)[0])


class KMatrix:
    """Immutable rectangular matrix over k."""

    __slots__ = ("entries", "field", "nrows", "ncols")

    def __init__(self, entries, field: Field, ncols: int | None = None):
        rows = tuple(tuple(field(x) for x in r) for r in entries)
        if rows:
            widths = {len(r) for r in rows}
            if len(widths) != 1:
                raise InvariantError("ragged matrix rows")
            nc = widths.pop()
            if ncols is not None and ncols != nc:
                raise InvariantError(f"expected {ncols} columns, got {nc}")
        else:
            nc = ncols or 0
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "nrows", len(rows))
        object.__setattr__(self, "ncols", nc)

    def __setattr__(self, name, value):
        raise AttributeError("KMatrix is immutable")

    @classmethod
    def zeros(cls, field: Field, n: int, m: int) -> "KMatrix":
        return cls([[0] * m for _ in range(n)], field, ncols=m)

    @classmethod
    def identity(cls, field: Field, n: int) -> "KMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], field, ncols=n)

    @classmethod
    def from_columns(cls, cols, field: Field, nrows: int) -> "KMatrix":
        cols = [list(c) for c in cols]
        return cls([[c[i] for c in cols] for i in range(nrows)], field, ncols=len(cols))

    @property
    def dims(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i):
        return self.entries[i]

    def col(self, j):
        return tuple(r[j] for r in self.entries)

    def columns(self):
        return [self.col(j) for j in range(self.ncols)]

    def transpose(self) -> "KMatrix":
        return KMatrix.from_columns(self.entries, self.field, self.ncols)

    def __matmul__(self, other: "KMatrix") -> "KMatrix":
        if self.ncols != other.nrows:
            raise InvariantError(f"shape mismatch {self.dims} @ {other.dims}")
        zero = self.field.zero
        cols = other.columns()
        out = []
        for r in self.entries:
            row = []
            for c in cols:
                s = zero
                for a, b in zip(r, c):
                    if a and b:
                        s += a * b
                row.append(s)
            out.append(row)
        return KMatrix(out, self.field, ncols=other.ncols)

    def __add__(self, other: "KMatrix") -> "KMatrix":
        if self.dims != other.dims:
            raise InvariantError("shape mismatch in addition")
        return KMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)],
                       self.field, ncols=self.ncols)

    def __sub__(self, other: "KMatrix") -> "KMatrix":
        return self + other.scale(-1)

    def scale(self, c) -> "KMatrix":
        c = self.field(c)
        return KMatrix([[a * c for a in r] for r in self.entries], self.field, ncols=self.ncols)

    def apply(self, v):
        return tuple(sum((a * x for a, x in zip(r, v)), self.field.zero) for r in self.entries)

    def vstack(self, other: "KMatrix") -> "KMatrix":
        if self.ncols != other.ncols:
            raise InvariantError("vstack needs equal column counts")
        return KMatrix(self.entries + other.entries, self.field, ncols=self.ncols)

    def hstack(self, other: "KMatrix") -> "KMatrix":
        if self.nrows != other.nrows:
            raise InvariantError("hstack needs equal row counts")
        return KMatrix([a + b for a, b in zip(self.entries, other.entries)], self.field,
                       ncols=self.ncols + other.ncols)

    def block_diag(self, other: "KMatrix") -> "KMatrix":
        z1 = KMatrix.zeros(self.field, self.nrows, other.ncols)
        z2 = KMatrix.zeros(self.field, other.nrows, self.ncols)
        return self.hstack(z1).vstack(z2.hstack(other))

    def submatrix(self, rows, cols) -> "KMatrix":
        return KMatrix([[self.entries[i][j] for j in cols] for i in rows], self.field,
                       ncols=len(cols))

    def rank(self) -> int:
        return len(rref(self.entries, self.field, self.ncols)[0])

    def rref(self) -> "KMatrix":
        rows, _ = rref(self.entries, self.field, self.ncols)
        rows += [[self.field.zero] * self.ncols] * (self.nrows - len(rows))
        return KMatrix(rows, self.field, ncols=self.ncols)

    def column_echelon(self) -> "KMatrix":
        """Reduced column-echelon basis of the column span (rank columns)."""
        rows, _ = rref(self.transpose().entries, self.field, self.nrows)
        return KMatrix.from_columns(rows, self.field, self.nrows)

    def kernel(self):
        return kernel_basis(self)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.entries)

    def det(self):
        if self.nrows != self.ncols:
            raise InvariantError("determinant of a non-square matrix")
        m = [list(r) for r in self.entries]
        n = self.nrows
        d = self.field.one
        for c in range(n):
            piv = next((i for i in range(c, n) if m[i][c]), None)
            if piv is None:
                return self.field.zero
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                d = -d
            d *= m[c][c]
            inv = self.field.one / m[c][c]
            for i in range(c + 1, n):
                if m[i][c]:
                    f = m[i][c] * inv
                    m[i] = [x - f * y for x, y in zip(m[i], m[c])]
        return d

    def inverse(self) -> "KMatrix":
        n = self.nrows
        if n != self.ncols:
            raise InvariantError("inverse of a non-square matrix")
        aug = [list(r) + [self.field.one if i == j else self.field.zero for j in range(n)]
               for i, r in enumerate(self.entries)]
        rows, piv = rref(aug, self.field, 2 * n)
        if piv[:n] != list(range(n)) or len(rows) < n:
            raise MathPreconditionError("matrix is singular")
        return KMatrix([r[n:] for r in rows], self.field, ncols=n)

    def solve(self, rhs: "KMatrix"):
        """A particular X with self @ X == rhs, or None when inconsistent."""
        n, m = self.dims
        aug = [list(a) + list(b) for a, b in zip(self.entries, rhs.entries)]
        rows, piv = rref(aug, self.field, m + rhs.ncols)
        if any(p >= m for p in piv):
            return None
        X = [[self.field.zero] * rhs.ncols for _ in range(m)]
        for r, p in zip(rows, piv):
            X[p] = list(r[m:])
        return KMatrix(X, self.field, ncols=rhs.ncols)

    def __eq__(self, other):
        if not isinstance(other, KMatrix):
            return NotImplemented
        return self.dims == other.dims and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.entries)
        return f"KMatrix[{self.nrows}x{self.ncols}]({body})"


def kernel_basis(M: KMatrix):
    """Basis of the right null space, one tuple per vector."""
    rows, piv = rref(M.entries, M.field, M.ncols)
    free = [c for c in range(M.ncols) if c not in piv]
    basis = []
    for f in free:
        v = [M.field.zero] * M.ncols
        v[f] = M.field.one
        for r, p in zip(rows, piv):
            v[p] = -r[f]
        basis.append(tuple(v))
    return basis


def left_kernel(M: KMatrix) -> KMatrix:
    """Matrix whose rows span {y : y @ M == 0}."""
    vecs = kernel_basis(M.transpose())
    return KMatrix(vecs, M.field, ncols=M.nrows)


def complete_basis(vectors, field: Field, n: int):
    """Standard basis vectors, scanned in index order, completing ``vectors``."""
    ech = Echelon(field, n)
    for v in vectors:
        if not ech.add(v):
            raise InvariantError("vectors to complete are not independent")
    extra = []
    for i in range(n):
        e = [field.zero] * n
        e[i] = field.one
        if ech.add(e):
            extra.append(tuple(e))
    return extra
