"""Truncated power series k[[t]]/(t^(N+1)).

Arithmetic in the quotient ring is exact; products simply drop every
exponent above ``N``.  Division by a power of ``t`` is the one place where
coefficients become unknown, and :meth:`PSeries.shift_down` makes that
explicit by shrinking the precision.
"""
from __future__ import annotations

import math

from .errors import NonUnitError, PrecisionMismatch
from .field import Field

INF = math.inf


class PSeries:
    """Immutable truncated series with coefficients ``c_0 .. c_N``."""

    __slots__ = ("coeffs", "field")

    def __init__(self, coeffs, field: Field, precision: int | None = None):
        cs = [field(c) for c in coeffs]
        if precision is not None:
            if precision < 0:
                raise PrecisionMismatch("precision must be non-negative")
            if len(cs) > precision + 1:
                # truncation is exact in k[[t]]/(t^(N+1))
                cs = cs[: precision + 1]
            cs += [field.zero] * (precision + 1 - len(cs))
        if not cs:
            raise PrecisionMismatch("a series needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "field", field)

    @classmethod
    def _raw(cls, coeffs: tuple, field: Field) -> "PSeries":
        # trusted constructor: coefficients already lie in the field
        s = object.__new__(cls)
        object.__setattr__(s, "coeffs", coeffs)
        object.__setattr__(s, "field", field)
        return s

    def __setattr__(self, name, value):
        raise AttributeError("PSeries is immutable")

    # constructors -----------------------------------------------------

    @classmethod
    def zero(cls, field: Field, N: int) -> "PSeries":
        return cls._raw((field.zero,) * (N + 1), field)

    @classmethod
    def one(cls, field: Field, N: int) -> "PSeries":
        return cls.monomial(field, N, 0)

    @classmethod
    def monomial(cls, field: Field, N: int, k: int, c=1) -> "PSeries":
        cs = [field.zero] * (N + 1)
        if k <= N:
            cs[k] = field(c)
        return cls._raw(tuple(cs), field)

    @classmethod
    def constant(cls, field: Field, N: int, c) -> "PSeries":
        return cls.monomial(field, N, 0, c)

    # basic accessors --------------------------------------------------

    @property
    def precision(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i: int):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        if i < 0:
            raise IndexError(i)
        return self.field.zero

    def valuation(self):
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return INF

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_unit(self) -> bool:
        return bool(self.coeffs[0])

    def degree(self) -> int:
        """Largest exponent with a nonzero coefficient (-1 for zero)."""
        for i in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[i]:
                return i
        return -1

    # arithmetic ------------------------------------------------------

    def _check(self, other: "PSeries"):
        if not isinstance(other, PSeries):
            raise TypeError(f"expected PSeries, got {type(other).__name__}")
        if len(other.coeffs) != len(self.coeffs):
            raise PrecisionMismatch(
                f"precision {self.precision} vs {other.precision}")
        if other.field != self.field:
            raise PrecisionMismatch(f"field {self.field} vs {other.field}")

    def __add__(self, other):
        if not isinstance(other, PSeries):
            return self + self._lift(other)
        self._check(other)
        return PSeries._raw(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.field)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, PSeries):
            return self - self._lift(other)
        self._check(other)
        return PSeries._raw(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)), self.field)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return PSeries._raw(tuple(-a for a in self.coeffs), self.field)

    def __mul__(self, other):
        if not isinstance(other, PSeries):
            c = self.field(other)
            return PSeries._raw(tuple(a * c for a in self.coeffs), self.field)
        self._check(other)
        a, b = self.coeffs, other.coeffs
        n = len(a)
        zero = self.field.zero
        out = [zero] * n
        for i in range(n):
            ai = a[i]
            if not ai:
                continue
            for j in range(n - i):
                bj = b[j]
                if bj:
                    out[i + j] += ai * bj
        return PSeries._raw(tuple(out), self.field)

    __rmul__ = __mul__

    def _lift(self, c) -> "PSeries":
        return PSeries.constant(self.field, self.precision, c)

    def scale(self, c) -> "PSeries":
        return self * c

    def invert(self) -> "PSeries":
        """Inverse of a unit (nonzero constant term)."""
        a = self.coeffs
        if not a[0]:
            raise NonUnitError(f"series of valuation {self.valuation()} is not a unit")
        n = len(a)
        inv0 = self.field.one / a[0]
        out = [inv0]
        for k in range(1, n):
            s = self.field.zero
            for j in range(1, k + 1):
                if a[j]:
                    s += a[j] * out[k - j]
            out.append(-s * inv0)
        return PSeries._raw(tuple(out), self.field)

    def shift(self, k: int) -> "PSeries":
        """Multiply by t^k (k >= 0), truncating."""
        n = len(self.coeffs)
        if k >= n:
            return PSeries.zero(self.field, n - 1)
        return PSeries._raw((self.field.zero,) * k + self.coeffs[: n - k], self.field)

    def shift_down(self, k: int) -> "PSeries":
        """Divide by t^k.  The result has precision ``N - k``."""
        if k > self.precision:
            raise NonUnitError("cannot divide away the whole precision")
        if any(self.coeffs[:k]):
            raise NonUnitError(f"series of valuation {self.valuation()} not divisible by t^{k}")
        return PSeries._raw(self.coeffs[k:], self.field)

    def with_precision(self, N: int) -> "PSeries":
        """Truncate, or pad with zeros (generators are read as polynomials)."""
        n = len(self.coeffs)
        if N + 1 <= n:
            return PSeries._raw(self.coeffs[: N + 1], self.field)
        return PSeries._raw(self.coeffs + (self.field.zero,) * (N + 1 - n), self.field)

    def truncate(self, k: int) -> "PSeries":
        """Zero every coefficient of exponent >= k, keeping the precision."""
        n = len(self.coeffs)
        if k >= n:
            return self
        return PSeries._raw(self.coeffs[:k] + (self.field.zero,) * (n - k), self.field)

    # comparison / display ---------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, PSeries):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.field))

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*t")
            else:
                terms.append(f"{c}*t^{i}")
        body = " + ".join(terms) if terms else "0"
        return f"PSeries({body}; N={self.precision})"


def ps_arith(f: PSeries, g: PSeries, op: str) -> PSeries:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown op {op!r}")


def ps_invert(f: PSeries) -> PSeries:
    return f.invert()


# vectors and matrices of series --------------------------------------

def vec_add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(c, v):
    """Multiply a series vector by a series or scalar ``c``."""
    return tuple(x * c for x in v)


def vec_valuation(v):
    return min((x.valuation() for x in v), default=INF)


def smat_apply(M, v):
    """Series matrix (list of rows) times series vector."""
    out = []
    for row in M:
        acc = None
        for a, x in zip(row, v):
            term = a * x
            acc = term if acc is None else acc + term
        out.append(acc)
    return tuple(out)


def smat_mul(M, P):
    cols = list(zip(*P))
    return [[smat_apply([row], c)[0] for c in cols] for row in M]


def kmat_apply(K, v, field, N):
    """Constant matrix (rows of scalars) applied to a series vector."""
    out = []
    for row in K:
        acc = [field.zero] * (N + 1)
        for c, x in zip(row, v):
            if c:
                xc = x.coeffs
                for i in range(N + 1):
                    if xc[i]:
                        acc[i] += c * xc[i]
        out.append(PSeries._raw(tuple(acc), field))
    return tuple(out)
