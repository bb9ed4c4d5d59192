"""The local ring of an ordinary cusp, presented analytically.

R = k + t^2 k[[t]] sits inside its normalization k[[t]]; the quotient is
one-dimensional and spanned by the class of t.  The maximal ideal of R is
the set of series of valuation at least two, which is also t^2 k[[t]].
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InvariantError
from .field import Field
from .series import PSeries

DEFAULT_PRECISION = 12


@dataclass(frozen=True)
class CuspRingContext:
    field: Field
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if self.precision < 2:
            raise InvariantError("precision must be at least 2 to see the cusp")

    def series(self, coeffs) -> PSeries:
        return PSeries(coeffs, self.field, self.precision)

    def zero(self) -> PSeries:
        return PSeries.zero(self.field, self.precision)

    def one(self) -> PSeries:
        return PSeries.one(self.field, self.precision)

    def t(self, k: int = 1, c=1) -> PSeries:
        return PSeries.monomial(self.field, self.precision, k, c)

    def with_precision(self, N: int) -> "CuspRingContext":
        return CuspRingContext(self.field, N)

    def subring_basis(self):
        """Exponents spanning R modulo t^(N+1): 0, 2, 3, ..., N."""
        return [0] + list(range(2, self.precision + 1))


def in_subring(f: PSeries) -> bool:
    return not f[1]


def quotient_class(f: PSeries):
    """Coordinate of the class of f in R-bar/R with respect to the class of t."""
    return f[1]


def mideal_membership(f: PSeries) -> bool:
    return f.valuation() >= 2


def conductor_embed(x: PSeries) -> PSeries:
    """The R-linear bijection R-bar -> m, x |-> t^2 x."""
    return x.shift(2)


def random_subring_element(ctx: CuspRingContext, rng, unit: bool = False) -> PSeries:
    """Random element of R; ``unit`` forces a nonzero constant term."""
    F = ctx.field
    c0 = F.random_nonzero(rng) if unit else F.random(rng)
    cs = [c0, F.zero] + [F.random(rng) if rng.random() < 0.5 else F.zero
                         for _ in range(2, min(ctx.precision, 5) + 1)]
    return ctx.series(cs)


def random_series(ctx: CuspRingContext, rng, valuation: int = 0, length: int = 4) -> PSeries:
    """Random polynomial series with exact valuation ``valuation``."""
    F = ctx.field
    cs = [F.zero] * valuation + [F.random_nonzero(rng)]
    cs += [F.random(rng) for _ in range(length - 1)]
    return ctx.series(cs[: ctx.precision + 1])
