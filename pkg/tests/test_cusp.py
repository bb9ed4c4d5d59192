import random

from cuspsheaves.cusp import (CuspRingContext, conductor_embed, in_subring, mideal_membership,
                              quotient_class, random_series, random_subring_element)
from cuspsheaves.field import Field

from conftest import series


def test_in_subring(ctx):
    assert in_subring(series(ctx, 1, 0, 1))
    assert not in_subring(ctx.t())
    assert in_subring(ctx.zero())


def test_quotient_class(ctx):
    assert quotient_class(ctx.t()) == 1
    assert quotient_class(series(ctx, 1, 0, 5)) == 0
    assert quotient_class(series(ctx, 0, 3, 0, 1)) == 3


def test_mideal(ctx):
    assert mideal_membership(series(ctx, 0, 0, 1, 0, 0, 1))
    assert not mideal_membership(ctx.one())
    assert not mideal_membership(ctx.t())


def test_ring_and_conductor_properties():
    for F in (Field.Q(), Field.GF(5)):
        ctx = CuspRingContext(F, 10)
        rng = random.Random(f"cusp:{F}")
        for _ in range(100):
            f, g = random_subring_element(ctx, rng), random_subring_element(ctx, rng)
            assert in_subring(f + g) and in_subring(f * g)
            x, y = random_series(ctx, rng), random_series(ctx, rng)
            c = F.random(rng)
            assert quotient_class(x + y * c) == quotient_class(x) + c * quotient_class(y)
            assert (quotient_class(x) == 0) == in_subring(x)
            m = conductor_embed(x)
            assert mideal_membership(m) and quotient_class(m * y) == 0
            # x -> t^2 x is R-linear and injective below the truncation
            assert conductor_embed(f * x) == f * conductor_embed(x)
            assert m.shift_down(2) == x.truncate(ctx.precision - 2).with_precision(ctx.precision - 2)
