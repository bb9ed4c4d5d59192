import pytest

from cuspsheaves.cusp import CuspRingContext
from cuspsheaves.field import Field
from cuspsheaves.lattice import Lattice

Q = Field.Q()
F7 = Field.GF(7)


def series(ctx, *coeffs):
    return ctx.series(list(coeffs))


def lattice(ctx, gens):
    """gens[j][i] is the coefficient list of entry i of generator j."""
    return Lattice.from_coeffs(ctx, gens)


@pytest.fixture
def ctx():
    return CuspRingContext(Q, 12)


@pytest.fixture(params=["q", "fp:7", "fp:101"])
def any_field(request):
    return Field.from_flag(request.param)
