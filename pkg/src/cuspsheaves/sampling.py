"""Seeded random instances for property tests, the oracles and selftest."""
from __future__ import annotations

import random

from .cusp import CuspRingContext, random_series, random_subring_element
from .errors import MathPreconditionError
from .field import Field
from .lattice import Lattice
from .linalg import KMatrix
from .series import PSeries

# every sampled lattice must stay exact down to this precision
MIN_SAMPLE_PRECISION = 8


def instance_rng(seed, label: str, index: int) -> random.Random:
    return random.Random(f"{seed}:{label}:{index}")


def random_lattice(rng, ctx: CuspRingContext, r: int | None = None,
                   ngens: int | None = None, max_delta: int | None = None) -> Lattice:
    """Random full-rank lattice with entry valuations in [0, 4].

    The generator count ranges over r..2r so that every stratum (a, b)
    with a + b = r is reachable.  Samples whose minimal minor valuation
    exceeds ``max_delta`` are redrawn, which keeps the module exact at
    every precision >= MIN_SAMPLE_PRECISION.
    """
    if max_delta is None:
        max_delta = MIN_SAMPLE_PRECISION - 3
    r = r or rng.randint(1, 4)
    while True:
        m = ngens or rng.randint(r, 2 * r)
        gens = []
        for _ in range(m):
            gens.append(tuple(random_series(ctx, rng, valuation=rng.randint(0, 4),
                                            length=rng.randint(1, 3))
                              for _ in range(r)))
        M = Lattice(r, tuple(gens), ctx)
        try:
            if M.structure.delta <= max_delta:
                return M
        except MathPreconditionError:
            pass


def random_kmatrix(rng, field: Field, n: int, m: int) -> KMatrix:
    return KMatrix([[field.random(rng) for _ in range(m)] for _ in range(n)], field, ncols=m)


def random_invertible(rng, field: Field, n: int) -> KMatrix:
    while True:
        A = random_kmatrix(rng, field, n, n)
        if A.rank() == n:
            return A


def random_low_rank(rng, field: Field, n: int, m: int, rank: int) -> KMatrix:
    if rank == 0:
        return KMatrix.zeros(field, n, m)
    return random_kmatrix(rng, field, n, rank) @ random_kmatrix(rng, field, rank, m)


def random_series_matrix(rng, ctx: CuspRingContext, n: int, m: int, min_val: int = 0):
    return tuple(tuple(random_series(ctx, rng, valuation=min_val + rng.randint(0, 2),
                                     length=rng.randint(1, 3))
                       if rng.random() < 0.7 else ctx.zero()
                       for _ in range(m)) for _ in range(n))


def random_unit_matrix(rng, ctx: CuspRingContext, r: int):
    """Random element of GL_r(R-bar): invertible constant part plus a tail."""
    A = random_invertible(rng, ctx.field, r)
    tail = random_series_matrix(rng, ctx, r, r, min_val=1)
    return tuple(tuple(PSeries.constant(ctx.field, ctx.precision, A[i, j]) + tail[i][j]
                       for j in range(r)) for i in range(r))


def transform_generators(rng, M: Lattice) -> Lattice:
    """Apply one random module-preserving or ambient change to the generators."""
    ctx = M.ctx
    gens = list(M.generators)
    kind = rng.choice(["permute", "unit", "add", "ambient"])
    if kind == "permute":
        rng.shuffle(gens)
    elif kind == "unit":
        j = rng.randrange(len(gens))
        u = random_subring_element(ctx, rng, unit=True)
        gens[j] = tuple(x * u for x in gens[j])
    elif kind == "add":
        if len(gens) > 1:
            i, j = rng.sample(range(len(gens)), 2)
            c = random_subring_element(ctx, rng)
            gens[i] = tuple(x + y * c for x, y in zip(gens[i], gens[j]))
    else:
        U = random_unit_matrix(rng, ctx, M.rank)
        gens = [tuple(sum((U[i][k] * g[k] for k in range(1, M.rank)), U[i][0] * g[0])
                      for i in range(M.rank)) for g in gens]
    return Lattice(M.rank, tuple(gens), ctx)
