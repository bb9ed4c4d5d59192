import random

import pytest

from cuspsheaves.cusp import CuspRingContext
from cuspsheaves.errors import ContractViolation, InvariantError, TorsionError
from cuspsheaves.extension import PhiMap, pushout
from cuspsheaves.field import Field
from cuspsheaves.lattice import contains, decompose
from cuspsheaves.linalg import KMatrix
from cuspsheaves.sampling import instance_rng, random_invertible, random_lattice
from cuspsheaves.triples import (BundleData, CuspTriple, LatticeMorphism, SheafModel, Triple,
                                 TripleMorphism, compose_triple_morphisms, cusp_morphism_data,
                                 degree_ledger, from_triple, functor_on_morphism, jet_block,
                                 model_from_lattices, morphism_from_triple, random_morphism,
                                 random_triple, roundtrip_object, strip_series, to_triple)

from conftest import Q, lattice


def model(A, B, d=0):
    p = PhiMap.from_lists(Q, A, B)
    return SheafModel(p.r, d, (p,))


def test_degree_examples():
    assert degree_ledger(1, 0, [1]) == 0
    assert degree_ledger(2, 5, [1]) == 4
    assert degree_ledger(1, 0, [0]) == -1
    assert degree_ledger(2, 5, [1], theorem=True) == 2
    assert degree_ledger(2, 3, [1, 2]) == 2
    with pytest.raises(InvariantError):
        degree_ledger(1, 0, [2])


def test_to_triple_examples():
    T = to_triple(model([[1]], [[0]]))
    assert T.cusps[0].V == KMatrix([[1], [0]], Q) and T.cusps[0].sigma == KMatrix([[1]], Q)
    p0 = PhiMap(0, 1, KMatrix([[]], Q, ncols=0), KMatrix([[]], Q, ncols=0))
    T0 = to_triple(SheafModel(1, 0, (p0,)))
    assert T0.cusps[0].a == 0 and T0.cusps[0].sigma.dims == (0, 0)
    T = to_triple(model([[1]], [[1]]))
    assert T.cusps[0].V == KMatrix([[1], [1]], Q) and T.cusps[0].sigma == KMatrix([[1]], Q)
    # sigma read directly from mu phi in the canonical basis
    T = to_triple(model([[2]], [[6]]))
    assert T.cusps[0].V == KMatrix([[1], [3]], Q) and T.cusps[0].sigma == KMatrix([[2]], Q)


def test_from_triple_examples():
    S = model([[1]], [[0]])
    assert from_triple(to_triple(S)).cusps == S.cusps
    T0 = Triple(BundleData(1, -1), (CuspTriple(0, KMatrix([[], []], Q, ncols=0),
                                               KMatrix([], Q, ncols=0)),))
    S0 = from_triple(T0)
    assert S0.semiranks == [0] and S0.degree == 0
    Tq = Triple(BundleData(1, 0), (CuspTriple(1, KMatrix([[0], [1]], Q), KMatrix([[1]], Q)),))
    S, diags = from_triple(Tq, with_diagnostic=True)
    assert S.cusps[0].A == KMatrix([[0]], Q) and S.cusps[0].B == KMatrix([[1]], Q)
    assert diags[0]["family"] == "zero_fiber_projection" and not diags[0]["match"]


def test_triple_validation():
    with pytest.raises(InvariantError):
        CuspTriple(1, KMatrix([[0], [0]], Q), KMatrix([[1]], Q))
    with pytest.raises(InvariantError):
        CuspTriple(1, KMatrix([[2], [0]], Q), KMatrix([[1]], Q))
    with pytest.raises(InvariantError):
        CuspTriple(1, KMatrix([[1], [0]], Q), KMatrix([[0]], Q))
    big = CuspTriple(2, KMatrix([[1, 0], [0, 1]], Q), KMatrix.identity(Q, 2))
    with pytest.raises(InvariantError):
        from_triple(Triple(BundleData(1, 0), (big,)))
    with pytest.raises(TorsionError):
        model([[0]], [[0]])
    with pytest.raises(InvariantError):
        BundleData(2, 3, splitting_type=(1, 1))


def test_trivializations_roundtrip():
    rng = random.Random(4)
    for i in range(20):
        ctx = CuspRingContext(Q, 12)
        M = random_lattice(rng, ctx)
        S = model_from_lattices([M], 3)
        triv = (random_invertible(rng, Q, M.rank),)
        T = to_triple(S, triv)
        assert from_triple(T).cusps == S.cusps


def test_roundtrip_examples(ctx):
    for gens, ab in (([[[1]]], (1, 0)), ([[[0, 0, 1]], [[0, 0, 0, 1]]], (0, 1)),
                     ([[[1], []], [[], [0, 0, 1]], [[], [0, 0, 0, 1]]], (1, 1))):
        rep = roundtrip_object(lattice(ctx, gens))
        assert rep.verdict == "PASS" and rep.start_ab == rep.end_ab == ab


def test_functor_examples(ctx):
    S = model([[1]], [[0]])
    ident = functor_on_morphism(LatticeMorphism.identity(S))
    c = ident.cusps[0]
    assert c.phi0 == KMatrix([[1]], Q) and c.phi1.is_zero() and c.sigma_square
    zero = functor_on_morphism(LatticeMorphism.zero(S, S))
    assert zero.cusps[0].f_pbar.is_zero() and zero.cusps[0].containment
    t2 = LatticeMorphism(S, S, (((ctx.t(2),),),))
    c = functor_on_morphism(t2).cusps[0]
    assert c.phi0.is_zero() and c.phi1.is_zero() and c.f_pbar.is_zero()


def test_morphism_from_triple_examples(ctx):
    S = model([[1]], [[0]])
    for f in (LatticeMorphism.identity(S), LatticeMorphism.zero(S, S),
              LatticeMorphism(S, S, (((ctx.t(2),),),))):
        Phi = functor_on_morphism(f)
        assert morphism_from_triple(Phi, S, S).equals(f)
    bare = morphism_from_triple(strip_series(functor_on_morphism(LatticeMorphism.identity(S))),
                                S, S)
    assert bare.equals(LatticeMorphism.identity(S))


def test_non_morphism_rejected(ctx):
    # t does not map R into R, since t is not in R
    S = model([[1]], [[0]])
    with pytest.raises(ContractViolation):
        functor_on_morphism(LatticeMorphism(S, S, (((ctx.t(1),),),)))


def test_jet_block_needed_for_containment(ctx):
    """1 + t maps R into R(1 + t) + m; the jet block sees this, diag(F0, F0) does not."""
    S = model([[1]], [[0]])
    S2 = model([[1]], [[1]])
    f = LatticeMorphism(S, S2, (((ctx.series([1, 1]),),),)).check()
    Phi = functor_on_morphism(f)
    assert Phi.cusps[0].containment
    T, T2 = to_triple(S), to_triple(S2)
    diag = KMatrix.identity(Q, 2)
    assert T2.cusps[0].V.solve(diag @ T.cusps[0].V) is None
    assert jet_block(KMatrix([[1]], Q), KMatrix([[1]], Q)) @ T.cusps[0].V == T2.cusps[0].V


def test_containment_failure_reported():
    T = to_triple(model([[1]], [[0]]))
    T2 = to_triple(model([[1]], [[1]]))
    c = cusp_morphism_data(KMatrix([[1]], Q), KMatrix([[0]], Q), T.cusps[0], T2.cusps[0])
    assert not c.containment
    Phi = TripleMorphism(T, T2, (c,))
    with pytest.raises(InvariantError):
        morphism_from_triple(Phi, model([[1]], [[0]]), model([[1]], [[1]]))


def test_random_morphisms_and_functoriality():
    for i in range(25):
        rng = instance_rng(1, "tri", i)
        F = Q if i % 2 else Field.GF(101)
        ctx = CuspRingContext(F, 12)
        S1, S2, S3 = (model_from_lattices([random_lattice(rng, ctx, r=rng.randint(1, 3))])
                      for _ in range(3))
        f, g = random_morphism(rng, S1, S2), random_morphism(rng, S2, S3)
        f.check(), g.check()
        Ff, Fg = functor_on_morphism(f), functor_on_morphism(g)
        Fgf = functor_on_morphism(g.compose(f))
        for c, x in zip(Fgf.cusps, compose_triple_morphisms(Fg, Ff)):
            assert (c.phi0, c.phi1, c.f_pbar) == x
        assert morphism_from_triple(Ff, S1, S2).equals(f)
        again = functor_on_morphism(morphism_from_triple(strip_series(Ff), S1, S2))
        assert again.fiber_equal(Ff)


def test_multi_cusp_locality():
    rng = random.Random(12)
    ctx = CuspRingContext(Q, 12)
    for _ in range(10):
        r = rng.randint(1, 3)
        Ms = [random_lattice(rng, ctx, r=r) for _ in range(2)]
        S = model_from_lattices(Ms, 4)
        T = to_triple(S)
        assert T.E.degree == 4 + sum(S.semiranks) - 2 * r
        for i, M in enumerate(Ms):
            assert to_triple(model_from_lattices([M], 4)).cusps[0] == T.cusps[i]


def test_random_triple_diagnostic_families():
    rng = random.Random(2)
    fams = set()
    for _ in range(60):
        r = rng.randint(1, 3)
        T = random_triple(rng, Q, r, rng.randint(0, r))
        _, diags = from_triple(T, with_diagnostic=True)
        fams |= {d["family"] for d in diags}
    assert "unexplained" not in fams and {"match", "zero_fiber_projection"} <= fams


def test_lattice_morphism_pushout_images(ctx):
    rng = random.Random(8)
    S = model_from_lattices([random_lattice(rng, ctx, r=2)])
    S2 = model_from_lattices([random_lattice(rng, ctx, r=2)])
    f = random_morphism(rng, S, S2)
    L, L2 = pushout(S.cusps[0], ctx).lattice, pushout(S2.cusps[0], ctx).lattice
    for g in L.generators:
        image = tuple(sum((F * x for F, x in zip(row, g)), ctx.zero()) for row in f.maps[0])
        assert contains(L2, image)
    assert decompose(L).a == S.semiranks[0]
