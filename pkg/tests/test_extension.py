import random

import pytest

from cuspsheaves.cusp import CuspRingContext
from cuspsheaves.errors import InvariantError, PrecisionError
from cuspsheaves.extension import (PhiMap, WSpace, classify_semirank, extract_phi, is_injective,
                                   lift_class_normalize, mu, pushout, reconstruction_matches,
                                   semirank_from_jets, torsion_search)
from cuspsheaves.field import Field
from cuspsheaves.lattice import decompose, lattice_iso_check
from cuspsheaves.linalg import KMatrix
from cuspsheaves.oracle import oracle_relation_check, oracle_torsion
from cuspsheaves.sampling import instance_rng, random_lattice
from cuspsheaves.triples import random_phimap

from conftest import Q, lattice


def phi(A, B, H=None):
    return PhiMap.from_lists(Q, A, B, H)


def test_is_injective_examples():
    assert is_injective(phi([[1]], [[0]]))
    assert not is_injective(phi([[0]], [[0]]))
    assert is_injective(phi([[1, 0]], [[0, 1]]))


def test_pushout_examples(ctx):
    assert decompose(pushout(phi([[1]], [[0]]), ctx).lattice).ab == (1, 0)
    assert decompose(pushout(phi([[1]], [[1]]), ctx).lattice).ab == (1, 0)
    P = pushout(phi([[0]], [[0]]), ctx)
    assert P.lattice is None and not P.torsion_free
    assert torsion_search(P) is not None
    with pytest.raises(PrecisionError):
        pushout(phi([[1]], [[0]]), CuspRingContext(Q, 5))


def test_torsion_search_examples(ctx):
    w = torsion_search(pushout(phi([[0]], [[0]]), ctx))
    assert w.v == (1,)
    assert torsion_search(pushout(phi([[1]], [[0]]), ctx)) is None
    P = pushout(phi([[1, 1]], [[0, 0]]), ctx)
    w = torsion_search(P)
    assert w.v[0] == -w.v[1] != 0
    assert oracle_relation_check(P, w.v)
    assert all(y.valuation() >= 2 for y in w.y)


def test_mu_examples():
    M1 = mu(1, Q)
    assert M1.col(0) == (1, 0) and M1.col(1) == (0, 1)
    M2 = mu(2, Q)
    assert sorted(M2.columns()) == sorted(KMatrix.identity(Q, 4).columns())
    W = WSpace(2)
    assert W.dim == 4 and W.index(("t", 1)) == 3
    for r in range(1, 7):
        assert mu(r, Q).det() != 0


def test_extract_phi_examples(ctx):
    p, dec = extract_phi(lattice(ctx, [[[1]]]))
    assert (p.a, p.A, p.B) == (1, KMatrix([[1]], Q), KMatrix([[0]], Q))
    p, dec = extract_phi(lattice(ctx, [[[0, 0, 1]], [[0, 0, 0, 1]]]))
    assert p.a == 0 and p.A.dims == (1, 0)
    M = lattice(ctx, [[[1], []], [[], [0, 0, 1]], [[], [0, 0, 0, 1]]])
    p, dec = extract_phi(M)
    assert p.a == 1 and p.A == KMatrix([[1], [0]], Q) and p.B.is_zero()
    assert reconstruction_matches(M, p)


def test_extract_phi_contract_on_random_lattices():
    for i in range(40):
        rng = instance_rng(9, "extract", i)
        ctx = CuspRingContext(Q if i % 2 else Field.GF(101), 12)
        M = random_lattice(rng, ctx)
        p, dec = extract_phi(M)
        L = pushout(p, ctx).lattice
        ok, w = lattice_iso_check(L, M)
        assert ok and w.verify()
        assert decompose(L).ab == dec.ab
        assert reconstruction_matches(M, p)


def test_lift_class_examples(ctx):
    p = phi([[1]], [[0]])
    zero = ((ctx.zero(),),)
    assert lift_class_normalize(p, zero) == p
    p2 = lift_class_normalize(p, ((ctx.series([2, 1]),),))
    assert (p2.A, p2.B) == (p.A, p.B) and p2.H is not None
    assert decompose(pushout(p2, ctx).lattice).ab == (1, 0)
    q = phi([[0]], [[1]])
    assert is_injective(lift_class_normalize(q, ((ctx.series([5, 0, 1]),),)))
    with pytest.raises(InvariantError):
        lift_class_normalize(p, ((ctx.zero(), ctx.zero()),))


def test_semirank_bound_and_jet_formula():
    for i in range(150):
        rng = random.Random(f"bound:{i}")
        F = Q if i % 2 else Field.GF(5)
        ctx = CuspRingContext(F, 12)
        r = rng.randint(1, 3)
        a = rng.randint(1, r + 1)
        p = random_phimap(rng, F, r, a, injective=True, ctx=ctx, with_tails=True)
        obs = decompose(pushout(p, ctx).lattice).a
        assert obs <= min(a, r)
        assert obs == semirank_from_jets(p)
        assert (obs == a) == (p.A.rank() == a)


def test_open_question_family(ctx):
    d = classify_semirank(phi([[0]], [[1]]))
    assert d["observed"] == 0 and d["family"] == "zero_fiber_projection"
    d = classify_semirank(PhiMap.from_lists(Q, [[1, 0], [0, 0]], [[0, 0], [0, 1]]))
    assert d["observed"] == 1 and d["family"] == "deficient_fiber_projection"
    assert classify_semirank(phi([[1]], [[7]]))["family"] == "match"


def test_torsion_criterion_against_oracle():
    for i in range(80):
        rng = random.Random(f"tor:{i}")
        F = Q if i % 2 else Field.GF(7)
        ctx = CuspRingContext(F, 10)
        r = rng.randint(1, 3)
        a = rng.randint(1, 2 * r)
        p = random_phimap(rng, F, r, a, injective=rng.random() < 0.5, ctx=ctx, with_tails=True)
        P = pushout(p, ctx)
        inj = is_injective(p)
        assert (torsion_search(P) is None) == inj == (oracle_torsion(P) is None)


def test_phimap_validation():
    with pytest.raises(InvariantError):
        PhiMap(1, 1, KMatrix([[1]], Q), KMatrix([[1, 0]], Q))
    with pytest.raises(InvariantError):
        PhiMap(1, 0, KMatrix([], Q, ncols=1), KMatrix([], Q, ncols=1))
