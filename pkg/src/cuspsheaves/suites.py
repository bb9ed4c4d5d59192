"""Seeded invariant and oracle checks, one instance at a time.

Every check maps (seed, index) to an :class:`OracleReport`.  Instances are
generated from ``instance_rng(seed, check, index)`` so any line of a report
can be reproduced on its own.
"""
from __future__ import annotations

import json

from .cusp import CuspRingContext, DEFAULT_PRECISION
from .errors import PrecisionError
from .extension import is_injective, lift_class_normalize, pushout, torsion_search
from .field import Field
from .lattice import contains, decompose, lattice_iso_check, min_generators
from .linalg import KMatrix
from .oracle import (OracleReport, oracle_min_generators, oracle_precision_stability,
                     oracle_relation_check, oracle_torsion)
from .sampling import (MIN_SAMPLE_PRECISION, instance_rng, random_invertible, random_lattice,
                       random_series_matrix, transform_generators)
from .serialize import dump_lattice, dump_phimap, dump_triple
from .triples import (LatticeMorphism, SheafModel, compose_triple_morphisms, degree_ledger,
                      from_triple, functor_on_morphism, jet_block, model_from_lattices,
                      morphism_from_triple, random_morphism, random_phimap, random_triple,
                      roundtrip_object, strip_series, to_triple)

N0 = DEFAULT_PRECISION
SMALL_PRIMES = (5, 101, 10007)


def field_for(rng, index: int, field: Field | None = None) -> Field:
    """Alternate Q and a prime field so both appear in every batch."""
    p = rng.choice(SMALL_PRIMES)
    if field is not None:
        return field
    return Field.Q() if index % 2 == 0 else Field.GF(p)


def _report(check, seed, index, ok, details, witness=None, open_question=False):
    verdict = "agree" if ok else "disagree"
    if ok and open_question:
        verdict = "open_question"
    return OracleReport(check, f"{seed}:{index}", verdict,
                        witness if (witness is not None and verdict != "agree") else None,
                        details)


def _field_desc(F: Field):
    return F.descriptor()


# ---------------------------------------------------------------- criteria

def _lattice_instance(seed, check, index, N=N0, field=None):
    rng = instance_rng(seed, check, index)
    F = field_for(rng, index, field)
    return rng, F, random_lattice(rng, CuspRingContext(F, N))


def _structure_outputs(M):
    dec = decompose(M)
    return dec, oracle_min_generators(M)


def check_structure(seed, index, field=None, N=N0):
    _, F, M = _lattice_instance(seed, "structure", index, N, field)
    dec, mu = _structure_outputs(M)
    split_ok = all(t.g_in_R for t in dec.transcript)
    ok = (dec.a + dec.b == M.rank and dec.a + 2 * dec.b == mu == min_generators(M) and split_ok)
    return _report("structure", seed, index, ok,
                   {"r": M.rank, "ab": [dec.a, dec.b], "oracle_min_generators": mu,
                    "field": _field_desc(F)},
                   {"lattice": dump_lattice(M), "field": _field_desc(F)})


def check_invariance(seed, index, field=None, N=N0, transforms=10):
    rng, F, M = _lattice_instance(seed, "invariance", index, N, field)
    ab = decompose(M).ab
    seen = [list(ab)]
    M2 = M
    bad = None
    for _ in range(transforms):
        M2 = transform_generators(rng, M2)
        ab2 = decompose(M2).ab
        seen.append(list(ab2))
        if ab2 != ab and bad is None:
            bad = M2
    return _report("invariance", seed, index, bad is None,
                   {"ab": list(ab), "transforms": transforms},
                   {"start": dump_lattice(M), "changed": dump_lattice(bad) if bad else None,
                    "sequence": seen})


def check_torsion(seed, index, field=None, N=N0):
    rng = instance_rng(seed, "torsion", index)
    F = field_for(rng, index, field)
    ctx = CuspRingContext(F, N)
    r = rng.randint(1, 3)
    a = rng.randint(0, r)
    want = None if a == 0 else rng.random() < 0.5
    phi = random_phimap(rng, F, r, a, injective=want, ctx=ctx, with_tails=rng.random() < 0.5)
    P = pushout(phi, ctx)
    inj = is_injective(phi)
    w = torsion_search(P)
    o = oracle_torsion(P)
    ok = (w is None) == inj and (o is None) == inj
    if w is not None:
        ok = ok and oracle_relation_check(P, w.v)
    if o is not None:
        ok = ok and oracle_relation_check(P, o)
    return _report("torsion", seed, index, ok,
                   {"a": a, "r": r, "injective": inj, "torsion_search": w is not None,
                    "oracle": o is not None},
                   {"phimap": dump_phimap(phi), "field": _field_desc(F)})


def _random_trivializations(rng, F, r, n=1):
    if rng.random() < 0.5:
        return ()
    return tuple(random_invertible(rng, F, r) for _ in range(n))


def check_object_roundtrip(seed, index, field=None, N=N0):
    rng, F, M = _lattice_instance(seed, "object_roundtrip", index, N, field)
    triv = _random_trivializations(rng, F, M.rank)
    rep = roundtrip_object(M, d=rng.randint(-3, 3), trivializations=triv)
    ok = rep.verdict == "PASS" and rep.reconstruction
    return _report("object_roundtrip", seed, index, ok, rep.to_dict(),
                   {"lattice": dump_lattice(M), "field": _field_desc(F)})


def check_lift_invariance(seed, index, field=None, N=N0):
    rng = instance_rng(seed, "lift_invariance", index)
    F = field_for(rng, index, field)
    ctx = CuspRingContext(F, N)
    r = rng.randint(1, 3)
    a = rng.randint(1, r)
    phi = random_phimap(rng, F, r, a, injective=True, ctx=ctx, with_tails=rng.random() < 0.5)
    psi = random_series_matrix(rng, ctx, r, a)
    phi2 = lift_class_normalize(phi, psi)
    L, L2 = pushout(phi, ctx).lattice, pushout(phi2, ctx).lattice
    d1, d2 = decompose(L), decompose(L2)
    iso, w = lattice_iso_check(L, L2)
    same = (all(contains(L2, g) for g in L.generators)
            and all(contains(L, g) for g in L2.generators))
    ok = (d1.ab == d2.ab and iso and w.verify() and same
          and (phi2.A, phi2.B) == (phi.A, phi.B))
    return _report("lift_invariance", seed, index, ok,
                   {"ab": list(d1.ab), "a": a, "r": r, "same_lattice": same},
                   {"phimap": dump_phimap(phi), "field": _field_desc(F)})


def check_degree(seed, index, field=None, N=N0):
    """Degree ledger on models built from lattices; every third has two cusps."""
    rng = instance_rng(seed, "degree", index)
    F = field_for(rng, index, field)
    ctx = CuspRingContext(F, N)
    r = rng.randint(1, 3)
    n = 2 if index % 3 == 0 else 1
    lattices = [random_lattice(rng, ctx, r=r) for _ in range(n)]
    d = rng.randint(-5, 5)
    S = model_from_lattices(lattices, d)
    a = S.semiranks
    triv = _random_trivializations(rng, F, r, n)
    T = to_triple(S, triv)
    Tth = to_triple(S, triv, theorem_degree=True)
    proof = d + sum(a) - n * r
    theorem = d - n * r - sum(a)
    ok = (T.E.degree == proof == S.E_degree == degree_ledger(r, d, a)
          and Tth.E.degree == theorem
          and from_triple(T).degree == d and from_triple(Tth, theorem_degree=True).degree == d)
    # locality: each cusp of a multi-cusp triple equals its single-cusp triple
    if n > 1:
        for i, M in enumerate(lattices):
            single = to_triple(model_from_lattices([M], d),
                               (triv[i],) if triv else ())
            ok = ok and single.cusps[0] == T.cusps[i]
    return _report("degree", seed, index, ok,
                   {"r": r, "n": n, "d": d, "a": a, "proof_degree": T.E.degree,
                    "theorem_degree": Tth.E.degree,
                    "discrepancy": T.E.degree - Tth.E.degree})


def _random_model(rng, F, ctx, r, n, arbitrary):
    if arbitrary:
        phis = [random_phimap(rng, F, r, rng.randint(0, r), injective=True) for _ in range(n)]
        return SheafModel(r, rng.randint(-3, 3), tuple(phis))
    return model_from_lattices([random_lattice(rng, ctx, r=r) for _ in range(n)],
                               rng.randint(-3, 3))


def check_morphism(seed, index, field=None, N=N0):
    """Both composites of the functor and its inverse are identities.

    Odd instances use models from arbitrary injective PhiMaps.  The
    sigma-square is required when every sigma is the identity and reported
    otherwise.
    """
    rng = instance_rng(seed, "morphism", index)
    F = field_for(rng, index // 2, field)
    ctx = CuspRingContext(F, N)
    n = 2 if index % 5 == 0 else 1
    arbitrary = index % 2 == 1
    S = _random_model(rng, F, ctx, rng.randint(1, 3), n, arbitrary)
    S2 = _random_model(rng, F, ctx, rng.randint(1, 3), n, arbitrary)
    Tr = to_triple(S, _random_trivializations(rng, F, S.rank, n))
    Tr2 = to_triple(S2, _random_trivializations(rng, F, S2.rank, n))
    f = random_morphism(rng, S, S2, N)
    Phi = functor_on_morphism(f, Tr, Tr2)
    contained = all(c.containment for c in Phi.cusps)
    square = all(c.sigma_square for c in Phi.cusps)
    back = morphism_from_triple(Phi, S, S2, N)
    # without the series, the 1-jet is all the fiber data determines
    Phi_bare = functor_on_morphism(morphism_from_triple(strip_series(Phi), S, S2, N), Tr, Tr2)
    ok = contained and back.equals(f) and Phi_bare.fiber_equal(Phi)
    # in canonical bases the square is forced only when both sigmas are identities
    canonical = all(c.sigma == KMatrix.identity(F, c.a) for c in Tr.cusps + Tr2.cusps)
    if canonical:
        ok = ok and square
    return _report("morphism", seed, index, ok,
                   {"n": n, "ranks": [S.rank, S2.rank], "semiranks": [S.semiranks, S2.semiranks],
                    "arbitrary_models": arbitrary, "canonical_sigma": canonical, "containment": contained,
                    "sigma_square": square, "inverse_then_functor": Phi_bare.fiber_equal(Phi),
                    "functor_then_inverse": back.equals(f)})


def check_functoriality(seed, index, field=None, N=N0):
    rng = instance_rng(seed, "functoriality", index)
    F = field_for(rng, index, field)
    ctx = CuspRingContext(F, N)
    n = 2 if index % 5 == 0 else 1
    arbitrary = index % 3 == 2
    S1, S2, S3 = (_random_model(rng, F, ctx, rng.randint(1, 3), n, arbitrary) for _ in range(3))
    T1, T2, T3 = to_triple(S1), to_triple(S2), to_triple(S3)
    f = random_morphism(rng, S1, S2, N)
    g = random_morphism(rng, S2, S3, N)
    Ff = functor_on_morphism(f, T1, T2)
    Fg = functor_on_morphism(g, T2, T3)
    Fgf = functor_on_morphism(g.compose(f), T1, T3)
    comp = compose_triple_morphisms(Fg, Ff)
    ok = all((c.phi0, c.phi1, c.f_pbar) == x for c, x in zip(Fgf.cusps, comp))
    ident = functor_on_morphism(LatticeMorphism.identity(S1, N), T1, T1)
    for c, phi in zip(ident.cusps, S1.cusps):
        I = KMatrix.identity(F, S1.rank)
        ok = ok and c.phi0 == I and c.phi1.is_zero() and c.f_pbar == KMatrix.identity(F, phi.a)
        ok = ok and c.block == jet_block(I, c.phi1) and c.sigma_square
    return _report("functoriality", seed, index, ok,
                   {"n": n, "ranks": [S1.rank, S2.rank, S3.rank], "arbitrary_models": arbitrary})


def check_semirank_diagnostic(seed, index, field=None, N=N0):
    """Pushout semirank versus a for an arbitrary triple.

    Mismatches whose V has zero E-fiber projection are the documented
    family; other mismatches are kept as open questions with the instance
    attached; anything outside both is a disagreement.
    """
    rng = instance_rng(seed, "semirank_diagnostic", index)
    F = field_for(rng, index, field)
    r = rng.randint(1, 3)
    a = rng.randint(0, r)
    T = random_triple(rng, F, r, a, n=1 if index % 4 else 2)
    _, diags = from_triple(T, with_diagnostic=True)
    families = [d["family"] for d in diags]
    ok = all(f != "unexplained" for f in families)
    mismatch = any(not d["match"] for d in diags)
    return _report("semirank_diagnostic", seed, index, ok,
                   {"r": r, "a": a, "families": families, "match": not mismatch,
                    "observed": [d["observed"] for d in diags]},
                   {"triple": dump_triple(T), "field": _field_desc(F)},
                   open_question=mismatch)


STABILITY_PRECISIONS = (10, 12, 14)


def check_stability(seed, index, field=None, N=N0):
    """Criteria for structure, torsion and object round trip at N = 10, 12, 14."""
    rng = instance_rng(seed, "stability", index)
    F = field_for(rng, index, field)
    ctx = CuspRingContext(F, N0)
    M = random_lattice(rng, ctx)
    r = rng.randint(1, 3)
    a = rng.randint(0, r)
    phi = random_phimap(rng, F, r, a, injective=None, ctx=ctx, with_tails=True)
    triv = _random_trivializations(rng, F, M.rank)

    def compute(_, N):
        Mn = M.with_precision(N)
        dec, mu = _structure_outputs(Mn)
        ctxn = CuspRingContext(F, N)
        P = pushout(phi, ctxn)
        rep = roundtrip_object(Mn, trivializations=triv)
        return (dec.a, dec.b, mu, all(t.g_in_R for t in dec.transcript),
                torsion_search(P) is None, oracle_torsion(P) is None,
                rep.verdict, tuple(rep.end_ab))

    rep = oracle_precision_stability(compute, None, STABILITY_PRECISIONS[0],
                                     f"{seed}:{index}", "stability", STABILITY_PRECISIONS)
    if not rep.agree:
        rep.witness = {"outputs": rep.witness, "lattice": dump_lattice(M),
                       "phimap": dump_phimap(phi), "field": _field_desc(F)}
    return rep


CHECKS = {
    "structure": check_structure,
    "invariance": check_invariance,
    "torsion": check_torsion,
    "object_roundtrip": check_object_roundtrip,
    "lift_invariance": check_lift_invariance,
    "degree": check_degree,
    "morphism": check_morphism,
    "functoriality": check_functoriality,
    "semirank_diagnostic": check_semirank_diagnostic,
    "stability": check_stability,
}


# ---------------------------------------------------------------- batches

def run_check(name: str, seed, cases: int, field: Field | None = None, precision: int | None = None):
    fn = CHECKS[name]
    N = precision or N0
    return [fn(seed, i, field=field, N=N) for i in range(cases)]


def summarize(name: str, reports) -> dict:
    counts = {"agree": 0, "disagree": 0, "open_question": 0}
    for rep in reports:
        counts[rep.verdict] += 1
    out = {"check": name, "cases": len(reports), **counts, "passed": counts["disagree"] == 0}
    if name == "semirank_diagnostic" and reports:
        matched = sum(1 for rep in reports if rep.details.get("match"))
        out["fraction_semirank_equals_a"] = f"{matched}/{len(reports)}"
        fams = {}
        for rep in reports:
            for fam in rep.details.get("families", []):
                fams[fam] = fams.get(fam, 0) + 1
        out["families"] = dict(sorted(fams.items()))
    if name == "degree" and reports:
        out["theorem_formula_disagrees"] = sum(
            1 for rep in reports if rep.details.get("discrepancy"))
    if name == "structure" and reports:
        strata = sorted({(rep.details["r"], *rep.details["ab"]) for rep in reports})
        out["strata"] = [list(s) for s in strata]
    return out


def selftest_lines(seed, cases: int, checks=None, field: Field | None = None,
                   precision: int | None = None):
    """(lines, ok): JSON lines for every instance and one summary per check."""
    if precision is not None and precision < MIN_SAMPLE_PRECISION:
        raise PrecisionError(f"sampled instances need precision >= {MIN_SAMPLE_PRECISION}")
    lines = []
    ok = True
    if cases <= 0:
        return lines, ok
    for name in checks or CHECKS:
        reports = run_check(name, seed, cases, field, precision)
        lines.extend(rep.to_json() for rep in reports)
        summary = summarize(name, reports)
        ok = ok and summary["passed"]
        lines.append(json.dumps({"summary": summary}, sort_keys=True, separators=(",", ":")))
    return lines, ok
