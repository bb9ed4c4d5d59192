"""Brute-force verifiers.

Nothing here calls the lattice, extension or triple algorithms: the
oracles read raw presentations (generator vectors, the matrices A, B, H)
and do one large exact linear-algebra computation each, at the full
working precision.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

from .linalg import Echelon, KMatrix, kernel_basis


@dataclass
class OracleReport:
    check: str
    seed: object
    verdict: str  # "agree", "disagree" or "open_question"
    witness: dict | None = None
    details: dict = dc_field(default_factory=dict)

    @property
    def agree(self) -> bool:
        return self.verdict == "agree"

    def to_json(self) -> str:
        out = {"check": self.check, "seed": self.seed, "verdict": self.verdict}
        if self.details:
            out["details"] = self.details
        if self.witness is not None:
            out["witness"] = self.witness
        return json.dumps(out, sort_keys=True, separators=(",", ":"))


def _coeff_vector(vec, shift, N):
    F = vec[0].field
    out = []
    for x in vec:
        block = [F.zero] * (N + 1)
        for e, c in enumerate(x.coeffs):
            if e + shift <= N:
                block[e + shift] = c
        out.extend(block)
    return out


def _span_rank(gens, exponents, N, F, r):
    ech = Echelon(F, r * (N + 1))
    for g in gens:
        for e in exponents:
            ech.add(_coeff_vector(g, e, N))
    return len(ech)


def oracle_min_generators(M) -> int:
    """dim_k(M / mM) from the raw generators at full precision N.

    R is spanned mod t^(N+1) by 1, t^2, ..., t^N and m by t^2, ..., t^N, so
    both quotients are plain k-spans of shifted coefficient vectors.
    """
    N, F, r = M.ctx.precision, M.ctx.field, M.rank
    full = _span_rank(M.generators, [0] + list(range(2, N + 1)), N, F, r)
    ideal = _span_rank(M.generators, list(range(2, N + 1)), N, F, r)
    return full - ideal


def oracle_in_module(M, x) -> bool:
    """Membership of x in the R-span of M's generators, modulo t^(N+1)."""
    N, F, r = M.ctx.precision, M.ctx.field, M.rank
    ech = Echelon(F, r * (N + 1))
    for g in M.generators:
        for e in [0] + list(range(2, N + 1)):
            ech.add(_coeff_vector(g, e, N))
    return ech.contains(_coeff_vector(x, 0, N))


def _phi_lift_coeffs(A, B, H, i, j, N, F):
    """Coefficients of phi_P(t^2 e_i)_j = a t^2 + b t^3 + h t^4, mod t^(N+1)."""
    out = [F.zero] * (N + 1)
    if N >= 2:
        out[2] += A[j, i]
    if N >= 3:
        out[3] += B[j, i]
    if H is not None:
        for e, c in enumerate(H[j][i].coeffs):
            if e + 4 <= N:
                out[e + 4] += c
    return out


def oracle_torsion(P):
    """Exhaustive search for a nonzero class killed by t^2 and t^3.

    Every class of (R^a + m^r)/relations can be moved to the form (v, y)
    with v constant in k^a and y in m^r, and such a class is zero only when
    v = 0.  The unknowns are v and the coefficients of y in degrees
    2..N-2; the equations say t^2 (v, y) and t^3 (v, y) are relations,
    i.e. t^s y + phi_P(t^s v) = 0 modulo t^(N+1).  A solution with v != 0
    is a torsion witness.
    """
    phi = P.phi
    a, r = phi.a, phi.r
    F = phi.A.field
    N = P.precision
    H = phi.H
    ydeg = list(range(2, N - 1))
    nunk = a + r * len(ydeg)
    eqs = []
    for s in (2, 3):
        for j in range(r):
            for e in range(N + 1):
                row = [F.zero] * nunk
                for i in range(a):
                    lift = _phi_lift_coeffs(phi.A, phi.B, H, i, j, N, F)
                    # phi_P(t^s v) = t^(s-2) phi_P(t^2 v)
                    if e - (s - 2) >= 0:
                        row[i] = lift[e - (s - 2)]
                for k, d in enumerate(ydeg):
                    if d + s == e:
                        row[a + j * len(ydeg) + k] = F.one
                eqs.append(row)
    if a == 0:
        return None
    sol = kernel_basis(KMatrix(eqs, F, ncols=nunk))
    for v in sol:
        if any(v[:a]):
            return tuple(v[:a])
    return None


def oracle_relation_check(P, v) -> bool:
    """Check that t^2 (v, -t^2 sum v_i h_i) is a relation of the presentation."""
    phi = P.phi
    F, N = phi.A.field, P.precision
    for j in range(phi.r):
        total = [F.zero] * (N + 1)
        for i, vi in enumerate(v):
            lift = _phi_lift_coeffs(phi.A, phi.B, phi.H, i, j, N, F)
            for e in range(N + 1):
                total[e] += vi * lift[e]
            if phi.H is not None:
                for e, c in enumerate(phi.H[j][i].coeffs):
                    if e + 4 <= N:
                        total[e + 4] -= vi * c
        if any(total):
            return False
    return True


def oracle_precision_stability(compute, instance, N: int, seed=None,
                               check: str = "precision_stability",
                               precisions=None) -> OracleReport:
    """Rerun ``compute(instance, precision)`` at N, N+1, N+2 and compare.

    ``compute`` returns a JSON-serializable tuple of discrete outputs;
    ``precisions`` replaces the default ladder.
    """
    ladder = list(precisions) if precisions else [N, N + 1, N + 2]
    outs = {}
    for n in ladder:
        try:
            outs[n] = compute(instance, n)
        except Exception as exc:  # a failure at one precision is a disagreement
            outs[n] = ("error", type(exc).__name__, str(exc))
    first = outs[ladder[0]]
    same = all(outs[n] == first for n in ladder)
    return OracleReport(check, seed, "agree" if same else "disagree",
                        None if same else {str(k): _jsonable(v) for k, v in outs.items()},
                        {"precisions": ladder, "output": _jsonable(first)})


def _jsonable(x):
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    if isinstance(x, (int, str, bool)) or x is None:
        return x
    return str(x)


def series_vector_equal_mod(u, v, L) -> bool:
    """Equality of two series vectors modulo t^L."""
    return all(x.coeffs[:L] == y.coeffs[:L] for x, y in zip(u, v))


