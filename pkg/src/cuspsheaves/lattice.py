"""Torsion-free modules over the cusp, presented inside R-bar^r.

A :class:`Lattice` is the R-span of finitely many generator vectors whose
entries are truncated series.  Generators are read as polynomials, so a
lattice can be re-lifted to any higher precision without changing the
module.

Everything below rests on two facts about a full-rank lattice M with
saturation Mbar = R-bar * M:

* t^2 Mbar is contained in M, because t^2 R-bar is the maximal ideal of R;
* if delta is the smallest valuation among the r x r minors of the
  generator matrix, then t^delta R-bar^r is contained in Mbar.

So M contains t^(delta+2) R-bar^r, and as long as delta <= N - 3 the
module is determined exactly by its image modulo t^(N+1).
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from itertools import combinations

from .cusp import CuspRingContext, quotient_class, in_subring
from .errors import (ContractViolation, InvariantError, PrecisionError,
                     RankDeficiencyError)
from .linalg import Echelon, KMatrix, complete_basis, rref
from .series import INF, PSeries, kmat_apply


@dataclass(frozen=True, eq=False)
class Lattice:
    rank: int
    generators: tuple
    ctx: CuspRingContext

    def __post_init__(self):
        if not isinstance(self.rank, int) or self.rank < 1:
            raise InvariantError("lattice rank must be a positive integer")
        gens = tuple(tuple(g) for g in self.generators)
        if not gens:
            raise InvariantError("a lattice needs at least one generator")
        for g in gens:
            if len(g) != self.rank:
                raise InvariantError(f"generator of length {len(g)} in rank {self.rank}")
            for x in g:
                if not isinstance(x, PSeries):
                    raise InvariantError("generator entries must be series")
                if x.precision != self.ctx.precision or x.field != self.ctx.field:
                    raise InvariantError("generator entry precision/field disagrees with context")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def from_coeffs(cls, ctx: CuspRingContext, gens) -> "Lattice":
        """Build from nested coefficient lists: gens[j][i] = coefficients of entry i."""
        gens = [tuple(ctx.series(c) for c in g) for g in gens]
        return cls(len(gens[0]), tuple(gens), ctx)

    def with_precision(self, N: int) -> "Lattice":
        ctx = self.ctx.with_precision(N)
        return Lattice(self.rank, tuple(tuple(x.with_precision(N) for x in g)
                                        for g in self.generators), ctx)

    @property
    def field(self):
        return self.ctx.field

    @property
    def precision(self):
        return self.ctx.precision

    def __eq__(self, other):
        if not isinstance(other, Lattice):
            return NotImplemented
        return (self.rank, self.generators, self.ctx) == (other.rank, other.generators, other.ctx)

    def __hash__(self):
        return hash((self.rank, self.generators, self.ctx))

    def __repr__(self):
        return f"Lattice(rank={self.rank}, {len(self.generators)} generators, N={self.precision})"

    @cached_property
    def structure(self) -> "_Structure":
        return _Structure(self)

    # k-linear images -------------------------------------------------

    def span_mod(self, L: int, exponents=None) -> Echelon:
        """k-span of t^e g (e in ``exponents``) modulo t^L, flattened."""
        if exponents is None:
            exponents = [0] + list(range(2, L))
        ech = Echelon(self.field, self.rank * L)
        for g in self.generators:
            for e in exponents:
                if e >= L:
                    continue
                v = flatten(g, L, shift=e)
                if any(v):
                    ech.add(v)
        return ech

    @cached_property
    def _membership_span(self) -> Echelon:
        return self.span_mod(self.structure.conductor)


def flatten(vec, L: int, shift: int = 0):
    """Coefficient vector of t^shift * vec modulo t^L (component-major)."""
    F = vec[0].field
    out = []
    for x in vec:
        cs = x.coeffs
        block = [F.zero] * L
        for e in range(max(0, L - shift)):
            if e < len(cs):
                block[e + shift] = cs[e]
        out.extend(block)
    return out


class _DetTable:
    """Memoized Laplace expansion for minors of a series matrix.

    ``cols[j]`` is the j-th column (a vector of series).
    """

    def __init__(self, cols, ctx: CuspRingContext):
        self.cols = cols
        self.ctx = ctx
        self.memo = {}

    def det(self, rows: tuple, cols: tuple) -> PSeries:
        if not rows:
            return self.ctx.one()
        key = (rows, cols)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        i0, rest = rows[0], rows[1:]
        acc = self.ctx.zero()
        for idx, c in enumerate(cols):
            x = self.cols[c][i0]
            if x.is_zero():
                continue
            sub = self.det(rest, cols[:idx] + cols[idx + 1:])
            if sub.is_zero():
                continue
            acc = acc + x * sub if idx % 2 == 0 else acc - x * sub
        self.memo[key] = acc
        return acc


class _Structure:
    """Nakayama basis, Cramer coordinates and conductor data of a lattice."""

    def __init__(self, M: Lattice):
        self.M = M
        ctx, r, N = M.ctx, M.rank, M.precision
        gens = M.generators
        table = _DetTable(gens, ctx)
        rows = tuple(range(r))

        best, best_val = None, INF
        for S in combinations(range(len(gens)), r):
            v = table.det(rows, S).valuation()
            if v < best_val:
                best, best_val = S, v
                if v == 0:
                    break
        if best is None:
            raise RankDeficiencyError(
                f"generators span rank < {r} (every {r}x{r} minor vanishes mod t^{N + 1})")
        delta = best_val
        if delta > N - 3:
            raise PrecisionError(
                f"index valuation {delta} needs precision >= {delta + 3}, have {N}")
        self.delta = delta

        # residues modulo t*Mbar, measured in the provisional basis ``best``
        cof = self._cofactors(gens, best, ctx)
        d0 = table.det(rows, best)[delta]
        ech = Echelon(ctx.field, r)
        chosen = []
        for j, g in enumerate(gens):
            res = [self._adj_apply(cof, g, i)[delta] / d0 for i in range(r)]
            if ech.add(res):
                chosen.append(j)
                if len(chosen) == r:
                    break
        if len(chosen) != r:
            raise ContractViolation("residues of the generators do not span Mbar/t*Mbar")
        self.nakayama_indices = tuple(chosen)
        self.nakayama_basis = tuple(gens[j] for j in chosen)

        self.cofactors = self._cofactors(gens, self.nakayama_indices, ctx)
        det = _DetTable(gens, ctx).det(rows, self.nakayama_indices)
        if det.valuation() != delta:
            raise ContractViolation("selected Nakayama basis does not span the saturation")
        self.det = det
        self.det_unit_inv = det.shift_down(delta).invert()
        min_cof = min(c.valuation() for row in self.cofactors for c in row)
        # largest elementary divisor of Mbar inside R-bar^r
        self.max_divisor = delta - min_cof
        self.conductor = self.max_divisor + 2
        self.coordinates = tuple(self.coords(g) for g in gens)

    @staticmethod
    def _cofactors(gens, S, ctx):
        sub = [gens[j] for j in S]
        r = len(sub)
        table = _DetTable(sub, ctx)
        cof = []
        for k in range(r):
            row = []
            rows = tuple(i for i in range(r) if i != k)
            for i in range(r):
                cols = tuple(c for c in range(r) if c != i)
                m = table.det(rows, cols)
                row.append(m if (k + i) % 2 == 0 else -m)
            cof.append(row)
        return cof  # cof[k][i]: cofactor of entry (row k, column i)

    @staticmethod
    def _adj_apply(cof, g, i):
        acc = None
        for k, gk in enumerate(g):
            term = cof[k][i] * gk
            acc = term if acc is None else acc + term
        return acc

    def coords(self, x):
        """Cramer coordinates of x in the Nakayama basis.

        Exact modulo t^(N+1-delta); returned padded back to precision N.
        """
        N = self.M.precision
        out = []
        for i in range(self.M.rank):
            num = self._adj_apply(self.cofactors, x, i)
            try:
                q = num.shift_down(self.delta) * self.det_unit_inv
            except Exception:
                raise InvariantError("vector does not lie in the saturation") from None
            out.append(q.with_precision(N))
        return tuple(out)


# ----------------------------------------------------------------------
# operations


def nakayama_basis(M: Lattice):
    """Generators of M whose residues form a basis of Mbar / t Mbar."""
    return list(M.structure.nakayama_basis)


def standard_form(M: Lattice) -> Lattice:
    """M rewritten in the coordinates of its Nakayama basis.

    The result contains every standard basis vector and sits inside
    R-bar^r.  Coordinates are exact modulo t^(N+1-delta); the higher
    coefficients are zero-filled, which does not change the module because
    it contains t^2 R-bar^r.
    """
    st = M.structure
    return Lattice(M.rank, st.coordinates, M.ctx)


def contains(M: Lattice, x) -> bool:
    """Membership of a series vector in M, by an exact k-linear solve."""
    if len(x) != M.rank:
        raise InvariantError("vector length differs from lattice rank")
    L = M.structure.conductor
    return M._membership_span.contains(flatten(x, L))


def is_standard(M: Lattice) -> bool:
    """True when R^r is contained in M (M is inside R-bar^r by construction)."""
    ctx = M.ctx
    for i in range(M.rank):
        e = tuple(ctx.one() if j == i else ctx.zero() for j in range(M.rank))
        if not contains(M, e):
            return False
    return True


def phi_image(M: Lattice):
    """Basis w_1..w_b (reduced echelon) of the image of M in (R-bar/R)^r."""
    if not is_standard(M):
        raise ContractViolation("phi_image needs a lattice in standard form")
    vecs = [tuple(quotient_class(x) for x in g) for g in M.generators]
    rows, _ = rref(vecs, M.field, M.rank)
    return [tuple(r) for r in rows]


@dataclass(frozen=True)
class SplitRecord:
    """Coordinates (g, h) of one standard generator in the basis B."""

    generator: int
    g: tuple
    h: tuple
    g_in_R: bool


@dataclass(frozen=True, eq=False)
class Decomposition:
    a: int
    b: int
    free_vectors: tuple
    sat_vectors: tuple
    basis_change: KMatrix  # columns v_1..v_a, w_1..w_b
    nakayama_indices: tuple = ()
    nakayama_basis: tuple = ()
    standard: Lattice | None = None
    transcript: tuple = ()
    delta: int = 0
    conductor: int = 2
    lattice: Lattice | None = dc_field(default=None, repr=False)

    def __post_init__(self):
        r = self.basis_change.nrows
        if self.a + self.b != r:
            raise InvariantError("a + b must equal the rank")
        if self.basis_change.rank() != r:
            raise InvariantError("v's and w's must form a basis of k^r")

    @property
    def ab(self):
        return (self.a, self.b)

    def frame(self):
        """Columns f_1..f_r with M = sum R f_i (i <= a) + sum R-bar f_(a+j)."""
        M = self.lattice
        Bm = self.basis_change
        return [_combine(self.nakayama_basis, Bm.col(c), M) for c in range(M.rank)]

    def frame_coordinates(self, x):
        """Coordinates of x in the frame: B^-1 applied to Cramer coordinates."""
        M = self.lattice
        c = M.structure.coords(x)
        Binv = self.basis_change.inverse()
        return kmat_apply(Binv.entries, c, M.field, M.precision)


def _combine(vectors, coeffs, M):
    """sum_i coeffs[i] * vectors[i] for constant coefficients."""
    acc = tuple(M.ctx.zero() for _ in range(M.rank))
    for c, v in zip(coeffs, vectors):
        if c:
            acc = tuple(x + y * c for x, y in zip(acc, v))
    return acc


def decompose(M: Lattice) -> Decomposition:
    st = M.structure
    F, r = M.field, M.rank
    std = Lattice(r, st.coordinates, M.ctx)
    phi_vecs = [tuple(quotient_class(x) for x in g) for g in std.generators]
    rows, _ = rref(phi_vecs, F, r)
    w = [tuple(x) for x in rows]
    v = complete_basis(w, F, r)
    a, b = len(v), len(w)
    Bm = KMatrix.from_columns(v + w, F, r)
    Binv = Bm.inverse()
    transcript = []
    for j, c in enumerate(std.generators):
        gh = kmat_apply(Binv.entries, c, F, M.precision)
        g, h = gh[:a], gh[a:]
        transcript.append(SplitRecord(j, g, h, all(in_subring(x) for x in g)))
    if not all(rec.g_in_R for rec in transcript):
        raise ContractViolation("split verification failed: a free coordinate left R")
    return Decomposition(a, b, tuple(v), tuple(w), Bm, st.nakayama_indices,
                         st.nakayama_basis, std, tuple(transcript), st.delta,
                         st.conductor, M)


def semirank(M: Lattice) -> int:
    return decompose(M).a


def min_generators(M: Lattice) -> int:
    """dim_k M / mM with mM = t^2 Mbar, both taken modulo t^conductor."""
    L = M.structure.conductor
    full = M.span_mod(L)
    ideal = M.span_mod(L, exponents=range(2, L))
    return len(full) - len(ideal)


@dataclass(frozen=True, eq=False)
class IsoWitness:
    """R-linear isomorphism M -> M2 sending frame vectors to frame vectors."""

    source: Decomposition
    target: Decomposition

    def forward(self, x):
        y = self.source.frame_coordinates(x)
        return _apply_frame(self.target, y)

    def backward(self, x):
        y = self.target.frame_coordinates(x)
        return _apply_frame(self.source, y)

    def verify(self) -> bool:
        M, M2 = self.source.lattice, self.target.lattice
        return (all(contains(M2, self.forward(g)) for g in M.generators)
                and all(contains(M, self.backward(g)) for g in M2.generators))


def _apply_frame(dec: Decomposition, y):
    M = dec.lattice
    fr = dec.frame()
    acc = tuple(M.ctx.zero() for _ in range(M.rank))
    for yi, f in zip(y, fr):
        acc = tuple(s + fi * yi for s, fi in zip(acc, f))
    return acc


def lattice_iso_check(M: Lattice, M2: Lattice):
    """(isomorphic?, witness or None).  Isomorphism type is exactly (a, b)."""
    if M.rank != M2.rank:
        raise InvariantError(f"rank {M.rank} vs {M2.rank}")
    d1, d2 = decompose(M), decompose(M2)
    if d1.ab != d2.ab:
        return False, None
    # lift so that frame coordinates survive the divisions exactly
    N = max(M.precision, M2.precision) + d1.delta + d2.delta + 2
    w = IsoWitness(decompose(M.with_precision(N)), decompose(M2.with_precision(N)))
    return True, w
