"""Triples (E, {V_i}, {sigma_i}) and the functor from torsion-free models.

A sheaf is modeled by its local data: one PhiMap per cusp plus the
bookkeeping numbers (r, d).  The global bundle E on the normalization is
carried as rank, degree and fiber trivializations only.

Morphisms of models are per-cusp series matrices F (r' x r) with
F L_i contained in L'_i, where L_i is the pushout lattice at cusp i.  On
W = (R-bar / t^2) (x) E the map F acts through its 1-jet
F = F0 + F1 t + ..., i.e. by the block matrix J = [[F0, 0], [F1, F0]].
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .cusp import CuspRingContext, DEFAULT_PRECISION
from .errors import ContractViolation, InvariantError, TorsionError
from .extension import (PhiMap, classify_semirank, extract_phi, is_injective,
                        lift_vectors, mu, pushout, reconstruction_matches)
from .field import Field
from .lattice import Lattice, contains, decompose, lattice_iso_check
from .linalg import KMatrix, left_kernel, kernel_basis


# ---------------------------------------------------------------- degrees

def degree_ledger(r: int, d: int, a, theorem: bool = False) -> int:
    """deg E for a rank r, degree d model with semiranks a at n cusps.

    Default: d + sum(a) - n r.  With ``theorem`` the alternative
    d - n r - sum(a) is returned instead.
    """
    a = list(a)
    if r < 1:
        raise InvariantError("rank must be positive")
    for ai in a:
        if not 0 <= ai <= r:
            raise InvariantError(f"semirank {ai} outside [0, {r}]")
    n = len(a)
    if theorem:
        return d - n * r - sum(a)
    return d + sum(a) - n * r


def inverse_degree_ledger(r: int, deg_E: int, a, theorem: bool = False) -> int:
    a = list(a)
    n = len(a)
    if theorem:
        return deg_E + n * r + sum(a)
    return deg_E - sum(a) + n * r


# ---------------------------------------------------------------- objects

@dataclass(frozen=True, eq=False)
class BundleData:
    rank: int
    degree: int
    splitting_type: tuple | None = None
    trivializations: tuple = ()  # one r x r KMatrix per marked point

    def __post_init__(self):
        if self.rank < 1:
            raise InvariantError("bundle rank must be positive")
        if self.splitting_type is not None:
            st = tuple(int(x) for x in self.splitting_type)
            if len(st) != self.rank or sum(st) != self.degree:
                raise InvariantError("splitting type must have r entries summing to the degree")
            object.__setattr__(self, "splitting_type", st)
        for T in self.trivializations:
            if T.dims != (self.rank, self.rank) or T.rank() != self.rank:
                raise InvariantError("fiber trivializations must be invertible r x r")

    def trivialization(self, i: int, field: Field) -> KMatrix:
        if i < len(self.trivializations):
            return self.trivializations[i]
        return KMatrix.identity(field, self.rank)

    def __eq__(self, other):
        if not isinstance(other, BundleData):
            return NotImplemented
        return (self.rank, self.degree, self.splitting_type, self.trivializations) == \
            (other.rank, other.degree, other.splitting_type, other.trivializations)

    def __hash__(self):
        return hash((self.rank, self.degree))


@dataclass(frozen=True)
class CuspTriple:
    a: int
    V: KMatrix      # 2r x a, reduced column-echelon
    sigma: KMatrix  # a x a, invertible

    def __post_init__(self):
        if self.V.ncols != self.a or self.sigma.dims != (self.a, self.a):
            raise InvariantError("V must be 2r x a and sigma a x a")
        if self.V.rank() != self.a:
            raise InvariantError("V must have full column rank")
        if self.a and self.V.column_echelon() != self.V:
            raise InvariantError("V must be in reduced column-echelon form")
        if self.a and self.sigma.rank() != self.a:
            raise InvariantError("sigma must be invertible")


@dataclass(frozen=True)
class Triple:
    E: BundleData
    cusps: tuple

    def __post_init__(self):
        object.__setattr__(self, "cusps", tuple(self.cusps))
        for c in self.cusps:
            if c.V.nrows != 2 * self.E.rank:
                raise InvariantError("V must live in a 2r-dimensional space")

    @property
    def semiranks(self):
        return [c.a for c in self.cusps]


@dataclass(frozen=True)
class SheafModel:
    rank: int
    degree: int
    cusps: tuple  # PhiMaps, one per cusp

    def __post_init__(self):
        object.__setattr__(self, "cusps", tuple(self.cusps))
        if not self.cusps:
            raise InvariantError("a model needs at least one cusp")
        for phi in self.cusps:
            if phi.r != self.rank:
                raise InvariantError("PhiMap rank differs from the model rank")
            if phi.a > self.rank:
                raise InvariantError(f"semirank {phi.a} exceeds rank {self.rank}")
            if not is_injective(phi):
                raise TorsionError("PhiMap is not injective; the model has torsion")

    @property
    def field(self) -> Field:
        return self.cusps[0].field

    @property
    def semiranks(self):
        return [phi.a for phi in self.cusps]

    @property
    def E_degree(self) -> int:
        return degree_ledger(self.rank, self.degree, self.semiranks)

    def lattices(self, ctx: CuspRingContext | None = None):
        ctx = ctx or CuspRingContext(self.field, DEFAULT_PRECISION)
        return [pushout(phi, ctx).lattice for phi in self.cusps]


def model_from_lattices(lattices, degree: int = 0) -> SheafModel:
    """One lattice per cusp; each is replaced by its extracted PhiMap."""
    lattices = list(lattices)
    r = lattices[0].rank
    phis = [extract_phi(M)[0] for M in lattices]
    return SheafModel(r, degree, phis)


def _theta(phi: PhiMap, T: KMatrix) -> KMatrix:
    """(T + T) mu [A; B]: the map k^a -> E(p) + (E (x) omega)(p) in fiber bases."""
    TT = T.block_diag(T)
    return TT @ (mu(phi.r, phi.field) @ phi.stacked())


def to_triple(S: SheafModel, trivializations=(), theorem_degree: bool = False,
              splitting_type=None) -> Triple:
    F = S.field
    E = BundleData(S.rank, degree_ledger(S.rank, S.degree, S.semiranks, theorem_degree),
                   splitting_type, tuple(trivializations))
    cusps = []
    for i, phi in enumerate(S.cusps):
        if not is_injective(phi):
            raise TorsionError("cannot form a triple from a model with torsion")
        theta = _theta(phi, E.trivialization(i, F))
        Vc = theta.column_echelon()
        sigma = Vc.solve(theta)
        cusps.append(CuspTriple(phi.a, Vc, sigma))
    return Triple(E, tuple(cusps))


def from_triple(T: Triple, theorem_degree: bool = False, with_diagnostic: bool = False):
    """Invert ``to_triple``.  With ``with_diagnostic`` also return per-cusp
    semirank classifications of the pushouts."""
    r = T.E.rank
    phis = []
    for i, c in enumerate(T.cusps):
        F = c.V.field
        Tr = T.E.trivialization(i, F)
        stacked = mu(r, F).inverse() @ (Tr.block_diag(Tr).inverse() @ (c.V @ c.sigma))
        A = stacked.submatrix(range(r), range(c.a))
        B = stacked.submatrix(range(r, 2 * r), range(c.a))
        phis.append(PhiMap(c.a, r, A, B))
    for phi in phis:
        if phi.a > r:
            raise InvariantError(f"subspace of dimension {phi.a} exceeds rank {r}")
    d = inverse_degree_ledger(r, T.E.degree, T.semiranks, theorem_degree)
    S = SheafModel(r, d, tuple(phis))
    if with_diagnostic:
        return S, [classify_semirank(phi) for phi in phis]
    return S


# ---------------------------------------------------------------- morphisms

def _series_matrix(F, rows, cols, ctx):
    M = tuple(tuple(x.with_precision(ctx.precision) for x in row) for row in F)
    if len(M) != rows or any(len(row) != cols for row in M):
        raise InvariantError(f"series matrix must be {rows} x {cols}")
    return M


def jet(Fm, i: int, field: Field) -> KMatrix:
    """The k-matrix of t^i coefficients of a series matrix."""
    ncols = len(Fm[0]) if Fm else 0
    return KMatrix([[x[i] for x in row] for row in Fm], field, ncols=ncols)


def jet_block(F0: KMatrix, F1: KMatrix) -> KMatrix:
    """Action on W-coordinates [alpha; beta] of alpha + beta t: [[F0, 0], [F1, F0]]."""
    Z = KMatrix.zeros(F0.field, F0.nrows, F0.ncols)
    return F0.hstack(Z).vstack(F1.hstack(F0))


def apply_series_matrix(Fm, v, ctx):
    out = []
    for row in Fm:
        acc = ctx.zero()
        for f, x in zip(row, v):
            acc = acc + f * x
        out.append(acc)
    return tuple(out)


def compose_series(G, F, ctx):
    """G o F for series matrices."""
    n, m = len(G), len(F[0]) if F else 0
    return tuple(tuple(sum((G[i][k] * F[k][j] for k in range(len(F))), ctx.zero())
                       for j in range(m)) for i in range(n))


@dataclass(frozen=True, eq=False)
class LatticeMorphism:
    source: SheafModel
    target: SheafModel
    maps: tuple  # per cusp, r' x r series matrices
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if len(self.maps) != len(self.source.cusps) or len(self.maps) != len(self.target.cusps):
            raise InvariantError("one series matrix per cusp is required")
        ctx = self.ctx
        object.__setattr__(self, "maps", tuple(
            _series_matrix(F, self.target.rank, self.source.rank, ctx) for F in self.maps))

    @property
    def ctx(self) -> CuspRingContext:
        return CuspRingContext(self.source.field, self.precision)

    def check(self):
        """Raise ContractViolation unless every F_i maps L_i into L'_i."""
        ctx = self.ctx
        for i, (L, L2) in enumerate(zip(self.source.lattices(ctx), self.target.lattices(ctx))):
            for g in L.generators:
                if not contains(L2, apply_series_matrix(self.maps[i], g, ctx)):
                    raise ContractViolation(f"map at cusp {i} does not preserve the lattices")
        return self

    def compose(self, first: "LatticeMorphism") -> "LatticeMorphism":
        """self o first."""
        ctx = self.ctx
        return LatticeMorphism(first.source, self.target,
                               tuple(compose_series(G, F, ctx) for G, F in zip(self.maps, first.maps)),
                               self.precision)

    def equals(self, other: "LatticeMorphism") -> bool:
        return all(F == G for F, G in zip(self.maps, other.maps))

    @classmethod
    def identity(cls, S: SheafModel, precision: int = DEFAULT_PRECISION):
        ctx = CuspRingContext(S.field, precision)
        I = tuple(tuple(ctx.one() if i == j else ctx.zero() for j in range(S.rank))
                  for i in range(S.rank))
        return cls(S, S, tuple(I for _ in S.cusps), precision)

    @classmethod
    def zero(cls, S: SheafModel, S2: SheafModel, precision: int = DEFAULT_PRECISION):
        ctx = CuspRingContext(S.field, precision)
        Z = tuple(tuple(ctx.zero() for _ in range(S.rank)) for _ in range(S2.rank))
        return cls(S, S2, tuple(Z for _ in S.cusps), precision)


@dataclass(frozen=True)
class CuspMorphismData:
    """Fiber data of Phi at one marked point, in the fiber trivializations."""

    phi0: KMatrix      # Phi at p-bar
    phi1: KMatrix      # first jet of Phi at p-bar
    f_pbar: KMatrix    # induced map k^a -> k^a'
    block: KMatrix     # jet block acting on E(p) + (E (x) omega)(p)
    containment: bool
    sigma_square: bool


@dataclass(frozen=True, eq=False)
class TripleMorphism:
    source: Triple
    target: Triple
    cusps: tuple
    series: tuple | None = None  # optional per-cusp series matrices of Phi

    def fiber_equal(self, other: "TripleMorphism") -> bool:
        return all((c.phi0, c.phi1, c.f_pbar) == (d.phi0, d.phi1, d.f_pbar)
                   for c, d in zip(self.cusps, other.cusps))


def cusp_morphism_data(phi0: KMatrix, phi1: KMatrix, c: CuspTriple, c2: CuspTriple,
                       f_pbar: KMatrix | None = None) -> CuspMorphismData:
    """Checks at one cusp from fiber data and the two triples alone.

    With theta = V sigma and theta' = V' sigma', the induced map on k^a is
    the solution of theta' f = J theta; V-containment is its existence.
    The sigma-square compares J in the canonical bases of V and V'.
    """
    F = phi0.field
    J = jet_block(phi0, phi1)
    theta, theta2 = c.V @ c.sigma, c2.V @ c2.sigma
    image = J @ theta
    solved = theta2.solve(image)
    if f_pbar is None:
        f_pbar = solved if solved is not None else KMatrix.zeros(F, c2.a, c.a)
    containment = solved is not None and theta2 @ f_pbar == image
    sq = False
    if containment:
        Jc = c2.V.solve(J @ c.V)
        sq = Jc is not None and (Jc @ c.sigma) == (c2.sigma @ Jc)
    return CuspMorphismData(phi0, phi1, f_pbar, J, containment, sq)


def functor_on_morphism(f: LatticeMorphism, T: Triple | None = None, T2: Triple | None = None,
                        check: bool = True) -> TripleMorphism:
    """Triple morphism induced by f.

    Raises ContractViolation if f does not preserve the lattices.  A
    failed V-containment is recorded in the cusp data, not raised.
    """
    if check:
        f.check()
    S, S2 = f.source, f.target
    T = T or to_triple(S)
    T2 = T2 or to_triple(S2)
    F = S.field
    cusps = []
    for i in range(len(S.cusps)):
        Fm = f.maps[i]
        Tr, Tr2 = T.E.trivialization(i, F), T2.E.trivialization(i, F)
        # fiber matrices in the trivializations
        phi0 = Tr2 @ jet(Fm, 0, F) @ Tr.inverse()
        phi1 = Tr2 @ jet(Fm, 1, F) @ Tr.inverse()
        cusps.append(cusp_morphism_data(phi0, phi1, T.cusps[i], T2.cusps[i]))
    return TripleMorphism(T, T2, tuple(cusps), f.maps)


def morphism_from_triple(Phi: TripleMorphism, S: SheafModel, S2: SheafModel,
                         precision: int = DEFAULT_PRECISION) -> LatticeMorphism:
    """Lattice morphism determined by Phi through the pushout property.

    Per cusp the target of u_i is sum_k f_ki u'_k + eps_i, where
    eps_i = Phi(u_i) - sum_k f_ki u'_k is required to lie in m^r'.
    """
    F = S.field
    ctx = CuspRingContext(F, precision)
    T, T2 = Phi.source, Phi.target
    maps = []
    for i, (phi, phi2) in enumerate(zip(S.cusps, S2.cusps)):
        c = Phi.cusps[i]
        if not c.containment:
            raise InvariantError(f"fiber map at cusp {i} does not carry V into V'")
        Tr, Tr2 = T.E.trivialization(i, F), T2.E.trivialization(i, F)
        theta, theta2 = _theta(phi, Tr), _theta(phi2, Tr2)
        if jet_block(c.phi0, c.phi1) @ theta != theta2 @ c.f_pbar:
            raise InvariantError(f"f_pbar at cusp {i} is inconsistent with the fiber maps")
        if Phi.series is not None:
            Fm = _series_matrix(Phi.series[i], S2.rank, S.rank, ctx)
            if jet(Fm, 0, F) != Tr2.inverse() @ c.phi0 @ Tr or \
                    jet(Fm, 1, F) != Tr2.inverse() @ c.phi1 @ Tr:
                raise InvariantError(f"series at cusp {i} disagrees with the fiber data")
        else:
            F0 = Tr2.inverse() @ c.phi0 @ Tr
            F1 = Tr2.inverse() @ c.phi1 @ Tr
            Fm = tuple(tuple(ctx.t(0, F0[p, q]) + ctx.t(1, F1[p, q]) for q in range(S.rank))
                       for p in range(S2.rank))
        u = lift_vectors(phi, ctx)
        u2 = lift_vectors(phi2, ctx)
        L2 = pushout(phi2, ctx).lattice
        for col, ui in enumerate(u):
            image = apply_series_matrix(Fm, ui, ctx)
            lifted = tuple(ctx.zero() for _ in range(S2.rank))
            for k, uk in enumerate(u2):
                lifted = tuple(x + y * c.f_pbar[k, col] for x, y in zip(lifted, uk))
            eps = tuple(x - y for x, y in zip(image, lifted))
            if any(e.valuation() < 2 for e in eps):
                raise ContractViolation(f"lift at cusp {i} leaves m^r'")
            if not contains(L2, image):
                raise ContractViolation(f"image of u_{col} at cusp {i} is not in the target")
        maps.append(Fm)
    return LatticeMorphism(S, S2, tuple(maps), precision)


def strip_series(Phi: TripleMorphism) -> TripleMorphism:
    return TripleMorphism(Phi.source, Phi.target, Phi.cusps, None)


def compose_triple_morphisms(G: TripleMorphism, Fm: TripleMorphism):
    """Fiber-level composite G o F as (phi0, phi1, f_pbar) per cusp."""
    out = []
    for g, f in zip(G.cusps, Fm.cusps):
        out.append((g.phi0 @ f.phi0, g.phi1 @ f.phi0 + g.phi0 @ f.phi1, g.f_pbar @ f.f_pbar))
    return out


# ---------------------------------------------------------------- reports

@dataclass
class RoundTripReport:
    start_ab: tuple
    end_ab: tuple
    isomorphic: bool
    witness_verified: bool
    reconstruction: bool
    E_degree: int
    verdict: str = dc_field(init=False)

    def __post_init__(self):
        ok = self.isomorphic and self.start_ab == self.end_ab and self.witness_verified
        self.verdict = "PASS" if ok else "FAIL"

    def to_dict(self):
        return {"start": list(self.start_ab), "end": list(self.end_ab),
                "isomorphic": self.isomorphic, "witness_verified": self.witness_verified,
                "reconstruction": self.reconstruction, "E_degree": self.E_degree,
                "verdict": self.verdict}


def roundtrip_object(M: Lattice, d: int = 0, theorem_degree: bool = False,
                     trivializations=()) -> RoundTripReport:
    """extract_phi -> to_triple -> from_triple -> pushout, compared with M."""
    start = decompose(M).ab
    S = model_from_lattices([M], d)
    T = to_triple(S, trivializations, theorem_degree=theorem_degree)
    S2 = from_triple(T, theorem_degree=theorem_degree)
    # the pushout contains t^2 R-bar^r, so it is exact at any precision; its
    # index valuation is at most 2r, hence the floor 2r + 3
    L = pushout(S2.cusps[0], M.ctx.with_precision(max(M.precision, 2 * M.rank + 3))).lattice
    end = decompose(L).ab
    iso, w = lattice_iso_check(M, L)
    verified = bool(iso and w.verify())
    recon = reconstruction_matches(M, S2.cusps[0])
    return RoundTripReport(start, end, iso, verified, recon, T.E.degree)


# ---------------------------------------------------------------- sampling

def random_phimap(rng, field: Field, r: int, a: int, injective: bool | None = None,
                  ctx: CuspRingContext | None = None, with_tails: bool = False) -> PhiMap:
    """Random PhiMap; ``injective`` forces the verdict when not None."""
    from .sampling import random_kmatrix, random_low_rank, random_series_matrix
    if injective and a > 2 * r:
        raise InvariantError(f"no injective map k^{a} -> W when 2r = {2 * r}")
    while True:
        if injective is False and a > 0:
            rank = rng.randint(0, min(a - 1, 2 * r))
            S = random_low_rank(rng, field, 2 * r, a, rank)
        else:
            S = random_kmatrix(rng, field, 2 * r, a)
        A = S.submatrix(range(r), range(a))
        B = S.submatrix(range(r, 2 * r), range(a))
        H = random_series_matrix(rng, ctx, r, a) if (with_tails and ctx and a) else None
        phi = PhiMap(a, r, A, B, H)
        if injective is None or is_injective(phi) == injective:
            return phi


def random_triple(rng, field: Field, r: int, a: int, n: int = 1, degree: int = 0) -> Triple:
    """Arbitrary triple: random V of dimension a in k^2r and random sigma."""
    from .sampling import random_invertible, random_kmatrix, random_low_rank
    cusps = []
    for _ in range(n):
        while True:
            kind = rng.random()
            if kind < 0.2:
                # V inside the omega block: zero projection to the E fiber
                top = KMatrix.zeros(field, r, a)
                V = top.vstack(random_kmatrix(rng, field, r, a))
            elif kind < 0.4 and a > 0:
                top = random_low_rank(rng, field, r, a, rng.randint(0, a - 1))
                V = top.vstack(random_kmatrix(rng, field, r, a))
            else:
                V = random_kmatrix(rng, field, 2 * r, a)
            if V.rank() == a:
                break
        cusps.append(CuspTriple(a, V.column_echelon(), random_invertible(rng, field, a)))
    return Triple(BundleData(r, degree), tuple(cusps))


def random_morphism(rng, S: SheafModel, S2: SheafModel,
                    precision: int = DEFAULT_PRECISION) -> LatticeMorphism:
    """Random F with J theta contained in span theta' at every cusp, plus a t^2 tail.

    The 1-jet (F0, F1) ranges over the solutions of K' J(F0, F1) theta = 0,
    K' a left kernel of theta'; any tail in t^2 R-bar is harmless since it
    lands in m^r'.
    """
    from .sampling import random_series_matrix
    F = S.field
    ctx = CuspRingContext(F, precision)
    r, r2 = S.rank, S2.rank
    maps = []
    for phi, phi2 in zip(S.cusps, S2.cusps):
        theta = _theta(phi, KMatrix.identity(F, r))
        theta2 = _theta(phi2, KMatrix.identity(F, r2))
        K = left_kernel(theta2)
        nunk = 2 * r2 * r
        eqs = []
        for basis_idx in range(nunk):
            e = [F.zero] * nunk
            e[basis_idx] = F.one
            F0 = KMatrix([e[p * r:(p + 1) * r] for p in range(r2)], F, ncols=r)
            F1 = KMatrix([e[r2 * r + p * r: r2 * r + (p + 1) * r] for p in range(r2)], F, ncols=r)
            col = (K @ jet_block(F0, F1) @ theta).entries
            eqs.append([x for row in col for x in row])
        neq = len(eqs[0]) if eqs else 0
        system = KMatrix.from_columns(eqs, F, neq)
        sol = kernel_basis(system)
        x = [F.zero] * nunk
        for s in sol:
            c = F.random(rng)
            x = [xi + c * si for xi, si in zip(x, s)]
        tail = random_series_matrix(rng, ctx, r2, r, min_val=2)
        Fm = tuple(tuple(ctx.t(0, x[p * r + q]) + ctx.t(1, x[r2 * r + p * r + q]) + tail[p][q]
                         for q in range(r)) for p in range(r2))
        maps.append(Fm)
    return LatticeMorphism(S, S2, tuple(maps), precision)
