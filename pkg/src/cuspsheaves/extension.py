"""Extension data at a cusp: the map phi: k^a -> W and its pushout.

W = (O/m^2) (x) E_p is stored as a 2r-dimensional space with the tagged
basis {1 (x) s_j, t (x) s_j}; coordinates are ordered with the 1-block first,
so phi is the stacked matrix [A; B].  No tensor product is ever formed.
"""
from __future__ import annotations

from dataclasses import dataclass

from .cusp import CuspRingContext, DEFAULT_PRECISION
from .errors import InvariantError, MathPreconditionError, PrecisionError
from .field import Field
from .lattice import Decomposition, Lattice, contains, decompose
from .linalg import KMatrix, kernel_basis
from .series import PSeries


@dataclass(frozen=True, eq=False)
class PhiMap:
    a: int
    r: int
    A: KMatrix
    B: KMatrix
    H: tuple | None = None  # r x a series, the lift tails

    def __post_init__(self):
        if self.a < 0 or self.r < 1:
            raise InvariantError("PhiMap needs a >= 0 and r >= 1")
        for name, M in (("A", self.A), ("B", self.B)):
            if M.dims != (self.r, self.a):
                raise InvariantError(f"{name} has shape {M.dims}, expected {(self.r, self.a)}")
        if self.A.field != self.B.field:
            raise InvariantError("A and B over different fields")
        if self.H is not None:
            H = tuple(tuple(row) for row in self.H)
            if len(H) != self.r or any(len(row) != self.a for row in H):
                raise InvariantError("H must be an r x a array of series")
            precs = {x.precision for row in H for x in row}
            if len(precs) > 1:
                raise InvariantError("H entries disagree on precision")
            if all(x.is_zero() for row in H for x in row):
                H = None
            object.__setattr__(self, "H", H)

    @classmethod
    def from_lists(cls, field: Field, A, B, H=None) -> "PhiMap":
        A = KMatrix(A, field)
        r = A.nrows
        a = A.ncols if r else 0
        return cls(a, r, KMatrix(A.entries, field, ncols=a), KMatrix(B, field, ncols=a), H)

    @property
    def field(self) -> Field:
        return self.A.field

    def stacked(self) -> KMatrix:
        """The 2r x a matrix of phi in the tagged basis of W."""
        return self.A.vstack(self.B)

    def tail(self, j, i, ctx: CuspRingContext) -> PSeries:
        if self.H is None:
            return ctx.zero()
        return self.H[j][i].with_precision(ctx.precision)

    def __eq__(self, other):
        if not isinstance(other, PhiMap):
            return NotImplemented
        return (self.a, self.r, self.A, self.B, self.H) == (other.a, other.r, other.A, other.B, other.H)

    def __hash__(self):
        return hash((self.a, self.r, self.A, self.B))

    def __repr__(self):
        return f"PhiMap(a={self.a}, r={self.r}, A={self.A!r}, B={self.B!r}, H={'0' if self.H is None else '...'})"


class WSpace:
    """W with its tagged basis; index order 1(x)s_1..1(x)s_r, t(x)s_1..t(x)s_r."""

    def __init__(self, r: int):
        self.r = r
        self.labels = [("1", j) for j in range(r)] + [("t", j) for j in range(r)]

    @property
    def dim(self) -> int:
        return 2 * self.r

    def index(self, label) -> int:
        return self.labels.index(label)


FIBER_LABELS = ("E", "Eω")


def mu(r: int, field: Field) -> KMatrix:
    """Matrix of W -> E(p) + (E (x) omega)(p) in the tagged bases.

    1 (x) s_j goes to the fiber vector s_j; t (x) s_j goes to s_j (x) dt.
    Target coordinates: E-fiber block first, then the omega-twisted block.
    """
    W = WSpace(r)
    target = [(FIBER_LABELS[0], j) for j in range(r)] + [(FIBER_LABELS[1], j) for j in range(r)]
    rule = {"1": FIBER_LABELS[0], "t": FIBER_LABELS[1]}
    M = [[0] * W.dim for _ in range(W.dim)]
    for col, (tag, j) in enumerate(W.labels):
        M[target.index((rule[tag], j))][col] = 1
    return KMatrix(M, field, ncols=W.dim)


def is_injective(phi: PhiMap) -> bool:
    return phi.stacked().rank() == phi.a


@dataclass(frozen=True, eq=False)
class PushoutPresentation:
    """(O^a + m^r) / {(x, -phi_P(x)) : x in m^a}, realized when torsion-free."""

    phi: PhiMap
    precision: int
    lattice: Lattice | None

    @property
    def a(self):
        return self.phi.a

    @property
    def r(self):
        return self.phi.r

    @property
    def torsion_free(self) -> bool:
        return self.lattice is not None


def lift_vectors(phi: PhiMap, ctx: CuspRingContext):
    """u_i = sum_j (a_ij + b_ij t + h_ij t^2) e_j, the images of the e_i."""
    out = []
    for i in range(phi.a):
        out.append(tuple(ctx.t(0, phi.A[j, i]) + ctx.t(1, phi.B[j, i])
                         + phi.tail(j, i, ctx).shift(2) for j in range(phi.r)))
    return out


def pushout(phi: PhiMap, ctx: CuspRingContext | None = None) -> PushoutPresentation:
    """Pushout of phi_P and the inclusion m^a -> O^a.

    When phi is injective the class of (x, y) maps to psi(x) + y inside
    R-bar^r, where psi(e_i) = phi_P(t^2 e_i) / t^2 = u_i; the image is the
    lattice generated by the u_i and by m^r.
    """
    if ctx is None:
        N = DEFAULT_PRECISION
        if phi.H is not None:
            N = phi.H[0][0].precision
        ctx = CuspRingContext(phi.field, N)
    if ctx.precision < 6:
        raise PrecisionError("pushout needs working precision >= 6")
    if not is_injective(phi):
        return PushoutPresentation(phi, ctx.precision, None)
    r = phi.r
    gens = list(lift_vectors(phi, ctx))
    for j in range(r):
        for k in (2, 3):
            gens.append(tuple(ctx.t(k) if jj == j else ctx.zero() for jj in range(r)))
    return PushoutPresentation(phi, ctx.precision, Lattice(r, tuple(gens), ctx))


@dataclass(frozen=True)
class TorsionWitness:
    v: tuple  # constant part in k^a, nonzero
    y: tuple  # -t^2 sum_i v_i h_i, in m^r


def torsion_search(P: PushoutPresentation):
    """A nonzero class killed by t^2, or None.

    Solves for v in k^a with phi_P(t^2 v) - t^4 sum v_i h_i = 0, collecting
    the series coefficients of each phi_P(t^2 e_i) - t^4 h_i as columns.
    The class of (v, -t^2 sum v_i h_i) is then nonzero since v is not in
    m^a, while t^2 times it is the relation (t^2 v, -phi_P(t^2 v)).
    """
    phi = P.phi
    ctx = CuspRingContext(phi.field, P.precision)
    if phi.a == 0:
        return None
    cols = []
    for i in range(phi.a):
        col = []
        for j in range(phi.r):
            # phi_P(t^2 e_i) - t^4 h_i
            val = ctx.t(2, phi.A[j, i]) + ctx.t(3, phi.B[j, i])
            col.extend(val.coeffs)
        cols.append(col)
    system = KMatrix.from_columns(cols, phi.field, phi.r * (ctx.precision + 1))
    ker = kernel_basis(system)
    if not ker:
        return None
    v = ker[0]
    y = []
    for j in range(phi.r):
        acc = ctx.zero()
        for i, vi in enumerate(v):
            acc = acc - phi.tail(j, i, ctx).shift(2) * vi
        y.append(acc)
    return TorsionWitness(tuple(v), tuple(y))


def extract_phi(M: Lattice):
    """(PhiMap, Decomposition) whose pushout reconstructs M.

    In the frame of the decomposition, M = R^a + R-bar^b and the kernel of
    M -> k^a is E_P = m^a + R-bar^b.  Multiplying the last b frame
    coordinates by t^2 identifies E_P with m^r; then M becomes
    R^a + m^b = R e_1 + ... + R e_a + m^r, so u_i = e_i and phi = [I_a; 0].
    """
    dec = decompose(M)
    F, r, a = M.field, M.rank, dec.a
    A = KMatrix([[1 if (i == j) else 0 for j in range(a)] for i in range(r)], F, ncols=a)
    B = KMatrix.zeros(F, r, a)
    return PhiMap(a, r, A, B), dec


def frame_to_original(dec: Decomposition, y):
    """Pushout coordinates -> coordinates of the original lattice.

    Undo the t^2 scaling on the last b coordinates, then apply the frame.
    """
    M = dec.lattice
    a = dec.a
    unscaled = []
    for i, x in enumerate(y):
        if i >= a:
            x = x.shift_down(2).with_precision(M.precision)
        unscaled.append(x)
    fr = dec.frame()
    acc = tuple(M.ctx.zero() for _ in range(M.rank))
    for c, f in zip(unscaled, fr):
        acc = tuple(s + fi * c for s, fi in zip(acc, f))
    return acc


def original_to_frame(dec: Decomposition, x):
    y = dec.frame_coordinates(x)
    return tuple(c.shift(2) if i >= dec.a else c for i, c in enumerate(y))


def reconstruction_matches(M: Lattice, phi: PhiMap, dec: Decomposition | None = None) -> bool:
    """Extension-level round trip: the pushout of phi equals M after the frame change.

    Checks both inclusions generator by generator with exact membership.
    """
    N = M.precision + M.structure.delta + 4
    Mh = M.with_precision(N)
    dec = decompose(Mh)
    if phi.a != dec.a:
        return False
    P = pushout(phi, Mh.ctx)
    if P.lattice is None:
        return False
    L = P.lattice
    if not all(contains(Mh, frame_to_original(dec, g)) for g in L.generators):
        return False
    return all(contains(L, original_to_frame(dec, g)) for g in Mh.generators)


def lift_class_normalize(phi: PhiMap, psi) -> PhiMap:
    """Modify phi by a map O^a -> E given as an r x a array of sections.

    The sections land in E_P = m^r, i.e. they change the lifts u_i by
    t^2 psi_i, which only moves the tails H; A and B are untouched.
    """
    if isinstance(psi, KMatrix):
        N = phi.H[0][0].precision if phi.H is not None else DEFAULT_PRECISION
        psi = tuple(tuple(PSeries.constant(phi.field, N, psi[j, i]) for i in range(phi.a))
                    for j in range(phi.r))
    psi = tuple(tuple(row) for row in psi)
    if len(psi) != phi.r or any(len(row) != phi.a for row in psi):
        raise InvariantError("psi must be an r x a array")
    if phi.a == 0:
        return phi
    N = psi[0][0].precision
    ctx = CuspRingContext(phi.field, N)
    H = tuple(tuple(phi.tail(j, i, ctx) + psi[j][i] for i in range(phi.a)) for j in range(phi.r))
    return PhiMap(phi.a, phi.r, phi.A, phi.B, H)


def semirank_from_jets(phi: PhiMap) -> int:
    """Semirank of the pushout lattice predicted from A and B alone.

    The pushout L contains t^2 R-bar^r and L / t^2 R-bar^r is the column
    span U of [A; B]; the saturation modulo t^2 is spanned by U and t U,
    i.e. by the columns of [[A, 0], [B, A]].  Counting minimal generators
    gives semirank = rank [[A, 0], [B, A]] - a.
    """
    A, B = phi.A, phi.B
    Z = KMatrix.zeros(phi.field, phi.r, phi.a)
    big = A.hstack(Z).vstack(B.hstack(A))
    return big.rank() - phi.a


def classify_semirank(phi: PhiMap, ctx: CuspRingContext | None = None) -> dict:
    """Compare the semirank of pushout(phi) with a.

    Mismatches are sorted by the E-fiber projection of V (the matrix A):
    ``zero_fiber_projection`` when A = 0, ``deficient_fiber_projection``
    when 0 < rank A < a, ``unexplained`` otherwise.
    """
    if not is_injective(phi):
        raise MathPreconditionError("phi is not injective; the pushout has torsion")
    P = pushout(phi, ctx)
    observed = decompose(P.lattice).a
    rankA = phi.A.rank()
    if observed == phi.a:
        family = "match"
    elif rankA == 0:
        family = "zero_fiber_projection"
    elif rankA < phi.a:
        family = "deficient_fiber_projection"
    else:
        family = "unexplained"
    return {"expected": phi.a, "observed": observed, "fiber_rank": rankA,
            "predicted": semirank_from_jets(phi), "family": family,
            "match": observed == phi.a}
