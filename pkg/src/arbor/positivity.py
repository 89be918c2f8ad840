"""The ternary positivity relation on Lagrangian planes and its consequences.

``compare(L, tau, nu)`` classifies the graph form of L over tau (vertical
nu) as positive definite ("succ"), negative definite ("prec") or "neither".
On top of that sit cyclic orderings of plane tuples, positive zones,
reduction compatibility, conormal transversality of definite graphs, and
the exact convex search for a common negative plane.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .rational import (
    F1,
    Mat,
    gershgorin_lower_bound,
    is_positive_definite_ldl,
    is_positive_semidefinite,
)
from .symplin import (
    LagrangianPlane,
    QuadraticForm,
    Subspace,
    SymplecticReduction,
    graph_form,
    is_coisotropic,
    is_positive_definite,
    lagrangian_complement,
    plane_from_graph_form,
    transverse,
)

SUCC = "succ"
PREC = "prec"
NEITHER = "neither"


@dataclass(frozen=True)
class PositivityVerdict:
    relation: str  # succ | prec | neither
    witness: QuadraticForm

    def __post_init__(self):
        if self.relation not in (SUCC, PREC, NEITHER):
            raise ValueError(f"unknown relation {self.relation!r}")


@dataclass(frozen=True)
class PlaneTuple:
    ambient: object
    planes: tuple[LagrangianPlane, ...]

    def __post_init__(self):
        if len(self.planes) < 3:
            raise ValueError("a plane tuple needs at least 3 planes")


def compare(L: LagrangianPlane, tau: LagrangianPlane, nu: LagrangianPlane) -> PositivityVerdict:
    """succ iff the graph form of L over (tau, nu) is positive definite,
    prec iff negative definite, neither otherwise.

    Raises when L or tau fails to be transverse to nu (relation undefined).
    """
    q = graph_form(L, tau, nu)
    if is_positive_definite(q):
        return PositivityVerdict(SUCC, q)
    if is_positive_definite(QuadraticForm(q.dim, -q.matrix)):
        return PositivityVerdict(PREC, q)
    return PositivityVerdict(NEITHER, q)


def _cyclic_triples(m: int):
    """All index triples (i1, i2, i3) that are cyclically ordered in Z/m."""
    for i in range(m):
        for j in range(m):
            for k in range(m):
                if len({i, j, k}) < 3:
                    continue
                if (j - i) % m < (k - i) % m:
                    yield (i, j, k)


def cyclic_order_failures(planes: Sequence[LagrangianPlane], direction: str) -> list[tuple]:
    """Failing cyclically ordered triples; transversality failures included.

    Entries are ('triple', (i1, i2, i3)) for relation failures and
    ('non-transverse', (i, j)) for pairs spoiling the tuple.  Checks all
    ordered triples, no shortcut.
    """
    if direction not in (SUCC, PREC):
        raise ValueError("direction must be succ or prec")
    fails: list[tuple] = []
    m = len(planes)
    for i in range(m):
        for j in range(i + 1, m):
            if not transverse(planes[i], planes[j]):
                fails.append(("non-transverse", (i, j)))
    if fails:
        return fails
    for (i1, i2, i3) in _cyclic_triples(m):
        # L_{i2} relates to tau = L_{i3} over vertical nu = L_{i1}
        v = compare(planes[i2], planes[i3], planes[i1])
        if v.relation != direction:
            fails.append(("triple", (i1, i2, i3)))
    return fails


def cyclically_ordered(t: PlaneTuple | Sequence[LagrangianPlane], direction: str) -> bool:
    """True iff every cyclically ordered triple satisfies the relation.

    Raises on a non-transverse pair, where the relation is undefined.
    """
    planes = t.planes if isinstance(t, PlaneTuple) else tuple(t)
    fails = cyclic_order_failures(planes, direction)
    for kind, idx in fails:
        if kind == "non-transverse":
            raise ValueError(f"planes {idx} are not transverse")
    return not fails


def in_positive_zone(L: LagrangianPlane, tau: LagrangianPlane, nu: LagrangianPlane) -> bool:
    """Membership of L in the zone of the polarization (tau, nu).

    False (never an error) when L is not transverse to nu.
    """
    if not transverse(tau, nu):
        raise ValueError("(tau, nu) is not a polarization")
    if not transverse(L, nu):
        return False
    return compare(L, tau, nu).relation == SUCC


def sample_in_zone(tau: LagrangianPlane, nu: LagrangianPlane, pd_matrix: Mat) -> LagrangianPlane:
    """The plane in the (tau, nu) zone whose graph form is the given PD matrix."""
    if not is_positive_definite(QuadraticForm(pd_matrix.nrows, pd_matrix)):
        raise ValueError("sample matrix must be positive definite")
    return plane_from_graph_form(pd_matrix, tau, nu)


def find_common_negative(planes: Sequence[LagrangianPlane], L: LagrangianPlane) -> LagrangianPlane:
    """A plane L_minus whose zone over L contains every given plane.

    Fix an auxiliary Lagrangian H transverse to L; each T becomes a
    quadratic form Q_T on H.  An exact rational lower bound below every
    Q_T (Gershgorin seed, certified by the LDL^T positive-definiteness
    test) gives a scalar form strictly below all of them, whose plane is
    the answer.  The result is post-verified with compare on every input.
    """
    planes = list(planes)
    if not planes:
        raise ValueError("need at least one plane")
    for i, t in enumerate(planes):
        if not transverse(t, L):
            raise ValueError(f"plane {i} is not transverse to L")
    h = lagrangian_complement(L)
    n = L.ambient.dim_half
    bound = None
    for t in planes:
        q = graph_form(t, h, L).matrix
        c = gershgorin_lower_bound(q) - 1
        gap = q - Mat.identity(n).scale(c)
        if not is_positive_definite_ldl(gap):
            raise AssertionError("certified lower bound failed")
        bound = c if bound is None else min(bound, c)
    qminus = Mat.identity(n).scale(bound - 1)
    lminus = plane_from_graph_form(qminus, h, L)
    for i, t in enumerate(planes):
        if compare(t, lminus, L).relation != SUCC:
            raise AssertionError(f"post-verification failed on plane {i}")
    return lminus


def reduction_preserves_zone_check(
    L: LagrangianPlane,
    tau: LagrangianPlane,
    nu: LagrangianPlane,
    w: Subspace,
) -> bool:
    """Does the reduction by W send L into the closed zone of the reduced polarization?

    Closed-zone membership is positive semidefiniteness of the reduced
    graph form (definiteness is then automatic exactly when the reduced L
    is transverse to the reduced tau).  Preconditions: W coisotropic and
    L in the open zone of (tau, nu).
    """
    if not is_coisotropic(w):
        raise ValueError("W must be coisotropic")
    if not in_positive_zone(L, tau, nu):
        raise ValueError("L must lie in the positive zone of (tau, nu)")
    red = SymplecticReduction(w)
    lr = red.reduce_lagrangian(L)
    tr = red.reduce_lagrangian(tau)
    nr = red.reduce_lagrangian(nu)
    if lr.ambient.dim_half == 0:
        return True
    if not transverse(tr, nr) or not transverse(lr, nr):
        return False
    q = graph_form(lr, tr, nr)
    return is_positive_semidefinite(q.matrix)


# conormal transversality ---------------------------------------------------

def conormal_transversality(q: QuadraticForm, h_covector: Sequence) -> bool:
    """Is the conormal of ker(h) transverse to the graph plane {p = M q}?

    The intersection is cut out by M x = t*h, h(x) = 0; transversality is
    invertibility of the bordered matrix [[M, -h], [h^T, 0]], decided
    exactly.
    """
    from .rational import rat

    a = [rat(x) for x in h_covector]
    if all(x == 0 for x in a):
        raise ValueError("covector must be nonzero")
    n = q.dim
    if len(a) != n:
        raise ValueError("covector length must match the form dimension")
    rows = [list(q.matrix.rows[i]) + [-a[i]] for i in range(n)]
    rows.append(list(a) + [rat(0)])
    return Mat(rows).det() != 0


def failing_hyperplane_from_null(q: QuadraticForm, v: Mat) -> list:
    """A covector whose hyperplane's conormal meets the graph of q, from a null vector.

    Given v != 0 with q(v) = 0: if Mv != 0 then h = Mv works (v lies in
    ker h and Mv is proportional to h); otherwise any covector
    annihilating v works.
    """
    from .rational import F0

    if v.is_zero():
        raise ValueError("null vector must be nonzero")
    if q.value(v) != 0:
        raise ValueError("v is not a null vector of the form")
    mv = q.matrix @ v
    if not mv.is_zero():
        return [mv.rows[i][0] for i in range(q.dim)]
    comps = [v.rows[i][0] for i in range(q.dim)]
    i = next(i for i, x in enumerate(comps) if x != 0)
    j = (i + 1) % q.dim
    h = [F0] * q.dim
    if q.dim == 1:
        raise ValueError("no annihilating covector exists in dimension 1")
    h[j], h[i] = comps[i], -comps[j]
    return h
