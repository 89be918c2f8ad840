"""Combinatorial cotangent buildings and pointwise positivity verification.

A building is recorded purely combinatorially (blocks, boundary faces,
vertical attachments, one skeleton piece per block).  The analytic
content lives in probes: the linear data at a point of the skeleton
(tangent plane, vertical planes, Liouville vectors, an optional candidate
distribution plane), verified by exact reductions and cyclic orderings.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Mapping, Sequence

from .rational import Mat, is_positive_definite_minors
from .positivity import PREC, SUCC, compare, cyclic_order_failures
from .symplin import (
    LagrangianPlane,
    Subspace,
    SymplecticReduction,
    SymplecticSpace,
    is_isotropic,
    plane_from_graph_form,
    symplectic_complement,
    transverse,
)


# combinatorial layer --------------------------------------------------------

@dataclass(frozen=True)
class Face:
    id: str
    nucleus: str


@dataclass(frozen=True)
class Block:
    id: str
    base: str
    faces: tuple[Face, ...] = ()
    hypersurfaces: tuple[Face, ...] = ()

    def __post_init__(self):
        ids = [f.id for f in self.faces] + [f.id for f in self.hypersurfaces]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate face ids in block {self.id}")


@dataclass(frozen=True)
class Attachment:
    upper: str
    face: str
    lower: str


@dataclass(frozen=True)
class BuildingGraph:
    blocks: tuple[Block, ...]
    attachments: tuple[Attachment, ...] = ()

    def __post_init__(self):
        ids = [b.id for b in self.blocks]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate block ids")
        order = {b.id: i for i, b in enumerate(self.blocks)}
        used = set()
        for a in self.attachments:
            if a.upper not in order or a.lower not in order:
                raise ValueError(f"attachment references unknown block: {a}")
            if order[a.upper] <= order[a.lower]:
                raise ValueError(f"attachment must glue a later block onto an earlier one: {a}")
            key = (a.upper, a.face)
            if key in used:
                raise ValueError(f"face {a.face} of block {a.upper} used twice")
            used.add(key)
            upper = self.blocks[order[a.upper]]
            if a.face not in {f.id for f in upper.faces}:
                raise ValueError(f"block {a.upper} has no face {a.face}")

    def block(self, block_id: str) -> Block:
        for b in self.blocks:
            if b.id == block_id:
                return b
        raise KeyError(block_id)

    @property
    def skeleton_pieces(self) -> frozenset[str]:
        return frozenset(b.id for b in self.blocks)

    def used_faces(self) -> set[tuple[str, str]]:
        return {(a.upper, a.face) for a in self.attachments}

    def is_connected(self) -> bool:
        if len(self.blocks) <= 1:
            return True
        adj: dict[str, set[str]] = {b.id: set() for b in self.blocks}
        for a in self.attachments:
            adj[a.upper].add(a.lower)
            adj[a.lower].add(a.upper)
        seen = {self.blocks[0].id}
        stack = [self.blocks[0].id]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(self.blocks)


def union(g1: BuildingGraph, g2: BuildingGraph) -> BuildingGraph:
    """Disjoint union; block order concatenates (g1 first, then g2)."""
    return BuildingGraph(g1.blocks + g2.blocks, g1.attachments + g2.attachments)


def vertical_glue(g: BuildingGraph, upper: str, lower: str, face: str) -> BuildingGraph:
    """Record the vertical gluing of a face of the upper block onto the lower one.

    Skeleton pieces are the union of both sides' pieces; a face may be
    used only once, and the upper block must come later in block order.
    """
    if (upper, face) in g.used_faces():
        raise ValueError(f"face {face} of block {upper} already used")
    return BuildingGraph(g.blocks, g.attachments + (Attachment(upper, face, lower),))


def convert_nucleus(g: BuildingGraph, block: str, face: str, direction: str) -> BuildingGraph:
    """Exchange a boundary-face datum and an interior hypersurface datum.

    ``to_hypersurface`` then ``to_nucleus`` on the same datum is the
    identity on the graph; skeleton pieces are untouched.
    """
    b = g.block(block)
    if direction == "to_hypersurface":
        if (block, face) in g.used_faces():
            raise ValueError(f"face {face} of block {block} is glued; cannot convert")
        match = [f for f in b.faces if f.id == face]
        if not match:
            raise ValueError(f"block {block} has no face {face}")
        nb = replace(
            b,
            faces=tuple(sorted((f for f in b.faces if f.id != face), key=lambda f: f.id)),
            hypersurfaces=tuple(sorted(b.hypersurfaces + (match[0],), key=lambda f: f.id)),
        )
    elif direction == "to_nucleus":
        match = [f for f in b.hypersurfaces if f.id == face]
        if not match:
            raise ValueError(f"block {block} has no hypersurface {face}")
        nb = replace(
            b,
            faces=tuple(sorted(b.faces + (match[0],), key=lambda f: f.id)),
            hypersurfaces=tuple(sorted((f for f in b.hypersurfaces if f.id != face), key=lambda f: f.id)),
        )
    else:
        raise ValueError("direction must be to_hypersurface or to_nucleus")
    blocks = tuple(nb if x.id == block else x for x in g.blocks)
    return BuildingGraph(blocks, g.attachments)


def underlying_weinstein(g: BuildingGraph) -> BuildingGraph:
    """Convert every unglued boundary face; the result has no free faces."""
    out = g
    for b in g.blocks:
        for f in b.faces:
            if (b.id, f.id) not in g.used_faces():
                out = convert_nucleus(out, b.id, f.id, "to_hypersurface")
    return out


# pointwise probes ------------------------------------------------------------

@dataclass(frozen=True)
class BuildingProbe:
    """Linear data at a skeleton point of block j with type I = (i_1 < ... < i_m).

    ``verticals`` maps every i in I and j itself to a Lagrangian plane;
    ``liouville`` maps every i in I to a nonzero vector lying in the
    corresponding vertical plane.  The type is caller-supplied (it depends
    on block thickness, which the combinatorial layer does not model);
    only consistency is validated here.
    """

    space: SymplecticSpace
    block: int
    type_index: tuple[int, ...]
    tangent: LagrangianPlane
    verticals: tuple[tuple[int, LagrangianPlane], ...]
    liouville: tuple[tuple[int, Mat], ...]
    eta: LagrangianPlane | None = None

    @staticmethod
    def make(space, block, type_index, tangent, verticals: Mapping[int, LagrangianPlane],
             liouville: Mapping[int, Mat], eta=None) -> "BuildingProbe":
        return BuildingProbe(
            space,
            block,
            tuple(type_index),
            tangent,
            tuple(sorted(verticals.items())),
            tuple(sorted(liouville.items())),
            eta,
        )

    def __post_init__(self):
        i_list = self.type_index
        if list(i_list) != sorted(set(i_list)):
            raise ValueError("type index must be strictly increasing")
        if i_list and i_list[-1] >= self.block:
            raise ValueError("type indices must be smaller than the block index")
        vkeys = {k for k, _ in self.verticals}
        if vkeys != set(i_list) | {self.block}:
            raise ValueError("verticals must cover the type indices and the block")
        lkeys = {k for k, _ in self.liouville}
        if lkeys != set(i_list):
            raise ValueError("liouville vectors must cover exactly the type indices")
        vmap = dict(self.verticals)
        for i, z in self.liouville:
            if z.shape != (self.space.dim, 1) or z.is_zero():
                raise ValueError(f"liouville vector {i} must be a nonzero column")
            if not vmap[i].contains(z):
                raise ValueError(f"liouville vector {i} must lie in its vertical plane")
        if i_list:
            zmat = Mat.from_cols([tuple(z.col(0)) for _, z in self.liouville])
            if zmat.rank() != len(i_list):
                raise ValueError("liouville vectors must be linearly independent")
            span = Subspace(self.space, zmat)
            if not is_isotropic(span):
                raise ValueError("liouville vectors must span an isotropic subspace")

    def vertical(self, i: int) -> LagrangianPlane:
        return dict(self.verticals)[i]

    def z_vector(self, i: int) -> Mat:
        return dict(self.liouville)[i]


@dataclass(frozen=True)
class ProbeFailure:
    level: int  # the s for which the reduced tuple failed
    detail: str


@dataclass(frozen=True)
class PositivityReport:
    verdict: bool
    failures: tuple[ProbeFailure, ...]

    def __post_init__(self):
        if self.verdict != (not self.failures):
            raise ValueError("verdict must match emptiness of failures")


def span_reduction(space: SymplecticSpace, vectors: Sequence[Mat]) -> SymplecticReduction | None:
    """Reduction by the coisotropic orthogonal of the span; None for no vectors."""
    if not vectors:
        return None
    cols = [tuple(v.col(0)) for v in vectors]
    span = Subspace(space, Mat.from_cols(cols))
    if not is_isotropic(span):
        raise ValueError("vectors must span an isotropic subspace")
    w = symplectic_complement(span)
    return SymplecticReduction(w)


def reduce_by_span(plane: LagrangianPlane, vectors: Sequence[Mat]) -> LagrangianPlane:
    """The reduction of a plane by the span of the given isotropic vectors.

    An empty list is the identity.
    """
    red = span_reduction(plane.ambient, vectors)
    if red is None:
        return plane
    return red.reduce_lagrangian(plane)


def verify_probe_positivity(p: BuildingProbe) -> PositivityReport:
    """Check every suffix reduction of the probe's plane tuple for
    prec-cyclic order; failures are reported, never raised."""
    if not p.type_index:
        raise ValueError("probe positivity needs a nonempty type index")
    m = len(p.type_index)
    failures: list[ProbeFailure] = []
    for s in range(1, m + 1):
        suffix = p.type_index[s - 1 :]
        vectors = [p.z_vector(i) for i in suffix]
        try:
            red = span_reduction(p.space, vectors)
            planes = [p.tangent, p.vertical(p.block)] + [p.vertical(i) for i in reversed(suffix)]
            reduced = [red.reduce_lagrangian(pl) for pl in planes]
        except ValueError as e:
            failures.append(ProbeFailure(s, f"reduction failed: {e}"))
            continue
        fails = cyclic_order_failures(reduced, PREC)
        for kind, idx in fails:
            failures.append(ProbeFailure(s, f"{kind} at {idx}"))
    return PositivityReport(not failures, tuple(failures))


def verify_distribution_positivity(p: BuildingProbe) -> bool:
    """Pointwise positivity of the candidate distribution plane.

    Requires eta; true iff eta is transverse to the tangent plane and the
    reduced vertical lies in the zone of (reduced tangent, reduced eta).
    """
    if p.eta is None:
        raise ValueError("probe carries no distribution plane")
    if not transverse(p.eta, p.tangent):
        return False
    vectors = [p.z_vector(i) for i in p.type_index]
    red = span_reduction(p.space, vectors)
    if red is None:
        nu_r, t_r, eta_r = p.vertical(p.block), p.tangent, p.eta
    else:
        try:
            nu_r = red.reduce_lagrangian(p.vertical(p.block))
            t_r = red.reduce_lagrangian(p.tangent)
            eta_r = red.reduce_lagrangian(p.eta)
        except ValueError:
            return False
    if nu_r.ambient.dim_half == 0:
        return True
    if not transverse(t_r, eta_r) or not transverse(nu_r, eta_r):
        return False
    return compare(nu_r, t_r, eta_r).relation == SUCC


@dataclass(frozen=True)
class InfeasibleDistribution:
    probe_index: int
    constraint: str


def distinguished_vertical_subspace(p: BuildingProbe) -> Subspace:
    """The subspace of the block vertical dual to the Liouville span.

    Project each Liouville vector to the tangent plane along the vertical;
    the distinguished subspace pairs only against those projections:
    {v in nu_j : omega(v, w) = 0 for all tangent w annihilating the
    projections}.
    """
    nu = p.vertical(p.block)
    tau = p.tangent
    space = p.space
    if not p.type_index:
        return Subspace(space, Mat([[] for _ in range(space.dim)]))
    if not transverse(tau, nu):
        raise ValueError("vertical is not transverse to the tangent plane")
    system = tau.basis.hstack(nu.basis)
    projs = []
    for i in p.type_index:
        coeff = system.solve(p.z_vector(i))
        if coeff is None:
            raise AssertionError("decomposition failed")
        n = space.dim_half
        projs.append(tau.basis @ Mat([coeff.rows[r] for r in range(n)]))
    # tangent vectors annihilating all projections under omega
    pmat = Mat.from_cols([tuple(v.col(0)) for v in projs])
    ann_coeffs = (pmat.t() @ space.form @ tau.basis).nullspace()
    if ann_coeffs.ncols == 0:
        return Subspace(space, nu.basis)
    ann = tau.basis @ ann_coeffs
    cond = ann.t() @ space.form @ nu.basis  # conditions on vertical coefficients
    sol = cond.nullspace()
    basis = nu.basis @ sol if sol.ncols else Mat([[] for _ in range(space.dim)])
    return Subspace(space, basis)


def distribution_witness(p: BuildingProbe, scale: Fraction | int = 1) -> LagrangianPlane:
    """The canonical candidate: the graph over the block vertical whose form,
    in the chart with vertical tangent, is scale times the identity."""
    s = Fraction(scale)
    if s <= 0:
        raise ValueError("scale must be positive")
    nu = p.vertical(p.block)
    n = p.space.dim_half
    return plane_from_graph_form(Mat.identity(n).scale(s), nu, p.tangent)


def find_positive_distribution(probes: Sequence[BuildingProbe]):
    """A positive plane per probe, or the first violated constraint.

    The witness is a positive-definite graph over the block vertical; its
    positivity survives every reduction, so the constraint set (positive
    definiteness on the distinguished subspace) is met with room to spare.
    Each witness is post-verified.
    """
    out: dict[int, LagrangianPlane] = {}
    for idx, p in enumerate(probes):
        nu = p.vertical(p.block)
        if not transverse(nu, p.tangent):
            return InfeasibleDistribution(idx, "block vertical not transverse to tangent plane")
        try:
            d = distinguished_vertical_subspace(p)
        except ValueError as e:
            return InfeasibleDistribution(idx, str(e))
        eta = distribution_witness(p)
        # the witness form must be positive definite on the distinguished subspace
        if d.dim:
            m = compare(eta, nu, p.tangent).witness.matrix
            coords = nu.basis.solve(d.basis)
            if coords is None:
                return InfeasibleDistribution(idx, "distinguished subspace escapes the vertical plane")
            restricted = coords.t() @ m @ coords
            if not is_positive_definite_minors(restricted):
                return InfeasibleDistribution(idx, "witness form not positive on the distinguished subspace")
        candidate = replace(p, eta=eta)
        if not verify_distribution_positivity(candidate):
            return InfeasibleDistribution(idx, "witness failed reduced zone membership")
        out[idx] = eta
    return out
