"""Signed rooted trees: canonical forms, enumeration, sign negation, counts.

A signed rooted tree is a finite tree with a distinguished root and a sign
in {+1, -1} on every edge *not* adjacent to the root; root-adjacent edges
carry no sign.  Trees classify the local singularity models, and the two
counts attached to a tree are 2^(#edges) (the torsor of gluing data) and
2^(#root-adjacent edges) (isomorphism classes of orientation structures).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache


def _norm_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class SignedRootedTree:
    vertex_count: int
    root: int
    edges: tuple[tuple[int, int], ...]
    signs: tuple[tuple[tuple[int, int], int], ...]  # ((u, v), +-1), sorted

    @staticmethod
    def make(vertex_count: int, root: int, edges, signs=None) -> "SignedRootedTree":
        es = tuple(sorted(_norm_edge(u, v) for (u, v) in edges))
        sg = tuple(sorted((_norm_edge(u, v), int(s)) for (u, v), s in (signs or {}).items()))
        return SignedRootedTree(vertex_count, root, es, sg)

    def __post_init__(self):
        k = self.vertex_count
        if k < 1:
            raise ValueError("need at least one vertex")
        if not (0 <= self.root < k):
            raise ValueError("root out of range")
        if len(self.edges) != k - 1:
            raise ValueError("a tree on k vertices has k-1 edges")
        adj = self.adjacency()
        for (u, v) in self.edges:
            if not (0 <= u < k and 0 <= v < k) or u == v:
                raise ValueError(f"bad edge {(u, v)}")
        # connectivity
        seen = {self.root}
        stack = [self.root]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != k:
            raise ValueError("graph is not connected")
        signed = dict(self.signs)
        expected = {e for e in self.edges if self.root not in e}
        if set(signed) != expected:
            raise ValueError("signs must cover exactly the edges not adjacent to the root")
        if any(s not in (1, -1) for s in signed.values()):
            raise ValueError("signs must be +1 or -1")

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {i: [] for i in range(self.vertex_count)}
        for (u, v) in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def sign(self, u: int, v: int) -> int:
        return dict(self.signs)[_norm_edge(u, v)]

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def root_edges(self) -> list[tuple[int, int]]:
        return [e for e in self.edges if self.root in e]

    def root_components(self) -> dict[int, set[int]]:
        """Vertex sets of the components of the tree minus its root, keyed by
        the root-adjacent vertex they contain."""
        adj = self.adjacency()
        comps: dict[int, set[int]] = {}
        for c in adj[self.root]:
            seen = {self.root, c}
            stack = [c]
            comp = {c}
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        comp.add(y)
                        stack.append(y)
            comps[c] = comp
        return comps


def canonical_form(t: SignedRootedTree) -> str:
    """Canonical encoding: equal strings iff isomorphic as signed rooted trees.

    Recursive subtree canonicalization with children sorted; the edge sign
    ('+' or '-') prefixes each child encoding except directly under the
    root, whose edges are unsigned.
    """
    adj = t.adjacency()
    signed = dict(t.signs)

    def enc(v: int, parent: int | None) -> str:
        tokens = []
        for w in adj[v]:
            if w == parent:
                continue
            prefix = ""
            if v != t.root:
                prefix = "+" if signed[_norm_edge(v, w)] == 1 else "-"
            tokens.append(prefix + enc(w, v))
        return "(" + "".join(sorted(tokens)) + ")"

    return enc(t.root, None)


def isomorphic(a: SignedRootedTree, b: SignedRootedTree) -> bool:
    return canonical_form(a) == canonical_form(b)


# enumeration ---------------------------------------------------------------
#
# An "inner shape" is a rooted tree in which *every* edge below the local
# root is signed; branches hanging off the global root are inner shapes
# (their top edge, being root-adjacent, is unsigned).  Shapes are nested
# tuples: (child, child, ...) where child = (sign, shape) with sign 0 at
# the top level.

@lru_cache(maxsize=None)
def _inner_shapes(k: int) -> tuple:
    """All canonical inner shapes with k vertices, sorted."""
    if k == 1:
        return (tuple(),)
    shapes = set()
    for mult in _child_multisets(k - 1, signed=True):
        shapes.add(tuple(sorted(mult)))
    return tuple(sorted(shapes))


def _child_multisets(total: int, signed: bool):
    """Multisets of (sign, shape) children using exactly `total` vertices."""
    options = []
    for size in range(1, total + 1):
        for sh in _inner_shapes(size):
            if signed:
                options.append((size, (1, sh)))
                options.append((size, (-1, sh)))
            else:
                options.append((size, (0, sh)))
    options.sort(key=lambda o: (o[0], o[1]))

    def rec(remaining: int, start: int):
        if remaining == 0:
            yield []
            return
        for idx in range(start, len(options)):
            size, item = options[idx]
            if size > remaining:
                continue
            for rest in rec(remaining - size, idx):
                yield [item] + rest

    yield from rec(total, 0)


def _shape_to_tree(children: tuple) -> SignedRootedTree:
    """Materialize a top-level shape (multiset of unsigned branches)."""
    edges = []
    signs = {}
    counter = itertools.count(1)

    def build(parent: int, sign: int, shape: tuple, under_root: bool):
        v = next(counter)
        edges.append((parent, v))
        if not under_root:
            signs[_norm_edge(parent, v)] = sign
        for (s, sub) in shape:
            build(v, s, sub, False)
        return v

    for (s, shape) in children:
        build(0, s, shape, True)
    k = next(counter)
    return SignedRootedTree.make(k, 0, edges, signs)


def enumerate_trees(max_vertices: int) -> list[SignedRootedTree]:
    """One representative per isomorphism class with at most max_vertices vertices.

    Output is deterministic: sorted by vertex count, then by canonical
    encoding.
    """
    if max_vertices < 1:
        raise ValueError("max_vertices must be >= 1")
    out = []
    for k in range(1, max_vertices + 1):
        reps = set()
        if k == 1:
            reps.add(tuple())
        else:
            for mult in _child_multisets(k - 1, signed=False):
                reps.add(tuple(sorted(mult)))
        for shape in sorted(reps):
            out.append(_shape_to_tree(shape))
    out.sort(key=lambda t: (t.vertex_count, canonical_form(t)))
    return out


def brute_force_class_count(max_vertices: int) -> int:
    """Independent oracle: all labeled trees (Prufer) with all sign maps, deduped."""
    total = 0
    for k in range(1, max_vertices + 1):
        seen = set()
        for edges in _labeled_trees(k):
            unsigned = [e for e in edges if 0 not in e]
            for bits in itertools.product((1, -1), repeat=len(unsigned)):
                signs = dict(zip(unsigned, bits))
                t = SignedRootedTree.make(k, 0, edges, signs)
                seen.add(canonical_form(t))
        total += len(seen)
    return total


def _labeled_trees(k: int):
    if k == 1:
        yield []
        return
    if k == 2:
        yield [(0, 1)]
        return
    for seq in itertools.product(range(k), repeat=k - 2):
        yield _prufer_to_edges(list(seq), k)


def _prufer_to_edges(seq: list[int], k: int) -> list[tuple[int, int]]:
    degree = [1] * k
    for x in seq:
        degree[x] += 1
    edges = []
    import heapq

    leaves = [i for i in range(k) if degree[i] == 1]
    heapq.heapify(leaves)
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append(_norm_edge(leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    edges.append(_norm_edge(u, v))
    return edges


# sign negation and counts --------------------------------------------------

def negate_components(t: SignedRootedTree, components) -> SignedRootedTree:
    """Flip the signs of all edges inside the chosen components of T minus root.

    Components are named by their root-adjacent vertex.  Root-adjacent
    edges carry no sign, so double application is the identity.
    """
    comps = t.root_components()
    chosen = set(components)
    unknown = chosen - set(comps)
    if unknown:
        raise ValueError(f"not root components: {sorted(unknown)}")
    flip_vertices = set().union(*(comps[c] for c in chosen)) if chosen else set()
    new_signs = {}
    for (e, s) in t.signs:
        u, v = e
        if u in flip_vertices and v in flip_vertices:
            new_signs[e] = -s
        else:
            new_signs[e] = s
    return SignedRootedTree.make(t.vertex_count, t.root, t.edges, new_signs)


@dataclass(frozen=True)
class OrientationClassCount:
    tree: SignedRootedTree
    torsor_size: int
    iso_classes: int

    def __post_init__(self):
        if self.torsor_size != 2 ** self.tree.edge_count:
            raise ValueError("torsor_size must be 2^(#edges)")
        if self.iso_classes != 2 ** len(self.tree.root_edges()):
            raise ValueError("iso_classes must be 2^(#root edges)")


def orientation_counts(t: SignedRootedTree) -> OrientationClassCount:
    """Torsor size 2^(#edges); isomorphism classes 2^(#root-adjacent edges)."""
    return OrientationClassCount(t, 2 ** t.edge_count, 2 ** len(t.root_edges()))


def cech_gluing_assignments(t: SignedRootedTree) -> list[dict[tuple[int, int], int]]:
    """Explicit descent data for the recursive cover: one sign per edge.

    The cover has one neighborhood per vertex (the core open at each
    induction level) and one connected overlap per edge; a line bundle
    with fixed piecewise identifications is a sign on each overlap.
    Enumerated explicitly so the torsor size can be counted, not assumed.
    """
    overlaps = _recursive_overlaps(t, t.root, None)
    out = []
    for bits in itertools.product((1, -1), repeat=len(overlaps)):
        out.append(dict(zip(overlaps, bits)))
    return out


def _recursive_overlaps(t, v, parent) -> list[tuple[int, int]]:
    adj = t.adjacency()
    acc = []
    for w in adj[v]:
        if w == parent:
            continue
        acc.append(_norm_edge(v, w))
        acc.extend(_recursive_overlaps(t, w, v))
    return acc


def coorientation_choices(t: SignedRootedTree) -> list[dict[int, int]]:
    """One independent coorientation per component of the front hypersurface.

    The front components correspond to the root-adjacent edges; flipping
    the choice on a component is the move that produces a non-isomorphic
    orientation structure, so the number of choices is the class count.
    """
    comps = sorted(t.root_components())
    return [dict(zip(comps, bits)) for bits in itertools.product((1, -1), repeat=len(comps))]
