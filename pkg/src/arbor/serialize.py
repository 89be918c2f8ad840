"""JSON round-trips for every exact object and the published file formats.

Rationals are serialized as strings "p/q" (or "p") so no consumer ever
sees a rounded value.  Formats carry a ``schema_version`` field.
"""
from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources

from .buildings import Attachment, Block, BuildingGraph, BuildingProbe, Face
from .flows import BumpCutoff, EarthquakeSpec, PolyFault
from .rational import Mat, rat
from .symplin import LagrangianPlane, Subspace, SymplecticSpace, lagrangian
from .trees import SignedRootedTree

SCHEMA_VERSION = 1


def rat_to_str(x: Fraction) -> str:
    x = rat(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def mat_to_json(m: Mat) -> list[list[str]]:
    return [[rat_to_str(x) for x in row] for row in m.rows]


def mat_from_json(rows, expect_rows: int | None = None) -> Mat:
    m = Mat([[rat(x) for x in row] for row in rows])
    if expect_rows is not None and m.nrows != expect_rows:
        raise ValueError(f"expected {expect_rows} rows, got {m.nrows}")
    return m


def cols_to_json(m: Mat) -> list[list[str]]:
    return [[rat_to_str(x) for x in col] for col in m.cols()]


def cols_from_json(cols, dim: int) -> Mat:
    if not cols:
        return Mat([[] for _ in range(dim)])
    return Mat.from_cols([[rat(x) for x in c] for c in cols])


def space_to_json(s: SymplecticSpace) -> dict:
    out: dict = {"dim_half": s.dim_half}
    if s != SymplecticSpace.standard(s.dim_half):
        out["form"] = mat_to_json(s.form)
    return out


def space_from_json(d: dict) -> SymplecticSpace:
    n = int(d["dim_half"])
    if "form" in d and d["form"] is not None:
        return SymplecticSpace(n, mat_from_json(d["form"], 2 * n))
    return SymplecticSpace.standard(n)


def subspace_to_json(s: Subspace) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "space": space_to_json(s.ambient),
        "columns": cols_to_json(s.basis),
    }


def subspace_from_json(d: dict, space: SymplecticSpace | None = None) -> Subspace:
    sp = space if space is not None else space_from_json(d["space"])
    return Subspace(sp, cols_from_json(d["columns"], sp.dim))


def plane_from_json(d: dict, space: SymplecticSpace | None = None) -> LagrangianPlane:
    sub = subspace_from_json(d, space)
    return LagrangianPlane(sub.ambient, sub.basis)


# trees -----------------------------------------------------------------------

def tree_to_json(t: SignedRootedTree) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "vertices": t.vertex_count,
        "root": t.root,
        "edges": [list(e) for e in t.edges],
        "signs": {f"{u}-{v}": s for ((u, v), s) in t.signs},
    }


def tree_from_json(d: dict) -> SignedRootedTree:
    signs = {}
    for key, s in (d.get("signs") or {}).items():
        u, v = key.split("-")
        signs[(int(u), int(v))] = int(s)
    return SignedRootedTree.make(int(d["vertices"]), int(d["root"]), [tuple(e) for e in d["edges"]], signs)


# buildings --------------------------------------------------------------------

def building_to_json(g: BuildingGraph, probes=(), space: SymplecticSpace | None = None) -> dict:
    out = {
        "schema_version": SCHEMA_VERSION,
        "blocks": [
            {
                "id": b.id,
                "base": b.base,
                "faces": [{"id": f.id, "nucleus": f.nucleus} for f in b.faces],
                "hypersurfaces": [{"id": f.id, "nucleus": f.nucleus} for f in b.hypersurfaces],
            }
            for b in g.blocks
        ],
        "attachments": [{"upper": a.upper, "face": a.face, "lower": a.lower} for a in g.attachments],
    }
    if space is not None:
        out["space"] = space_to_json(space)
    if probes:
        out["probes"] = [probe_to_json(p) for p in probes]
    return out


def probe_to_json(p: BuildingProbe) -> dict:
    out = {
        "block": p.block,
        "type_index": list(p.type_index),
        "tangent": cols_to_json(p.tangent.basis),
        "verticals": {str(i): cols_to_json(v.basis) for i, v in p.verticals},
        "liouville": {str(i): [rat_to_str(x) for x in z.col(0)] for i, z in p.liouville},
    }
    if p.eta is not None:
        out["eta"] = cols_to_json(p.eta.basis)
    return out


def probe_from_json(d: dict, space: SymplecticSpace) -> BuildingProbe:
    tangent = lagrangian(space, cols_from_json(d["tangent"], space.dim))
    verticals = {int(k): lagrangian(space, cols_from_json(v, space.dim)) for k, v in d["verticals"].items()}
    liouville = {int(k): Mat.col_vector([rat(x) for x in v]) for k, v in d["liouville"].items()}
    eta = None
    if d.get("eta") is not None:
        eta = lagrangian(space, cols_from_json(d["eta"], space.dim))
    return BuildingProbe.make(space, int(d["block"]), tuple(d["type_index"]), tangent, verticals, liouville, eta)


def building_from_json(d: dict) -> tuple[BuildingGraph, list[BuildingProbe], SymplecticSpace | None]:
    blocks = tuple(
        Block(
            b["id"],
            b["base"],
            tuple(Face(f["id"], f["nucleus"]) for f in b.get("faces", ())),
            tuple(Face(f["id"], f["nucleus"]) for f in b.get("hypersurfaces", ())),
        )
        for b in d["blocks"]
    )
    atts = tuple(Attachment(a["upper"], a["face"], a["lower"]) for a in d.get("attachments", ()))
    g = BuildingGraph(blocks, atts)
    space = space_from_json(d["space"]) if "space" in d else None
    probes = []
    for pd in d.get("probes", ()):
        if space is None:
            raise ValueError("probes require a 'space' entry")
        probes.append(probe_from_json(pd, space))
    return g, probes, space


# earthquakes -------------------------------------------------------------------

def quake_to_json(e: EarthquakeSpec) -> dict:
    faults = []
    for f in e.faults:
        faults.append({"terms": {",".join(str(x) for x in k): v for k, v in f.terms.items()}})
    return {
        "schema_version": SCHEMA_VERSION,
        "dim": e.dim,
        "t": e.t,
        "faults": faults,
        "cutoffs": [{"r0": c.r0, "r1": c.r1} for c in e.cutoffs],
    }


def quake_from_json(d: dict) -> EarthquakeSpec:
    dim = int(d["dim"])
    faults = []
    for f in d["faults"]:
        if "affine" in f:
            faults.append(PolyFault.affine(f["affine"]["a"], f["affine"].get("b", 0.0)))
        else:
            terms = {tuple(int(x) for x in k.split(",")): float(v) for k, v in f["terms"].items()}
            faults.append(PolyFault(dim, terms))
    cutoffs = tuple(BumpCutoff(c.get("r0", 0.5), c.get("r1", 1.0)) for c in d.get("cutoffs", [{}] * len(faults)))
    return EarthquakeSpec(dim, tuple(faults), cutoffs, float(d.get("t", 1.0)))


# schema loading -----------------------------------------------------------------

def load_schema(name: str) -> dict:
    with resources.files("arbor.schema").joinpath(name).open("r", encoding="utf-8") as fh:
        return json.load(fh)


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
