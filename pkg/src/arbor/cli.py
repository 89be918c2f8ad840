"""Command-line entry point: enumeration, verification, feasibility search,
flow experiments and SVG rendering with machine-readable, deterministic output.

Exit codes: 0 success / all checks pass, 1 verification failures,
2 malformed input or usage errors.  Every run emits one manifest with a
digest of the result (wall time is excluded from the digest).
"""
from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import os
import sys
import time

import jsonschema

from . import __version__
from .buildings import InfeasibleDistribution, find_positive_distribution, verify_probe_positivity
from .flows import GridSpec, MorseBottModel, lyapunov_check, skeleton_estimate, transversality_scan
from .localmodels import render_front
from .positivity import PREC, SUCC, compare, cyclically_ordered
from .serialize import (
    building_from_json,
    canonical_dumps,
    load_schema,
    mat_to_json,
    plane_from_json,
    quake_from_json,
    rat_to_str,
    space_from_json,
    tree_from_json,
    tree_to_json,
)
from .trees import canonical_form, enumerate_trees, orientation_counts

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_MALFORMED = 2


class MalformedInput(Exception):
    pass


def _load_json_arg(text: str):
    """Accept an inline JSON string or a path to a JSON file."""
    s = text.strip()
    if s.startswith("{") or s.startswith("["):
        try:
            return json.loads(s)
        except json.JSONDecodeError as e:
            raise MalformedInput(f"inline JSON: {e}") from e
    try:
        with open(text, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise MalformedInput(f"cannot read {text}: {e}") from e
    except json.JSONDecodeError as e:
        raise MalformedInput(f"{text}: {e}") from e


def _digest(obj) -> str:
    return hashlib.sha256(canonical_dumps(obj).encode()).hexdigest()


def _emit(result: dict, subcommand: str, inputs: dict, out: str | None, started: float) -> None:
    envelope = {
        "schema_version": 1,
        "command": subcommand,
        "result": result,
        "manifest": {
            "subcommand": subcommand,
            "version": __version__,
            "input_digest": _digest(inputs),
            "result_digest": _digest(result),
            "wall_time_s": round(time.monotonic() - started, 6),
        },
    }
    text = json.dumps(envelope, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("ARBOR_THREADS", "1")))
    except ValueError:
        return 1


# subcommands -------------------------------------------------------------------

def cmd_trees_enumerate(args) -> int:
    started = time.monotonic()
    trees = enumerate_trees(args.max_vertices)
    rows = [
        {
            "canonical": canonical_form(t),
            "vertices": t.vertex_count,
            "tree": tree_to_json(t),
            "torsor_size": orientation_counts(t).torsor_size,
            "iso_classes": orientation_counts(t).iso_classes,
        }
        for t in trees
    ]
    result = {"count": len(rows), "classes": rows}
    if args.table:
        for r in rows:
            sys.stdout.write(f"{r['vertices']:3d}  {r['torsor_size']:6d}  {r['iso_classes']:6d}  {r['canonical']}\n")
        sys.stdout.write(f"total {len(rows)}\n")
        return EXIT_OK
    _emit(result, "trees enumerate", {"max_vertices": args.max_vertices}, args.out, started)
    return EXIT_OK


def cmd_trees_orient(args) -> int:
    started = time.monotonic()
    data = _load_json_arg(args.file)
    try:
        t = tree_from_json(data)
    except (KeyError, ValueError, TypeError) as e:
        raise MalformedInput(str(e)) from e
    c = orientation_counts(t)
    result = {
        "canonical": canonical_form(t),
        "torsor_size": c.torsor_size,
        "iso_classes": c.iso_classes,
    }
    _emit(result, "trees orient", data, args.out, started)
    return EXIT_OK


def cmd_pos_compare(args) -> int:
    started = time.monotonic()
    raw = {k: _load_json_arg(getattr(args, k)) for k in ("space", "L", "tau", "nu")}
    try:
        space = space_from_json(raw["space"])
        L = plane_from_json(raw["L"], space)
        tau = plane_from_json(raw["tau"], space)
        nu = plane_from_json(raw["nu"], space)
    except (KeyError, ValueError, TypeError) as e:
        raise MalformedInput(str(e)) from e
    v = compare(L, tau, nu)
    result = {
        "relation": v.relation,
        "witness": {"dim": v.witness.dim, "matrix": mat_to_json(v.witness.matrix)},
    }
    _emit(result, "pos compare", raw, args.out, started)
    return EXIT_OK


def cmd_pos_cycle(args) -> int:
    started = time.monotonic()
    raw = _load_json_arg(args.tuple)
    try:
        space = space_from_json(raw["space"])
        planes = [plane_from_json({"columns": c}, space) for c in raw["planes"]]
        ordered = cyclically_ordered(planes, args.dir)
    except (KeyError, ValueError, TypeError) as e:
        raise MalformedInput(str(e)) from e
    result = {"direction": args.dir, "cyclically_ordered": ordered}
    _emit(result, "pos cycle", raw, args.out, started)
    return EXIT_OK if ordered else EXIT_FAILURES


def cmd_building_verify(args) -> int:
    started = time.monotonic()
    data = _load_json_arg(args.file)
    schema = load_schema("building.json")
    try:
        jsonschema.validate(data, schema)
    except jsonschema.ValidationError as e:
        path = "/".join(str(p) for p in e.absolute_path)
        raise MalformedInput(f"schema violation at /{path}: {e.message}") from e
    try:
        graph, probes, _space = building_from_json(data)
    except (KeyError, ValueError, TypeError) as e:
        raise MalformedInput(str(e)) from e

    reports = []
    with concurrent.futures.ThreadPoolExecutor(max_workers=_workers()) as pool:
        for rep in pool.map(verify_probe_positivity, probes):
            reports.append(
                {
                    "verdict": rep.verdict,
                    "failures": [{"level": f.level, "detail": f.detail} for f in rep.failures],
                }
            )
    result = {
        "blocks": len(graph.blocks),
        "connected": graph.is_connected(),
        "skeleton_pieces": sorted(graph.skeleton_pieces),
        "probes": reports,
        "all_pass": all(r["verdict"] for r in reports),
    }
    if args.find_distribution:
        found = find_positive_distribution(probes)
        if isinstance(found, InfeasibleDistribution):
            result["distribution"] = {"infeasible": True, "probe": found.probe_index, "constraint": found.constraint}
        else:
            result["distribution"] = {
                "infeasible": False,
                "eta": {str(i): [[rat_to_str(x) for x in col] for col in plane.basis.cols()] for i, plane in found.items()},
            }
    _emit(result, "building verify", data, args.out, started)
    return EXIT_OK if result["all_pass"] else EXIT_FAILURES


def cmd_front_render(args) -> int:
    started = time.monotonic()
    try:
        scene = render_front(args.model, args.orientation, args.out_svg)
    except ValueError as e:
        raise MalformedInput(str(e)) from e
    result = scene.to_json()
    _emit(result, "front render", {"model": args.model, "orientation": args.orientation}, args.out, started)
    return EXIT_OK


def cmd_flow_mb(args) -> int:
    started = time.monotonic()
    try:
        nq, np_ = (int(x) for x in args.grid.lower().split("x"))
    except ValueError as e:
        raise MalformedInput(f"bad grid {args.grid!r}") from e
    model = MorseBottModel.single(args.index, args.eps)
    grid = GridSpec(nq=nq, np_=np_, margin=args.margin)
    lyap = lyapunov_check(model, grid)
    import numpy as np

    rng = np.random.default_rng(args.seed)
    seeds = np.column_stack(
        [rng.uniform(0.05, 2.0, args.seeds), rng.uniform(-1.0, 1.0, args.seeds)]
    )
    skel = skeleton_estimate(model, seeds, args.horizon, args.step)
    end = skel.skeleton_estimate
    dist = np.abs(end[:, 1]).max()
    result = {
        "index": args.index,
        "eps": args.eps,
        "lyapunov_margin": lyap.lyapunov_margin,
        "grid": lyap.grid_meta,
        "violations": list(lyap.violations),
        "seeds": int(args.seeds),
        "horizon": args.horizon,
        "step": args.step,
        "skeleton_max_dist": float(dist),
        "skeleton_points": [[round(float(x), 12) for x in row] for row in end],
    }
    ok = lyap.lyapunov_margin > 0
    _emit(result, "flow mb", vars(args) | {"func": None}, args.out, started)
    return EXIT_OK if ok else EXIT_FAILURES


def cmd_quake_run(args) -> int:
    started = time.monotonic()
    data = _load_json_arg(args.spec)
    try:
        e = quake_from_json(data)
    except (KeyError, ValueError, TypeError) as e2:
        raise MalformedInput(str(e2)) from e2
    if args.t is not None:
        from dataclasses import replace

        e = replace(e, t=args.t)
    import numpy as np

    lo, hi, count = args.window
    axes = [np.linspace(lo, hi, int(count))] * e.dim
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([m.ravel() for m in mesh])
    result: dict = {"dim": e.dim, "t": e.t, "grid_points": int(pts.shape[0])}
    jumps = {}
    for j, f in enumerate(e.faults):
        on = [q.tolist() for q in pts if abs(f.value(q)) <= 1e-9 and len(e.on_fault(q, 1e-9)) == 1]
        if on:
            from .flows import tectonic_jump_check

            jumps[str(j)] = bool(tectonic_jump_check(e, j, on[: args.max_fault_samples]))
    result["rank_one_jumps"] = jumps
    if args.scan_eta:
        eta_data = _load_json_arg(args.scan_eta)
        eta = np.array(eta_data, dtype=float)
        locus = transversality_scan(e, eta, pts)
        result["tangency_locus"] = {"count": len(locus), "indices": locus[:100]}
    if args.svg:
        _write_quake_svg(e, args.svg)
        result["svg"] = args.svg
    ok = all(jumps.values()) if jumps else True
    _emit(result, "quake run", data, args.out, started)
    return EXIT_OK if ok else EXIT_FAILURES


def _write_quake_svg(e, path: str) -> None:
    import numpy as np

    if e.dim != 1:
        raise MalformedInput("--svg supports 1-dimensional specs")
    from .flows import generating_value_grad

    qs = np.linspace(-1.5, 1.5, 241)
    pts = []
    for q in qs:
        _, g = generating_value_grad(e, [q])
        pts.append((float(q), float(e.t * g[0])))
    body = " ".join(f"{x:.4f},{-y:.4f}" for x, y in pts)
    svg = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="400" height="400" '
        'viewBox="-1.6 -1.6 3.2 3.2">\n'
        f'<polyline fill="none" stroke="#2c3e50" stroke-width="0.02" points="{body}"/>\n'
        '<line x1="-1.6" y1="0" x2="1.6" y2="0" stroke="#95a5a6" stroke-width="0.01"/>\n'
        "</svg>\n"
    )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svg)


# parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="arbor", description=__doc__)
    sub = ap.add_subparsers(dest="group", required=True)

    trees = sub.add_parser("trees", help="signed rooted tree enumeration and counts")
    tsub = trees.add_subparsers(dest="cmd", required=True)
    te = tsub.add_parser("enumerate")
    te.add_argument("--max-vertices", type=int, required=True)
    te.add_argument("--json", action="store_true", default=True, help="JSON output (default)")
    te.add_argument("--table", action="store_true")
    te.add_argument("--out")
    te.set_defaults(func=cmd_trees_enumerate)
    to = tsub.add_parser("orient")
    to.add_argument("file")
    to.add_argument("--out")
    to.set_defaults(func=cmd_trees_orient)

    pos = sub.add_parser("pos", help="positivity relation on Lagrangian planes")
    psub = pos.add_subparsers(dest="cmd", required=True)
    pc = psub.add_parser("compare")
    pc.add_argument("--space", required=True)
    pc.add_argument("--L", required=True)
    pc.add_argument("--tau", required=True)
    pc.add_argument("--nu", required=True)
    pc.add_argument("--out")
    pc.set_defaults(func=cmd_pos_compare)
    py = psub.add_parser("cycle")
    py.add_argument("--tuple", required=True)
    py.add_argument("--dir", choices=[SUCC, PREC], required=True)
    py.add_argument("--out")
    py.set_defaults(func=cmd_pos_cycle)

    bld = sub.add_parser("building", help="verify building files")
    bsub = bld.add_subparsers(dest="cmd", required=True)
    bv = bsub.add_parser("verify")
    bv.add_argument("file")
    bv.add_argument("--find-distribution", action="store_true")
    bv.add_argument("--out")
    bv.set_defaults(func=cmd_building_verify)

    front = sub.add_parser("front", help="render front scenes")
    fsub = front.add_subparsers(dest="cmd", required=True)
    fr = fsub.add_parser("render")
    fr.add_argument("--model", required=True)
    fr.add_argument("--orientation", type=int, default=0)
    fr.add_argument("--out", dest="out_svg", required=True, help="SVG output path")
    fr.add_argument("--json-out", dest="out", help="JSON envelope output path")
    fr.set_defaults(func=cmd_front_render)

    flow = sub.add_parser("flow", help="Morse-Bott flow experiments")
    flsub = flow.add_subparsers(dest="cmd", required=True)
    fm = flsub.add_parser("mb")
    fm.add_argument("--index", type=int, choices=[0, 1], required=True)
    fm.add_argument("--eps", type=float, default=0.2)
    fm.add_argument("--grid", default="200x200")
    fm.add_argument("--margin", type=float, default=1e-3)
    fm.add_argument("--horizon", type=float, default=20.0)
    fm.add_argument("--step", type=float, default=1e-3)
    fm.add_argument("--seeds", type=int, default=100)
    fm.add_argument("--seed", type=int, default=0)
    fm.add_argument("--out")
    fm.set_defaults(func=cmd_flow_mb)

    quake = sub.add_parser("quake", help="earthquake isotopies")
    qsub = quake.add_subparsers(dest="cmd", required=True)
    qr = qsub.add_parser("run")
    qr.add_argument("--spec", required=True)
    qr.add_argument("--t", type=float, default=None)
    qr.add_argument("--scan-eta", default=None)
    qr.add_argument("--window", nargs=3, type=float, default=(-1.0, 1.0, 21), metavar=("LO", "HI", "COUNT"))
    qr.add_argument("--max-fault-samples", type=int, default=50)
    qr.add_argument("--svg", default=None)
    qr.add_argument("--out")
    qr.set_defaults(func=cmd_quake_run)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_MALFORMED if e.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except MalformedInput as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_MALFORMED
    except ValueError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
