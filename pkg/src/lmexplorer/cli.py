"""Command line entry points: serve the API, run batch explorations,
run the multi-start verification oracle and compare the two.

Exit codes: 0 ok, 1 runtime failure, 2 usage/IO error, 3 comparison
failure.  All subcommands are deterministic given --seed; wall-clock
timings are segregated into timings.json so the remaining outputs can
be diffed byte-for-byte.
"""

from __future__ import annotations

import argparse
import json
import socket
import sys
import time
from pathlib import Path as FsPath

import numpy as np

from . import cspace, explorer, fixtures, pathopt
from .explorer import Params, SampleBudget, TimeBudget
from .scene import SceneError, load_scene


def _load_doc(value: str, kind: str) -> dict:
    """Resolve a fixture name or a JSON file path."""
    path = FsPath(value)
    if path.is_file():
        try:
            return json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise SystemExit(f"error: cannot read {kind} file {value!r}: {exc}")
    try:
        registry = fixtures.scene_doc if kind == "scene" else fixtures.bundle_doc
        return registry(value)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        raise SystemExit(2)


def _write_json(path: FsPath, doc) -> None:
    path.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")


def _params_from_args(args) -> Params:
    overrides = {}
    if args.n_paths is not None:
        overrides["n_paths"] = args.n_paths
    return Params(**{**Params().__dict__, **overrides})


def cmd_serve(args) -> int:
    import uvicorn

    from .service import SessionHandle, create_app

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((args.host, args.port))
    except OSError as exc:
        print(f"error: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return 1
    finally:
        probe.close()

    static_dir = args.ui_dir if args.ui_dir else None
    app = create_app(data_dir=args.data_dir, static_dir=static_dir)
    if args.scene:
        scene_doc = _load_doc(args.scene, "scene")
        bundle_doc = _load_doc(args.bundle, "bundle") if args.bundle else None
        if bundle_doc is None:
            print("error: --scene preload requires --bundle", file=sys.stderr)
            return 2
        session = explorer.new_session(scene_doc, bundle_doc, _params_from_args(args), args.seed)
        handle = SessionHandle(session, "preloaded")
        app.state.sessions["preloaded"] = handle
        print("preloaded session id: preloaded")
    print(f"serving on http://{args.host}:{args.port}")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_batch(args) -> int:
    out = FsPath(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / ".write_probe").write_text("ok")
        (out / ".write_probe").unlink()
    except OSError as exc:
        print(f"error: output directory not writable: {exc}", file=sys.stderr)
        return 2

    scene_doc = _load_doc(args.scene, "scene")
    bundle_doc = _load_doc(args.bundle, "bundle")
    ptc = TimeBudget(args.budget_seconds) if args.budget_seconds else SampleBudget(args.samples)
    t0 = time.monotonic()
    try:
        session = explorer.new_session(scene_doc, bundle_doc, _params_from_args(args), args.seed)
        snapshot = explorer.run_batch(session, args.policy, ptc, max_nodes=args.max_nodes)
    except SceneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    wall = time.monotonic() - t0

    _write_json(out / "tree.json", snapshot)
    minima_dir = out / "minima"
    minima_dir.mkdir(exist_ok=True)
    per_level: dict[int, list] = {}
    for node in session.tree.nodes.values():
        if node.path is None:
            continue
        per_level.setdefault(node.level, []).append({"id": node.id, "cost": node.cost})
        _write_json(
            minima_dir / f"{node.id}.json",
            {
                "node": node.id,
                "level": node.level,
                "cost": node.cost,
                "waypoints": node.path.waypoints.tolist(),
            },
        )
    summary = {
        "scene": session.scene.name,
        "bundle_levels": session.depth,
        "seed": session.seed,
        "policy": args.policy,
        "budget": {"samples": args.samples} if not args.budget_seconds else {"seconds": args.budget_seconds},
        "minima_per_level": {str(k): sorted(v, key=lambda m: (m["cost"], m["id"])) for k, v in sorted(per_level.items())},
        "composite_minima": len(per_level.get(session.depth, [])),
        "events": session.events,
    }
    _write_json(out / "summary.json", summary)
    _write_json(out / "timings.json", {"wall_seconds": wall})
    print(
        f"batch done: {summary['composite_minima']} composite minima, "
        f"{sum(len(v) for v in per_level.values())} minima total, {wall:.1f}s -> {out}"
    )
    return 0


def cmd_oracle(args) -> int:
    out = FsPath(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: output directory not writable: {exc}", file=sys.stderr)
        return 2
    scene_doc = _load_doc(args.scene, "scene")
    scene = load_scene(scene_doc)
    if scene.composite_dimension > 6:
        print(
            f"error: oracle is a desk-scale tool; composite dimension "
            f"{scene.composite_dimension} exceeds 6. Use a reduced scene.",
            file=sys.stderr,
        )
        return 2
    space = cspace.full_space(scene)
    start, goal = cspace.composite_start_goal(space)
    rng = np.random.default_rng(np.random.SeedSequence([args.seed, 9000]))
    t0 = time.monotonic()
    try:
        reps = pathopt.multistart_oracle(
            space, start, goal, n_starts=args.starts, n_via=args.vias, rng=rng,
        )
    except pathopt.OracleIncomplete as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    wall = time.monotonic() - t0
    doc = {
        "scene": scene.name,
        "seed": args.seed,
        "starts": args.starts,
        "vias": args.vias,
        "count": len(reps),
        "clusters": [
            {"cost": pathopt.path_cost(space, p), "waypoints": p.waypoints.tolist()}
            for p in reps
        ],
    }
    _write_json(out / "oracle.json", doc)
    _write_json(out / "oracle_timings.json", {"wall_seconds": wall})
    print(f"oracle: {len(reps)} clusters in {wall:.1f}s -> {out / 'oracle.json'}")

    if args.compare:
        tree_path = FsPath(args.compare) / "tree.json"
        if not tree_path.is_file():
            print(f"error: no tree.json under {args.compare!r}", file=sys.stderr)
            return 2
        tree_doc = json.loads(tree_path.read_text())
        top_level = max(n["level"] for n in tree_doc["nodes"])
        failures = []
        for node in tree_doc["nodes"]:
            if node["level"] != top_level or node["path"] is None:
                continue
            w = np.asarray(node["path"], dtype=float)
            matches = sum(
                1 for rep in reps if pathopt.is_deformable(space, rep.waypoints, w)
            )
            if matches != 1:
                failures.append({"node": node["id"], "matches": matches})
        if failures:
            print(f"comparison FAILED: {failures}", file=sys.stderr)
            return 3
        print("comparison passed: every batch minimum matches exactly one oracle cluster")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="explorer",
        description="Enumerate and organize local minima of multi-robot motion-planning problems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scene_required=True):
        p.add_argument("--scene", required=scene_required, help="fixture name or scene JSON path")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--n-paths", type=int, default=None, help="max minima returned per expansion")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    common(p_serve, scene_required=False)
    p_serve.add_argument("--bundle", help="fixture name or bundle JSON path (for preload)")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--data-dir", default=None, help="session persistence dir (or EXPLORER_DATA_DIR)")
    p_serve.add_argument("--ui-dir", default=None, help="static frontend directory to mount at /")
    p_serve.set_defaults(func=cmd_serve)

    p_batch = sub.add_parser("batch", help="run an automated exploration")
    common(p_batch)
    p_batch.add_argument("--bundle", required=True, help="fixture name or bundle JSON path")
    p_batch.add_argument("--samples", type=int, default=2000, help="sample budget per expansion")
    p_batch.add_argument("--budget-seconds", type=float, default=None, help="time budget per expansion")
    p_batch.add_argument("--policy", choices=("breadth_first", "best_first"), default="breadth_first")
    p_batch.add_argument("--max-nodes", type=int, default=16, help="max expansions")
    p_batch.add_argument("--out", required=True, help="output directory")
    p_batch.set_defaults(func=cmd_batch)

    p_oracle = sub.add_parser("oracle", help="multi-start verification oracle")
    common(p_oracle)
    p_oracle.add_argument("--starts", type=int, default=200)
    p_oracle.add_argument("--vias", type=int, default=3)
    p_oracle.add_argument("--out", required=True, help="output directory")
    p_oracle.add_argument("--compare", default=None, help="batch output directory to cross-check")
    p_oracle.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except SceneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # keep the contract: runtime failures exit 1
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
