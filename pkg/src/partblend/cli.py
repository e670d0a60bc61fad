"""Command-line interface: generate / build / query / eval / project / serve.

Machine-readable JSON goes to stdout; progress and tables go to stderr.
Exit codes: 0 success, 1 runtime failure, 2 usage or input-parse failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import dataset, index_store, manifold, retrieval
from .errors import ParamError, PartBlendError


def _parse_grid(spec: str):
    try:
        l, b = spec.lower().split("x")
        return int(l), int(b)
    except ValueError as exc:
        raise ParamError(f"bad grid spec {spec!r}, expected LxB") from exc


def cmd_generate(args) -> int:
    if args.grid:
        l, b = _parse_grid(args.grid)
        items = dataset.generate_grid(
            dataset.default_leg_styles(l), dataset.default_back_styles(b)
        )
    else:
        items = dataset.generate_random(args.random, args.seed)
    manifest = dataset.write_corpus(items, args.out)
    print(f"wrote {len(items)} meshes to {args.out}", file=sys.stderr)
    print(json.dumps({"count": len(items), "manifest": str(manifest)}))
    return 0


def _index_config(args) -> index_store.IndexConfig:
    return index_store.IndexConfig(
        resolution=args.resolution,
        hog=(
            index_store.HogConfig.three_level()
            if getattr(args, "hog_variant", "two-level") == "three-level"
            else index_store.HogConfig()
        ),
        sammon=manifold.SammonConfig(dim=args.dim),
    )


def cmd_build(args) -> int:
    out = Path(args.out)
    if out.exists() and not args.force:
        print(f"error: {out} exists (use --force to overwrite)", file=sys.stderr)
        return 1
    records = dataset.load_corpus(args.corpus)
    cfg = _index_config(args)
    index = index_store.build_index(
        [m for _n, _p, m, _f in records],
        cfg,
        names=[n for n, _p, _m, _f in records],
        paths=[f for _n, _p, _m, f in records],
    )
    index_store.save_index(index, out)
    for label in index.label_set:
        M = index.manifolds[label]
        dups = sum(1 for i, r in M.duplicate_map.items() if i != r)
        print(
            f"part {label}: stress={M.stress:.6g} duplicates={dups}",
            file=sys.stderr,
        )
    print(json.dumps({"shapes": index.n_shapes, "index": str(out)}))
    return 0


def cmd_query(args) -> int:
    index = index_store.load_index(args.index)
    try:
        with open(args.query) as fh:
            doc = json.load(fh)
        q = retrieval.query_from_json(doc)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"error: bad query file: {exc}", file=sys.stderr)
        return 2
    results = retrieval.blend_retrieve(index, q)
    out = []
    for r in results:
        d = r.to_dict()
        if not args.explain:
            d.pop("per_part_costs")
        out.append(d)
    print(json.dumps({"results": out}, indent=1))
    return 0


def cmd_eval(args) -> int:
    index = index_store.load_index(args.index)
    with open(args.cases) as fh:
        doc = json.load(fh)
    cases = [
        dataset.EvalCase(
            picks=tuple((p["source"], p["part"]) for p in c["picks"]),
            ground_truth=c["ground_truth"],
        )
        for c in doc
    ]
    report = dataset.run_blend_eval(index, cases, k=args.k)
    print(report.table(), file=sys.stderr)
    print(json.dumps(report.to_dict()))
    return 0


def cmd_project(args) -> int:
    index = index_store.load_index(args.index)
    if args.part not in index.label_set:
        print(f"error: unknown part {args.part!r}", file=sys.stderr)
        return 2
    xy = manifold.project_2d(index.manifolds[args.part])
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "x", "y"])
        for s, (x, y) in zip(index.shapes, xy):
            w.writerow([s.id, repr(float(x)), repr(float(y))])
    print(f"wrote {index.n_shapes} rows to {args.out}", file=sys.stderr)
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    index = index_store.load_index(args.index)
    serve(index, port=args.port, static_dir=args.static, host=args.host)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="partblend")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a procedural chair corpus")
    mx = g.add_mutually_exclusive_group(required=True)
    mx.add_argument("--grid", help="LxB leg-by-back style grid, e.g. 10x10")
    mx.add_argument("--random", type=int, help="number of random chairs")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    b = sub.add_parser("build", help="build an index from a corpus directory")
    b.add_argument("--corpus", required=True)
    b.add_argument("--out", required=True)
    b.add_argument("--dim", type=int, default=16)
    b.add_argument("--resolution", type=int, default=256)
    b.add_argument(
        "--hog-variant", choices=["two-level", "three-level"], default="two-level"
    )
    b.add_argument("--force", action="store_true")
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", help="run a blend query from a JSON file")
    q.add_argument("--index", required=True)
    q.add_argument("--query", required=True)
    q.add_argument("--explain", action="store_true")
    q.set_defaults(func=cmd_query)

    e = sub.add_parser("eval", help="run an evaluation case file")
    e.add_argument("--index", required=True)
    e.add_argument("--cases", required=True)
    e.add_argument("--k", type=int, default=5)
    e.set_defaults(func=cmd_eval)

    pr = sub.add_parser("project", help="export a 2D manifold projection CSV")
    pr.add_argument("--index", required=True)
    pr.add_argument("--part", required=True)
    pr.add_argument("--out", required=True)
    pr.set_defaults(func=cmd_project)

    s = sub.add_parser("serve", help="serve the HTTP API")
    s.add_argument("--index", required=True)
    s.add_argument("--port", type=int, default=8080)
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--static", default=None)
    s.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PartBlendError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
