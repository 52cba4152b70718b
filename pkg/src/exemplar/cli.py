"""Command line front end.

    exemplar check  SCHEMA [--format json|text] [--accounting MODE]
    exemplar sizes  SCHEMA [--accounting MODE]
    exemplar grid   SCHEMA TREE [--max-rows N] [--format json|table|csv]
                                [--accounting MODE]
    exemplar serve  [--port P] [--ui-dir DIR]

Exit codes: 0 all good, 1 plausibility warnings, 2 errors (unreadable input,
parse diagnostics, or error verdicts).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .dsl import parse_schema, parse_tree_spec
from .extnat import ext_json, ext_str
from .grid import build_grid_document
from .sizing import GenConfig, calc_sizes, plausibility_report
from .model import initial_max_size, recursive_max_size

DEFAULT_PORT = 7878


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="exemplar",
                                     description="example grids and plausibility checks "
                                                 "for conceptual schemas")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="run the plausibility check")
    p_check.add_argument("schema", type=Path)
    p_check.add_argument("--format", choices=("text", "json"), default="text")
    p_check.add_argument("--accounting", choices=("strict", "verbatim"), default="strict")

    p_sizes = sub.add_parser("sizes", help="show initial, derived and fixed-point sizes")
    p_sizes.add_argument("schema", type=Path)
    p_sizes.add_argument("--accounting", choices=("strict", "verbatim"), default="strict")

    p_grid = sub.add_parser("grid", help="generate the example grid for a tree")
    p_grid.add_argument("schema", type=Path)
    p_grid.add_argument("tree", type=Path)
    p_grid.add_argument("--max-rows", type=int, default=10,
                        help="preferred maximum size of umbrella roots")
    p_grid.add_argument("--format", choices=("json", "table", "csv"), default="json")
    p_grid.add_argument("--accounting", choices=("strict", "verbatim"), default="strict")

    p_serve = sub.add_parser("serve", help="run the HTTP session service")
    p_serve.add_argument("--port", type=int,
                         default=int(os.environ.get("EXEMPLAR_PORT", DEFAULT_PORT)))
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--ui-dir", type=Path, default=None,
                         help="directory with static browser assets to serve at /")

    args = parser.parse_args(argv)
    if args.command == "check":
        return _cmd_check(args)
    if args.command == "sizes":
        return _cmd_sizes(args)
    if args.command == "grid":
        return _cmd_grid(args)
    return _cmd_serve(args)


def _load_schema(path: Path):
    try:
        text = path.read_text()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None
    result = parse_schema(text)
    if not result.ok:
        for d in result.diagnostics:
            print(f"{path}:{d}", file=sys.stderr)
        return None
    return result.schema


def _cmd_check(args) -> int:
    schema = _load_schema(args.schema)
    if schema is None:
        return 2
    cfg = GenConfig(accounting=args.accounting)
    report = plausibility_report(schema, cfg)
    if args.format == "json":
        payload = {
            "types": [
                {"type": e.type, "initial": ext_json(e.initial),
                 "final": ext_json(e.final), "verdict": e.verdict}
                for e in report.entries
            ],
            "suspects": list(report.suspects),
        }
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        for e in report.entries:
            print(f"{e.verdict:7}  {e.type}  {ext_str(e.initial)} -> {ext_str(e.final)}")
        if report.suspects:
            print("examine: " + ", ".join(report.suspects))
    if report.has_errors:
        return 2
    if report.has_warnings:
        return 1
    return 0


def _cmd_sizes(args) -> int:
    schema = _load_schema(args.schema)
    if schema is None:
        return 2
    cfg = GenConfig(accounting=args.accounting)
    start = initial_max_size(schema)
    final = calc_sizes(schema, cfg)
    rows = [(t, ext_str(start[t]), str(recursive_max_size(schema, t)), ext_str(final[t]))
            for t in schema.types]
    headers = ("type", "initial", "bound", "final")
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    print("  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip())
    for r in rows:
        print("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip())
    return 0


def _cmd_grid(args) -> int:
    schema = _load_schema(args.schema)
    if schema is None:
        return 2
    try:
        tree_text = args.tree.read_text()
    except OSError as exc:
        print(f"error: cannot read {args.tree}: {exc}", file=sys.stderr)
        return 2
    result = parse_tree_spec(tree_text, schema)
    if not result.ok or result.tree is None:
        for d in result.diagnostics:
            print(f"{args.tree}:{d}", file=sys.stderr)
        return 2
    cfg = GenConfig(accounting=args.accounting, max_user_size_pref=args.max_rows)
    doc = build_grid_document(schema, result.tree, cfg)
    if args.format == "json":
        sys.stdout.write(doc.to_json())
    elif args.format == "csv":
        sys.stdout.write(doc.to_csv())
    else:
        sys.stdout.write(doc.to_table())
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    sys.exit(main())
