"""Command-line front end.

Subcommands: list, profile <id>, run <config.json>, verify-paper,
compare <report.json>.  Exit codes: 0 success, 2 config/usage error,
3 data error, 4 computation or verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import ingest, reference, report
from .learners import KINDS, _PARAM_NAMES

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_COMPUTE = 4


def cmd_list(_args) -> int:
    registry = ingest.load_registry()
    print("datasets:")
    for ds_id in sorted(registry):
        entry = registry[ds_id]
        dataset = ingest.load_dataset(ds_id, registry)
        print(f"  {ds_id:<11} {entry.format:<4} rows={dataset.n_rows:<4} "
              f"features={len(dataset.features)}")
    print("learners:")
    for kind in KINDS:
        params = ", ".join(_PARAM_NAMES[kind]) or "(no hyperparameters)"
        print(f"  {kind:<5} {params}")
    return EXIT_OK


def cmd_profile(args) -> int:
    try:
        result = ingest.validate_dataset(args.dataset_id)
    except ingest.SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ingest.IngestError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA

    by_column: dict[str, dict] = {}
    for cell in result.cells:
        by_column.setdefault(cell.column, {})[cell.stat] = cell
    print(f"{'column':<16} {'stat':<5} {'computed':>14} {'expected':>14}  verdict")
    for column, stats in by_column.items():
        for stat in ("min", "max", "mean", "std"):
            cell = stats[stat]
            verdict = "pass" if cell.passed else ("waived" if cell.waived else "FAIL")
            print(f"{column:<16} {stat:<5} {cell.computed:>14.4f} "
                  f"{cell.expected:>14.4f}  {verdict}")
            if cell.waived:
                print(f"{'':<22} waiver: {cell.waiver_reason}")
    print(f"verdict: {'pass' if result.passed else 'FAIL'} "
          f"({len(result.waived)} waived cells)")
    return EXIT_OK


def cmd_run(args) -> int:
    try:
        config = report.load_config(args.config)
        if args.seed is not None:
            config = report.parse_config({**config.canonical(), "seed": args.seed})
    except report.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = args.out or config.output_dir
    try:
        payload, failures = report.run_benchmark(config, jobs=args.jobs)
    except ingest.IngestError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    paths = report.write_report_files(payload, out_dir)
    for key in ("json", "md", "csv"):
        print(f"wrote {paths[key]}")
    if failures:
        print(f"{len(failures)} cell(s) failed:", file=sys.stderr)
        for f in failures:
            print(f"  {f['learner']} on {f['dataset']}: {f['error']}", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


def cmd_verify_paper(_args) -> int:
    rows, ok = reference.verify_consistency()
    for r in rows:
        print(f"{r.learner:<5} avg {r.recomputed_avg:>10.4f} vs printed "
              f"{r.printed_avg:>10.3f} [{'ok' if r.avg_ok else 'FAIL'}]  "
              f"rank {r.recomputed_rank} vs {r.printed_rank} "
              f"[{'ok' if r.rank_ok else 'FAIL'}]")
    print(f"verdict: {'pass' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_COMPUTE


def cmd_compare(args) -> int:
    try:
        payload = json.loads(Path(args.report).read_text())
        cells = payload["cells"]
        ours = {kind: {ds: cells[kind][ds]["rmse"] for ds in cells.get(kind, {})}
                for kind in cells}
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        print(f"cannot read report {args.report}: {exc}", file=sys.stderr)
        return EXIT_DATA

    comparisons, agreements, skipped = reference.compare_cells(ours)
    lines = ["# Comparison against the published reference results", ""]
    lines.append("Informational only: the reference run is not exactly "
                 "reproducible (seeds, grids and preprocessing were never "
                 "published), so ratios far from 1 are expected.")
    lines.append("")
    lines.append("| Learner | Dataset | ours | reference | ratio | flag |")
    lines.append("|---|---|---|---|---|---|")
    for c in comparisons:
        flag = ">3x" if c.flagged else ""
        lines.append(f"| {c.learner} | {c.dataset} | {report.fmt4(c.ours)} | "
                     f"{report.fmt4(c.reference)} | {c.ratio:.3f} | {flag} |")
    lines.append("")
    lines.append("| Dataset | our best | reference best | agree |")
    lines.append("|---|---|---|---|")
    for a in agreements:
        lines.append(f"| {a.dataset} | {a.our_best} | {a.reference_best} | "
                     f"{'yes' if a.agree else 'no'} |")
    if skipped:
        lines.append("")
        lines.append("Not compared (absent from the report): " + ", ".join(skipped))
    doc = "\n".join(lines) + "\n"
    print(doc, end="")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "compare.md").write_text(doc)
        print(f"wrote {out / 'compare.md'}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="effort-bench",
        description="LOOCV benchmark of nine regression learners on the "
                    "bundled effort datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="show registered datasets and learners")

    p = sub.add_parser("profile", help="profile a dataset against its reference stats")
    p.add_argument("dataset_id")

    p = sub.add_parser("run", help="run a benchmark config")
    p.add_argument("config")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", default=None, help="output directory for the reports")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")

    sub.add_parser("verify-paper",
                   help="check the bundled reference table for internal consistency")

    p = sub.add_parser("compare", help="compare a report against the reference results")
    p.add_argument("report")
    p.add_argument("--out", default=None, help="also write compare.md here")

    return parser


_COMMANDS = {
    "list": cmd_list,
    "profile": cmd_profile,
    "run": cmd_run,
    "verify-paper": cmd_verify_paper,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
