#!/usr/bin/env python3
"""Run the default 9x8 benchmark and refresh the committed reference report.

Usage: python scripts/run_full_benchmark.py [--jobs N] [--out DIR]
"""

import argparse
import time
from pathlib import Path

from effortbench import default_config_path
from effortbench.report import load_config, run_benchmark, write_report_files

REPO = Path(__file__).resolve().parent.parent


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--out", default=str(REPO / "reference"))
    args = parser.parse_args()

    config = load_config(default_config_path())
    t0 = time.perf_counter()
    payload, failures = run_benchmark(config, jobs=args.jobs)
    elapsed = time.perf_counter() - t0
    paths = write_report_files(payload, args.out)
    print(f"finished in {elapsed / 60:.1f} min with jobs={args.jobs}")
    for p in paths.values():
        print(f"wrote {p}")
    if failures:
        for f in failures:
            print(f"FAILED {f['learner']} on {f['dataset']}: {f['error']}")
        raise SystemExit(4)


if __name__ == "__main__":
    main()
