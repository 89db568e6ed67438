"""Run every verification suite on generated data and write the JSON reports.

    python3 scripts/run_suites.py --seed 0 --cases 100 --jobs 4 --out reports/
"""
import argparse
import logging
import sys
from pathlib import Path

from monodromic.generate import GeneratorConfig
from monodromic.io import dumps
from monodromic.suites import SUITES, run_suite

log = logging.getLogger("run_suites")


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--max-dim", type=int, default=5)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--suites", nargs="+", default=list(SUITES), choices=SUITES)
    p.add_argument("--out", type=Path, help="directory for one report per suite")
    args = p.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    cfg = GeneratorConfig(seed=args.seed, max_dim=args.max_dim, case_count=args.cases)
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
    failed = 0
    for name in args.suites:
        rep = run_suite(name, cfg, jobs=args.jobs)
        failed += rep["failed"]
        log.info("%-10s %4d cases  %3d failed  %7d ms", name, rep["cases"], rep["failed"], rep["wall_time_ms"])
        if args.out:
            (args.out / f"{name}.json").write_text(dumps(rep))
    return 0 if failed == 0 else 2


if __name__ == "__main__":
    sys.exit(main())
