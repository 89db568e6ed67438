"""Validity rate of the random generator over many seeds (every datum should pass)."""
import argparse
import sys
import time

from monodromic.generate import GeneratorConfig, generate_random
from monodromic.gluing import validate_gluing


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--cases", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-dim", type=int, default=5)
    args = p.parse_args(argv)

    start = time.perf_counter()
    cfg = GeneratorConfig(seed=args.seed, max_dim=args.max_dim, case_count=args.cases)
    bad = [i for i, g in enumerate(generate_random(cfg)) if validate_gluing(g)]
    print(f"{args.cases - len(bad)}/{args.cases} valid in {time.perf_counter() - start:.1f} s")
    if bad:
        print(f"first invalid cases: {bad[:10]}")
    return 0 if not bad else 2


if __name__ == "__main__":
    sys.exit(main())
