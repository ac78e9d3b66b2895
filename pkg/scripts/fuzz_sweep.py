#!/usr/bin/env python3
"""Larger differential sweep than the default corpus; prints one summary
per catalog group plus extension spot checks."""

import argparse
import pathlib
import random
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from nilsolve import catalog, extension as X, fuzz, oracle  # noqa: E402
from nilsolve.zsolver import SAT, UNSAT, SolverConfig  # noqa: E402


def sweep_groups(cases: int, seed: int):
    for name in sorted(catalog.GROUPS):
        cfg = fuzz.FuzzConfig(groups=(name,), cases=cases, twist_probability=0.3)
        summary = fuzz.fuzz_corpus(cfg, SolverConfig(), seed=seed)
        print(f"{name:20s} {summary}")


def sweep_extensions(cases: int, seed: int):
    for name in sorted(catalog.EXTENSIONS):
        ext = catalog.get_extension(name)
        rng = random.Random(seed)
        cfg = fuzz.FuzzConfig(max_occurrences=2, const_bound=1)
        counts = {"sat": 0, "unsat": 0, "unknown": 0}
        for _ in range(cases):
            eq = fuzz.random_g_equation(ext, rng, cfg)
            verdict = X.solve_in_extension(ext, eq, SolverConfig())
            counts[verdict.status] += 1
            if verdict.status == UNSAT:
                assert oracle.brute_force_oracle(eq, ext, 3) is None
            if verdict.status == SAT:
                assert X.substitute_g(eq, ext, verdict.witness) == X.g_identity(ext)
        print(f"{name:20s} {counts}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cases", type=int, default=300)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    sweep_groups(args.cases, args.seed)
    sweep_extensions(max(20, args.cases // 10), args.seed)


if __name__ == "__main__":
    main()
