#!/usr/bin/env python3
"""End-to-end walkthrough of one equation in the torsion Heisenberg group.

Shows every pipeline stage: parsing, normalization, symbolic collection,
the emitted integer system, the verdict, and the brute-force cross-check.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from nilsolve import catalog, equations, oracle, pipeline, reduction  # noqa: E402
from nilsolve.zsolver import SolverConfig  # noqa: E402

EQUATION = "X b a1 c X a2 c^-3 a1 X = 1"


def main():
    p = catalog.torsion_heisenberg()
    eq = equations.parse_equation(EQUATION, p)
    print(f"equation:    {EQUATION}")
    normal, snf, system = pipeline.reduce_equation(p, eq)
    print(f"normalized:  {equations.serialize_equation(normal, p)}")
    print("reduced integer system:")
    for line in reduction.render_zsystem(system).splitlines():
        print(f"  {line}")
    result = pipeline.solve_equation(p, eq, SolverConfig())
    print(f"verdict:     {result.verdict.status}  [{result.verdict.certificate}]")
    found = oracle.brute_force_oracle(eq, p, 3)
    print(f"oracle(B=3): {'witness ' + str(found) if found is not None else 'no witness'}")


if __name__ == "__main__":
    main()
