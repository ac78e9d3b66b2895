"""End-to-end solving of one equation over one presentation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from . import equations, malcev, reduction, zsolver
from .equations import EquationWord
from .malcev import MalcevPresentation
from .reduction import SymbolicNormalForm, ZSystem
from .zsolver import SolverConfig, Verdict


@dataclass(frozen=True)
class SolveResult:
    verdict: Verdict
    system: ZSystem
    snf: SymbolicNormalForm
    witness: Mapping | None   # variable -> NormalForm when SAT


def group_witness(
    p: MalcevPresentation, snf: SymbolicNormalForm, sigma: Mapping
) -> dict:
    """Converts an integer witness into group elements, one per variable."""
    out = {}
    for var, block in snf.blocks.items():
        out[var] = malcev.element_from_exponents(
            p,
            [sigma[v] for v in block.a],
            [sigma[v] for v in block.b],
            sigma[block.c],
            [sigma[v] for v in block.d],
        )
    return out


def reduce_equation(p: MalcevPresentation, eq: EquationWord):
    normal = equations.normalize_equation(eq, p)
    snf = reduction.symbolic_collect(normal, p)
    return normal, snf, reduction.build_zsystem(snf)


def solve_equation(
    p: MalcevPresentation, eq: EquationWord, cfg: SolverConfig | None = None
) -> SolveResult:
    """Normalize, collect, build the integer system, solve, lift the witness.

    SAT witnesses are re-checked by substituting into the original equation;
    a failure there would mean the reduction and solver disagree, so it is
    an assertion, not a verdict.
    """
    normal, snf, system = reduce_equation(p, eq)
    verdict = zsolver.solve(system, cfg)
    witness = None
    if verdict.status == zsolver.SAT:
        witness = group_witness(p, snf, verdict.witness)
        value = equations.substitute(eq, p, witness)
        if not value.is_identity():
            raise AssertionError(
                f"witness {witness} does not solve the equation (value {value})"
            )
    return SolveResult(verdict=verdict, system=system, snf=snf, witness=witness)
