"""Differential fuzzing: random equations, solver vs brute-force oracle.

Per case the harness checks that
  (a) a SAT verdict's witness solves the equation by direct substitution,
  (b) when the oracle finds a witness the solver never said UNSAT,
  (c) when the solver says UNSAT the oracle finds nothing at its bound.
Any violation raises MismatchFound carrying a replay line that regenerates
the exact case.  Case generation is a pure function of (group name, case
seed), so replays are byte-for-byte.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import catalog, equations, malcev, oracle, pipeline
from .equations import EquationWord, Occurrence
from .malcev import MalcevPresentation
from .zsolver import SAT, UNKNOWN, UNSAT, SolverConfig


class MismatchFound(Exception):
    def __init__(self, message: str, replay: str):
        super().__init__(f"{message}\nreplay: {replay}")
        self.replay = replay


@dataclass(frozen=True)
class FuzzConfig:
    groups: tuple = ("torsion_heisenberg", "heisenberg")
    cases: int = 200
    max_variables: int = 2
    max_occurrences: int = 3
    const_bound: int = 2
    twist_probability: float = 0.25
    oracle_bound: int = 3
    workers: int = 1


def case_seed(seed: int, index: int) -> int:
    return seed + index


def random_equation(p: MalcevPresentation, rng: random.Random, cfg: FuzzConfig) -> EquationWord:
    """Random alternating word; constants have exponents in [-const_bound, const_bound]."""
    n_occ = rng.randint(1, cfg.max_occurrences)
    n_vars = rng.randint(1, min(cfg.max_variables, n_occ))
    names = [f"X{i}" for i in range(1, n_vars + 1)]
    aut_names = sorted(p.automorphisms)
    constants = []
    occurrences = []
    for _ in range(n_occ + 1):
        vec = [rng.randint(-cfg.const_bound, cfg.const_bound) for _ in range(p.num_generators)]
        constants.append(malcev.element_from_vector(p, vec))
    used = list(names)
    rng.shuffle(used)
    for i in range(n_occ):
        var = used[i] if i < len(used) else rng.choice(names)
        eps = rng.choice((1, -1))
        twist = None
        if aut_names and rng.random() < cfg.twist_probability:
            twist = p.automorphisms[rng.choice(aut_names)]
        occurrences.append(Occurrence(var, eps, twist))
    return EquationWord(tuple(constants), tuple(occurrences))


def random_g_equation(ext, rng: random.Random, cfg: FuzzConfig):
    """Random equation over an extension: GElement constants, signed occurrences."""
    from .extension import GElement, GEquationWord

    p = ext.base
    n_occ = rng.randint(1, cfg.max_occurrences)
    n_vars = rng.randint(1, min(cfg.max_variables, n_occ))
    names = [f"X{i}" for i in range(1, n_vars + 1)]
    constants = []
    for _ in range(n_occ + 1):
        vec = [rng.randint(-cfg.const_bound, cfg.const_bound) for _ in range(p.num_generators)]
        constants.append(
            GElement(malcev.element_from_vector(p, vec), rng.randrange(ext.f))
        )
    used = list(names)
    rng.shuffle(used)
    occurrences = []
    for i in range(n_occ):
        var = used[i] if i < len(used) else rng.choice(names)
        occurrences.append(Occurrence(var, rng.choice((1, -1)), None))
    return GEquationWord(tuple(constants), tuple(occurrences))


def _replay_line(group: str, seed: int) -> str:
    return f"nilsolve fuzz --groups {group} --cases 1 --seed {seed}"


def run_case(group_name: str, seed: int, cfg: FuzzConfig, solver_cfg: SolverConfig) -> dict:
    p = catalog.get_group(group_name)
    rng = random.Random(seed)
    eq = random_equation(p, rng, cfg)
    replay = _replay_line(group_name, seed)
    text = equations.serialize_equation(eq, p)

    result = pipeline.solve_equation(p, eq, solver_cfg)
    status = result.verdict.status
    if status == SAT:
        value = equations.substitute(eq, p, result.witness)
        if not value.is_identity():
            raise MismatchFound(
                f"solver witness fails substitution on {text!r}", replay
            )
    found = oracle.brute_force_oracle(eq, p, cfg.oracle_bound)
    if found is not None and status == UNSAT:
        raise MismatchFound(
            f"solver says UNSAT but the oracle found {found} for {text!r}", replay
        )
    if status == UNSAT and found is not None:
        raise MismatchFound(f"unreachable double-check failed for {text!r}", replay)
    return {
        "group": group_name,
        "seed": seed,
        "equation": text,
        "status": status,
        "oracle_found": found is not None,
    }


def fuzz_corpus(
    cfg: FuzzConfig,
    solver_cfg: SolverConfig | None = None,
    seed: int = 0,
) -> dict:
    """Runs the corpus; returns deterministic summary counts.

    Raises MismatchFound (with a replay line) on the first violation.
    """
    solver_cfg = solver_cfg or SolverConfig()
    jobs = [
        (cfg.groups[i % len(cfg.groups)], case_seed(seed, i))
        for i in range(cfg.cases)
    ]
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(
                pool.map(lambda j: run_case(j[0], j[1], cfg, solver_cfg), jobs)
            )
    else:
        results = [run_case(g, s, cfg, solver_cfg) for g, s in jobs]
    summary = {
        "cases": cfg.cases,
        "seed": seed,
        "groups": list(cfg.groups),
        "sat": sum(r["status"] == SAT for r in results),
        "unsat": sum(r["status"] == UNSAT for r in results),
        "unknown": sum(r["status"] == UNKNOWN for r in results),
        "oracle_found": sum(r["oracle_found"] for r in results),
        "mismatches": 0,
    }
    return summary
