"""Command line front end.

Subcommands: check (validate input files), solve (full pipeline), reduce
(emit the integer system as JSON), oracle (brute force), fuzz (differential
corpus).  Exit codes: 0 SAT, 1 UNSAT, 2 UNKNOWN, 64 usage error, 65 input
error, 70 fuzz mismatch.  Reports are deterministic JSON (sorted keys, no
wall-clock fields), appended as JSON lines to --out when given.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

from . import catalog, equations, extension as ext_mod, fuzz as fuzz_mod
from . import malcev, oracle as oracle_mod, pipeline, reduction
from .zsolver import SAT, UNKNOWN, UNSAT, SolverConfig

EXIT_SAT = 0
EXIT_UNSAT = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 64
EXIT_INPUT = 65
EXIT_MISMATCH = 70

_VERDICT_EXIT = {SAT: EXIT_SAT, UNSAT: EXIT_UNSAT, UNKNOWN: EXIT_UNKNOWN}


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="nilsolve", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="command")

    def common(sp, equation=True):
        sp.add_argument("--group", metavar="FILE", help="presentation JSON")
        sp.add_argument("--extension", metavar="FILE", help="extension JSON")
        if equation:
            sp.add_argument("--equation", metavar="STR", help="one equation in the DSL")
            sp.add_argument("--equations", metavar="FILE", help="equation file")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", metavar="FILE", help="append JSON-line reports here")
        sp.add_argument("--format", choices=("json", "text"), default=None)
        sp.add_argument("--search-bound", type=int, default=64)
        sp.add_argument("--time-budget-ms", type=int, default=30_000)
        sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("check", help="validate presentation / extension files")
    common(sp, equation=False)

    sp = sub.add_parser("solve", help="decide an equation")
    common(sp)

    sp = sub.add_parser("reduce", help="emit the reduced integer system")
    common(sp)

    sp = sub.add_parser("oracle", help="brute-force scan for a witness")
    common(sp)
    sp.add_argument("--bound", type=int, default=3)

    sp = sub.add_parser("fuzz", help="differential corpus run")
    common(sp, equation=False)
    sp.add_argument("--groups", default="torsion_heisenberg,heisenberg",
                    help="comma separated catalog names")
    sp.add_argument("--cases", type=int, default=200)
    sp.add_argument("--bound", type=int, default=3)
    return parser


def _seed_of(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("NILSOLVE_SEED")
    return int(env) if env else 0


def _load_json(path: str) -> dict:
    try:
        raw = Path(path).read_text(encoding="utf-8")
        return json.loads(raw)
    except FileNotFoundError:
        raise InputError(f"{path}: file not found") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None


def _load_group(args):
    """Returns (kind, object, source description)."""
    if args.extension:
        try:
            ext = ext_mod.extension_from_dict(_load_json(args.extension))
        except (malcev.MalcevError, ext_mod.ExtensionError, KeyError) as exc:
            raise InputError(f"{args.extension}: {exc}") from None
        return "extension", ext, args.extension
    group = args.group
    if group is None and getattr(args, "equations", None):
        group = _equations_file_group(args.equations)
    if group:
        try:
            p = malcev.presentation_from_dict(_load_json(group))
            malcev.validate_presentation(p)
        except malcev.MalcevError as exc:
            raise InputError(f"{group}: {exc}") from None
        return "group", p, group
    raise UsageError("one of --group or --extension is required")


def _equations_file_group(path: str) -> str | None:
    """Resolves a leading `group: <path>` header, relative to the file."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except FileNotFoundError:
        raise InputError(f"{path}: file not found") from None
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("group:"):
            target = line.split(":", 1)[1].strip()
            return str((Path(path).parent / target).resolve())
        break
    return None


def _iter_equations(args):
    """Yields equation text lines from --equation or an --equations file."""
    if args.equation is not None:
        yield args.equation
        return
    if args.equations is None:
        raise UsageError("one of --equation or --equations is required")
    try:
        lines = Path(args.equations).read_text(encoding="utf-8").splitlines()
    except FileNotFoundError:
        raise InputError(f"{args.equations}: file not found") from None
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("group:"):
            continue
        yield line


def _digest(*parts: str) -> str:
    h = hashlib.sha256()
    for part in parts:
        h.update(part.encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()[:16]


def _emit(report: dict, args, default_format: str):
    fmt = args.format or default_format
    if fmt == "json":
        print(json.dumps(report, sort_keys=True))
    else:
        for key, value in report.items():
            if value is None or key == "zsystem":
                continue
            if isinstance(value, dict):
                value = json.dumps(value, sort_keys=True)
            print(f"{key}: {value}")
    if args.out:
        with open(args.out, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(report, sort_keys=True) + "\n")


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        search_bound=args.search_bound,
        time_budget_ms=args.time_budget_ms,
    )


def _cmd_check(args) -> int:
    kind, obj, source = _load_group(args)
    report = {"input": source, "kind": kind, "status": "ok"}
    _emit(report, args, "text")
    return EXIT_SAT


def _cmd_solve(args) -> int:
    kind, obj, source = _load_group(args)
    cfg = _solver_config(args)
    seed = _seed_of(args)
    code = EXIT_SAT
    for text in _iter_equations(args):
        if kind == "extension":
            try:
                eq = ext_mod.parse_g_equation(text, obj)
            except equations.EquationError as exc:
                raise InputError(f"{text!r}: {exc}") from None
            verdict = ext_mod.solve_in_extension(obj, eq, cfg)
            witness = None
            if verdict.witness is not None:
                witness = {
                    var: ext_mod.render_g_element(obj, g)
                    for var, g in verdict.witness.items()
                }
            system = None
        else:
            try:
                eq = equations.parse_equation(text, obj)
            except equations.EquationError as exc:
                raise InputError(f"{text!r}: {exc}") from None
            result = pipeline.solve_equation(obj, eq, cfg)
            verdict = result.verdict
            witness = None
            if result.witness is not None:
                witness = {
                    var: equations.render_normal_form(obj, nf)
                    for var, nf in result.witness.items()
                }
            system = reduction.zsystem_to_dict(result.system)
        report = {
            "input_digest": _digest(source, text, str(seed)),
            "source": source,
            "equation": text,
            "verdict": verdict.status,
            "witness": witness,
            "certificate": verdict.certificate,
            "reason": verdict.reason,
            "stats": dict(verdict.stats) if verdict.stats else None,
            "zsystem": system,
            "seed": seed,
        }
        _emit(report, args, "text")
        code = _VERDICT_EXIT[verdict.status]
    return code


def _cmd_reduce(args) -> int:
    kind, obj, source = _load_group(args)
    if kind == "extension":
        raise UsageError("reduce works on --group inputs; extensions branch per coset")
    code = EXIT_SAT
    for text in _iter_equations(args):
        try:
            eq = equations.parse_equation(text, obj)
        except equations.EquationError as exc:
            raise InputError(f"{text!r}: {exc}") from None
        _, _, system = pipeline.reduce_equation(obj, eq)
        doc = reduction.zsystem_to_dict(system)
        if (args.format or "json") == "json":
            print(json.dumps(doc, sort_keys=True))
        else:
            print(reduction.render_zsystem(system))
        if args.out:
            with open(args.out, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(doc, sort_keys=True) + "\n")
    return code


def _cmd_oracle(args) -> int:
    kind, obj, source = _load_group(args)
    code = EXIT_UNKNOWN
    for text in _iter_equations(args):
        try:
            if kind == "extension":
                eq = ext_mod.parse_g_equation(text, obj)
                found = oracle_mod.brute_force_oracle(eq, obj, args.bound)
                render = lambda g: ext_mod.render_g_element(obj, g)
            else:
                eq = equations.parse_equation(text, obj)
                found = oracle_mod.brute_force_oracle(eq, obj, args.bound)
                render = lambda nf: equations.render_normal_form(obj, nf)
        except equations.EquationError as exc:
            raise InputError(f"{text!r}: {exc}") from None
        witness = (
            {v: render(g) for v, g in found.items()} if found is not None else None
        )
        report = {
            "equation": text,
            "bound": args.bound,
            "verdict": "sat" if found is not None else "not-found",
            "witness": witness,
        }
        _emit(report, args, "text")
        code = EXIT_SAT if found is not None else EXIT_UNKNOWN
    return code


def _cmd_fuzz(args) -> int:
    names = tuple(n for n in args.groups.split(",") if n)
    for name in names:
        if name not in catalog.GROUPS:
            raise InputError(f"unknown catalog group {name!r}")
    cfg = fuzz_mod.FuzzConfig(
        groups=names,
        cases=args.cases,
        oracle_bound=args.bound,
        workers=args.workers,
    )
    seed = _seed_of(args)
    try:
        summary = fuzz_mod.fuzz_corpus(cfg, _solver_config(args), seed=seed)
    except fuzz_mod.MismatchFound as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_MISMATCH
    _emit(summary, args, "json")
    return EXIT_SAT


_COMMANDS = {
    "check": _cmd_check,
    "solve": _cmd_solve,
    "reduce": _cmd_reduce,
    "oracle": _cmd_oracle,
    "fuzz": _cmd_fuzz,
}


def run_cli(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required (check/solve/reduce/oracle/fuzz)")
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
