"""Single (possibly twisted) group equations: syntax, parsing, evaluation.

An equation is an alternating word

    w_1 X^{e_1} w_2 X^{e_2} ... w_N X^{e_N} w_{N+1}  =  1

where the w_z are group constants in normal form (identity allowed), each
occurrence carries a sign e_z in {-1, +1} and optionally a twisting
automorphism, and the same variable may occur any number of times, twisted
or not.

The textual DSL is whitespace separated: generator tokens with optional
`^int` exponents, capitalised variable tokens with optional `^int`
exponents (|int| > 1 expands into repeated occurrences), twisted
occurrences written `name:X` where `name` is an automorphism declared by
the presentation, and a terminating `= 1`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from . import malcev
from .malcev import Automorphism, MalcevPresentation, NormalForm


class EquationError(Exception):
    pass


class UnknownSymbol(EquationError):
    pass


class MalformedExponent(EquationError):
    pass


class MissingEquals(EquationError):
    pass


class UnknownAutomorphism(EquationError):
    pass


class UnassignedVariable(EquationError):
    pass


@dataclass(frozen=True)
class Occurrence:
    var: str
    epsilon: int
    twist: Automorphism | None = None


@dataclass(frozen=True)
class EquationWord:
    """Constants and occurrences interleaved: len(constants) == N + 1."""

    constants: tuple
    occurrences: tuple

    def __post_init__(self):
        if len(self.constants) != len(self.occurrences) + 1:
            raise EquationError(
                f"{len(self.occurrences)} occurrences need "
                f"{len(self.occurrences) + 1} constants, got {len(self.constants)}"
            )

    @property
    def variables(self) -> tuple:
        seen: list = []
        for occ in self.occurrences:
            if occ.var not in seen:
                seen.append(occ.var)
        return tuple(seen)


def _is_variable_token(tok: str) -> bool:
    return tok[0].isupper()


def _parse_exponent(tok: str, pos: int):
    """Splits `base^int`; returns (base, exponent)."""
    if "^" not in tok:
        return tok, 1
    base, _, exp = tok.partition("^")
    try:
        return base, int(exp)
    except ValueError:
        raise MalformedExponent(f"token {pos}: bad exponent in {tok!r}") from None


def parse_equation(text: str, p: MalcevPresentation) -> EquationWord:
    """Parses the DSL into the alternating constant/occurrence shape.

    Adjacent constant tokens are collected into a single normal form;
    diagnostics carry the 1-based token position.
    """
    tokens = text.split()
    atoms = _parse_items(tokens, p)
    return _assemble(atoms, p)


def _parse_items(tokens: Sequence, p: MalcevPresentation) -> list:
    """Returns a list of atoms: NormalForm constants and Occurrences."""
    atoms: list = []
    saw_equals = False
    for pos, tok in enumerate(tokens, start=1):
        if tok == "=":
            rest = tokens[pos:]
            if list(rest) != ["1"]:
                raise MissingEquals(f"token {pos}: expected `= 1` to end the equation")
            saw_equals = True
            break
        if ":" in tok:
            aut_name, _, var_tok = tok.partition(":")
            theta = p.automorphisms.get(aut_name)
            if theta is None:
                raise UnknownAutomorphism(f"token {pos}: unknown automorphism {aut_name!r}")
            var, exp = _parse_exponent(var_tok, pos)
            if not var or not _is_variable_token(var):
                raise UnknownSymbol(f"token {pos}: {var_tok!r} is not a variable")
            atoms.extend(_variable_atoms(var, exp, theta))
        elif _is_variable_token(tok):
            var, exp = _parse_exponent(tok, pos)
            atoms.extend(_variable_atoms(var, exp, None))
        else:
            name, exp = _parse_exponent(tok, pos)
            if name == "1" and exp == 1:
                atoms.append(malcev.identity(p))
                continue
            try:
                index = malcev.generator_index(p, name)
            except malcev.UnknownGenerator:
                raise UnknownSymbol(f"token {pos}: unknown symbol {name!r}") from None
            atoms.append(malcev.power(p, malcev.generator(p, index), exp))
    if not saw_equals:
        raise MissingEquals("equation must end with `= 1`")
    return atoms


def _variable_atoms(var: str, exp: int, twist: Automorphism | None) -> list:
    sign = 1 if exp >= 0 else -1
    return [Occurrence(var, sign, twist) for _ in range(abs(exp))]


def _assemble(atoms: Sequence, p: MalcevPresentation) -> EquationWord:
    constants = [malcev.identity(p)]
    occurrences = []
    for atom in atoms:
        if isinstance(atom, Occurrence):
            occurrences.append(atom)
            constants.append(malcev.identity(p))
        else:
            constants[-1] = malcev.multiply(p, constants[-1], atom)
    return EquationWord(tuple(constants), tuple(occurrences))


def normalize_equation(eq: EquationWord, p: MalcevPresentation) -> EquationWord:
    """Pushes the central part of every constant into the trailing constant.

    Central elements commute with everything, including variable values, so
    the solution set is unchanged; afterwards only the final constant has
    nonzero c/d exponents.  Idempotent.
    """
    central_c = 0
    central_d = [0] * p.t
    constants = []
    for w in eq.constants:
        central_c += w.c
        central_d = [x + y for x, y in zip(central_d, w.d)]
        constants.append(NormalForm(w.a, w.b, 0, (0,) * p.t))
    tail = constants[-1]
    carried = malcev.element_from_exponents(
        p, [0] * p.n, [0] * p.r, central_c, central_d
    )
    constants[-1] = malcev.multiply(p, tail, carried)
    return EquationWord(tuple(constants), eq.occurrences)


def substitute(
    eq: EquationWord, p: MalcevPresentation, assignment: Mapping
) -> NormalForm:
    """Evaluates the word at assignment (variable -> NormalForm).

    Twists apply to the assigned value before the occurrence sign; the
    assignment solves the equation iff the result is the identity.
    """
    acc = eq.constants[0]
    for occ, w in zip(eq.occurrences, eq.constants[1:]):
        value = assignment.get(occ.var)
        if value is None:
            raise UnassignedVariable(f"variable {occ.var} not assigned")
        if occ.twist is not None:
            value = malcev.apply_automorphism(p, occ.twist, value)
        if occ.epsilon == -1:
            value = malcev.invert(p, value)
        acc = malcev.multiply(p, acc, value)
        acc = malcev.multiply(p, acc, w)
    return acc


def render_normal_form(p: MalcevPresentation, nf: NormalForm) -> str:
    parts = []
    for name, e in zip(p.names, nf.as_vector()):
        if e == 0:
            continue
        parts.append(name if e == 1 else f"{name}^{e}")
    return " ".join(parts) if parts else "1"


def serialize_equation(eq: EquationWord, p: MalcevPresentation) -> str:
    """Renders back to the DSL; identity constants disappear."""
    parts = []
    for occ, w in zip(eq.occurrences, eq.constants):
        if not w.is_identity():
            parts.append(render_normal_form(p, w))
        tok = occ.var if occ.epsilon == 1 else f"{occ.var}^-1"
        if occ.twist is not None:
            if occ.twist.name is None:
                raise EquationError("cannot serialize an unnamed twist")
            tok = f"{occ.twist.name}:{tok}"
        parts.append(tok)
    if not eq.constants[-1].is_identity() or not parts:
        parts.append(render_normal_form(p, eq.constants[-1]))
    return " ".join(parts) + " = 1"
