"""Finite extensions of a presented group, and equation reduction into it.

An extension is given by tables over a transversal 0..f-1 (index 0 is the
identity coset): conjugation automorphisms psi_tau of the normal subgroup H
realizing h -> t_tau h t_tau^-1, a cocycle table t_tau t_tau' = h t_tau'',
and an inverse table t_tau^-1 = h t_tau'.  Elements of the big group are
pairs (h, tau) meaning h * t_tau.

A single equation in the big group is decided by splitting every variable
X = Y * Z with Y over H and Z over the transversal: for each tuple of
transversal choices whose coset product lands in H, pushing all H-parts to
the left turns the equation into a twisted equation over H (occurrences
conjugated by the accumulated prefix), which the symbolic reduction
handles.  The equation is solvable iff some branch is.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from . import equations, malcev, pipeline
from .equations import EquationWord, Occurrence, UnknownSymbol
from .malcev import (
    AssociativityFailure,
    Automorphism,
    MalcevPresentation,
    NormalForm,
)
from .zsolver import SAT, UNKNOWN, SolverConfig, Verdict


class ExtensionError(Exception):
    pass


@dataclass(frozen=True)
class GElement:
    h: NormalForm
    tau: int


@dataclass(frozen=True)
class GEquationWord:
    """Alternating GElement constants and signed occurrences (no twists)."""

    constants: tuple
    occurrences: tuple

    def __post_init__(self):
        if len(self.constants) != len(self.occurrences) + 1:
            raise ExtensionError("constants/occurrences length mismatch")

    @property
    def variables(self) -> tuple:
        seen: list = []
        for occ in self.occurrences:
            if occ.var not in seen:
                seen.append(occ.var)
        return tuple(seen)


@dataclass(frozen=True)
class ExtensionPresentation:
    base: MalcevPresentation
    f: int
    psi: tuple                # Automorphism per transversal index
    mult_table: Mapping       # (tau, tau') -> (NormalForm, tau'')
    inv_table: Mapping        # tau -> (NormalForm, tau')

    def transversal_names(self) -> tuple:
        return tuple(f"t{i}" for i in range(self.f))


def g_identity(ext: ExtensionPresentation) -> GElement:
    return GElement(malcev.identity(ext.base), 0)


def g_multiply(ext: ExtensionPresentation, x: GElement, y: GElement) -> GElement:
    """(h1 t1)(h2 t2) = h1 * psi_t1(h2) * h_cocycle * t_prod."""
    p = ext.base
    conj = malcev.apply_automorphism(p, ext.psi[x.tau], y.h)
    hc, tau = ext.mult_table[(x.tau, y.tau)]
    h = malcev.multiply(p, malcev.multiply(p, x.h, conj), hc)
    return GElement(h, tau)


def g_invert(ext: ExtensionPresentation, x: GElement) -> GElement:
    """(h t)^-1 = t^-1 h^-1 = h_i * psi_t'(h^-1) * t' with t^-1 = h_i t'."""
    p = ext.base
    hi, tau = ext.inv_table[x.tau]
    h = malcev.multiply(
        p, hi, malcev.apply_automorphism(p, ext.psi[tau], malcev.invert(p, x.h))
    )
    return GElement(h, tau)


def g_power(ext: ExtensionPresentation, x: GElement, e: int) -> GElement:
    if e < 0:
        return g_power(ext, g_invert(ext, x), -e)
    acc = g_identity(ext)
    for _ in range(e):
        acc = g_multiply(ext, acc, x)
    return acc


def coset_product(ext: ExtensionPresentation, tau1: int, tau2: int) -> int:
    return ext.mult_table[(tau1, tau2)][1]


def validate_extension(
    ext: ExtensionPresentation, trials: int = 200, seed: int = 0
) -> ExtensionPresentation:
    """Structural table checks plus randomized group laws in the extension."""
    p = ext.base
    if ext.f < 1:
        raise ExtensionError("transversal size must be positive")
    if len(ext.psi) != ext.f:
        raise ExtensionError(f"need {ext.f} conjugation automorphisms")
    if not malcev.is_identity_automorphism(p, ext.psi[0]):
        raise ExtensionError("psi_0 must be the identity automorphism")
    for theta in ext.psi:
        malcev.validate_automorphism(p, theta)
    one = malcev.identity(p)
    for tau in range(ext.f):
        for pair in ((0, tau), (tau, 0)):
            if pair not in ext.mult_table:
                raise ExtensionError(f"mult_table misses {pair}")
            h, out = ext.mult_table[pair]
            if h != one or out != tau:
                raise ExtensionError(f"mult_table{pair} must be (1, {tau})")
        if tau not in ext.inv_table:
            raise ExtensionError(f"inv_table misses {tau}")
    for tau1 in range(ext.f):
        for tau2 in range(ext.f):
            if (tau1, tau2) not in ext.mult_table:
                raise ExtensionError(f"mult_table misses ({tau1}, {tau2})")
    for tau in range(ext.f):
        rep = GElement(one, tau)
        inv = g_invert(ext, rep)
        if g_multiply(ext, rep, inv) != g_identity(ext):
            raise ExtensionError(f"inv_table inconsistent at {tau}")
        if g_multiply(ext, inv, rep) != g_identity(ext):
            raise ExtensionError(f"inv_table inconsistent at {tau} (left)")

    rng = random.Random(seed)
    for _ in range(trials):
        x = GElement(malcev.random_element(p, rng, 3), rng.randrange(ext.f))
        y = GElement(malcev.random_element(p, rng, 3), rng.randrange(ext.f))
        z = GElement(malcev.random_element(p, rng, 3), rng.randrange(ext.f))
        left = g_multiply(ext, g_multiply(ext, x, y), z)
        right = g_multiply(ext, x, g_multiply(ext, y, z))
        if left != right:
            raise AssociativityFailure(
                f"extension tables are not associative at {(x, y, z)}", (x, y, z)
            )
    return ext


# ---------------------------------------------------------------------------
# equations in the extension
# ---------------------------------------------------------------------------

def parse_g_equation(text: str, ext: ExtensionPresentation) -> GEquationWord:
    """Same DSL as over H, with extra constant tokens t0..t{f-1}.

    Twisted occurrences are not part of equations in the big group.
    """
    p = ext.base
    tnames = ext.transversal_names()
    tokens = text.split()
    atoms: list = []
    saw_equals = False
    for pos, tok in enumerate(tokens, start=1):
        if tok == "=":
            if list(tokens[pos:]) != ["1"]:
                raise equations.MissingEquals(f"token {pos}: expected `= 1`")
            saw_equals = True
            break
        if ":" in tok:
            raise UnknownSymbol(
                f"token {pos}: twists are not allowed in extension equations"
            )
        base_tok, exp = equations._parse_exponent(tok, pos)
        if equations._is_variable_token(tok):
            atoms.extend(equations._variable_atoms(base_tok, exp, None))
        elif base_tok in tnames:
            atoms.append(g_power(ext, GElement(malcev.identity(p), tnames.index(base_tok)), exp))
        elif base_tok == "1":
            atoms.append(g_identity(ext))
        else:
            try:
                index = malcev.generator_index(p, base_tok)
            except malcev.UnknownGenerator:
                raise UnknownSymbol(f"token {pos}: unknown symbol {base_tok!r}") from None
            atoms.append(GElement(malcev.power(p, malcev.generator(p, index), exp), 0))
    if not saw_equals:
        raise equations.MissingEquals("equation must end with `= 1`")

    constants = [g_identity(ext)]
    occurrences = []
    for atom in atoms:
        if isinstance(atom, Occurrence):
            occurrences.append(atom)
            constants.append(g_identity(ext))
        else:
            constants[-1] = g_multiply(ext, constants[-1], atom)
    return GEquationWord(tuple(constants), tuple(occurrences))


def substitute_g(
    eq: GEquationWord, ext: ExtensionPresentation, assignment: Mapping
) -> GElement:
    acc = eq.constants[0]
    for occ, w in zip(eq.occurrences, eq.constants[1:]):
        value = assignment.get(occ.var)
        if value is None:
            raise equations.UnassignedVariable(f"variable {occ.var} not assigned")
        if occ.epsilon == -1:
            value = g_invert(ext, value)
        acc = g_multiply(ext, acc, value)
        acc = g_multiply(ext, acc, w)
    return acc


def enumerate_transversal_assignments(
    ext: ExtensionPresentation, eq: GEquationWord
) -> list:
    """Transversal tuples (one index per distinct variable) whose coset
    product over the whole word is the identity coset; inverted occurrences
    contribute the inverse's coset.  Exhaustive over f^(#variables).
    """
    variables = eq.variables
    out = []
    for combo in itertools.product(range(ext.f), repeat=len(variables)):
        choice = dict(zip(variables, combo))
        coset = eq.constants[0].tau
        for occ, w in zip(eq.occurrences, eq.constants[1:]):
            z = choice[occ.var]
            if occ.epsilon == -1:
                z = ext.inv_table[z][1]
            coset = coset_product(ext, coset, z)
            coset = coset_product(ext, coset, w.tau)
        if coset == 0:
            out.append(combo)
    return out


def _conjugation_by(ext: ExtensionPresentation, g: GElement) -> Automorphism:
    """The automorphism of H given by x -> g x g^-1."""
    p = ext.base
    psi = ext.psi[g.tau]
    if g.h == malcev.identity(p):
        return psi
    return malcev.compose_automorphisms(p, malcev.inner_automorphism(p, g.h), psi)


def build_twisted_equations(
    ext: ExtensionPresentation, eq: GEquationWord, assignment: Sequence
) -> EquationWord:
    """The twisted equation over H for one transversal assignment.

    Every atom (constant h t, or occurrence (Y t_z)^eps) splits into an
    H-item and a transversal-side remainder; pushing all H-items left
    conjugates each by the product of the remainders before it.  Solutions
    correspond exactly: (y_1, ...) solves the result iff (y_1 t_z1, ...)
    solves the input.
    """
    p = ext.base
    choice = dict(zip(eq.variables, assignment))
    prefix = g_identity(ext)

    constants: list = [malcev.identity(p)]
    occurrences: list = []

    def emit_constant(h: NormalForm):
        constants[-1] = malcev.multiply(p, constants[-1], h)

    def emit_occurrence(var: str, eps: int, twist: Automorphism):
        if malcev.is_identity_automorphism(p, twist):
            twist = None
        occurrences.append(Occurrence(var, eps, twist))
        constants.append(malcev.identity(p))

    def process_atom(h_item, gpart: GElement):
        nonlocal prefix
        conj = _conjugation_by(ext, prefix)
        if isinstance(h_item, NormalForm):
            emit_constant(malcev.apply_automorphism(p, conj, h_item))
        else:
            var, eps, theta = h_item
            twist = conj if theta is None else malcev.compose_automorphisms(p, conj, theta)
            emit_occurrence(var, eps, twist)
        prefix = g_multiply(ext, prefix, gpart)

    first = eq.constants[0]
    process_atom(first.h, GElement(malcev.identity(p), first.tau))
    for occ, w in zip(eq.occurrences, eq.constants[1:]):
        z = choice[occ.var]
        if occ.epsilon == 1:
            process_atom((occ.var, 1, None), GElement(malcev.identity(p), z))
        else:
            hi, tau_inv = ext.inv_table[z]
            theta_z = _conjugation_by(ext, GElement(hi, tau_inv))
            process_atom((occ.var, -1, theta_z), GElement(hi, tau_inv))
        process_atom(w.h, GElement(malcev.identity(p), w.tau))

    if prefix.tau != 0:
        raise ExtensionError(
            f"assignment {assignment} does not land in the subgroup"
        )
    emit_constant(prefix.h)
    return EquationWord(tuple(constants), tuple(occurrences))


def solve_in_extension(
    ext: ExtensionPresentation, eq: GEquationWord, cfg: SolverConfig | None = None
) -> Verdict:
    """Branches over transversal assignments; each branch is a twisted
    equation over the subgroup fed to the symbolic pipeline.

    SAT witnesses map variables to GElements and are re-verified by direct
    evaluation in the extension.
    """
    assignments = enumerate_transversal_assignments(ext, eq)
    if not assignments:
        return Verdict.unsat("transversal-exhausted", {"branches": 0, "nodes": 0})
    unknown_reason = None
    branches = 0
    nodes = 0
    for assignment in assignments:
        branches += 1
        teq = build_twisted_equations(ext, eq, assignment)
        result = pipeline.solve_equation(ext.base, teq, cfg)
        if result.verdict.stats:
            nodes += result.verdict.stats.get("nodes", 0)
        if result.verdict.status == SAT:
            witness = {
                var: GElement(result.witness[var], z)
                for var, z in zip(eq.variables, assignment)
            }
            if substitute_g(eq, ext, witness) != g_identity(ext):
                raise AssertionError(
                    f"extension witness {witness} fails direct evaluation"
                )
            return Verdict.sat(witness, {"branches": branches, "nodes": nodes})
        if result.verdict.status == UNKNOWN:
            unknown_reason = unknown_reason or result.verdict.reason
    stats = {"branches": branches, "nodes": nodes}
    if unknown_reason is not None:
        return Verdict.unknown(unknown_reason, stats)
    return Verdict.unsat("branch-exhausted-complete", stats)


def render_g_element(ext: ExtensionPresentation, x: GElement) -> str:
    h = equations.render_normal_form(ext.base, x.h)
    if x.tau == 0:
        return h
    t = f"t{x.tau}"
    return t if h == "1" else f"{h} {t}"


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------

def extension_to_dict(ext: ExtensionPresentation) -> dict:
    return {
        "base": malcev.presentation_to_dict(ext.base),
        "f": ext.f,
        "psi": [malcev.automorphism_to_dict(th) for th in ext.psi],
        "mult_table": [
            [t1, t2, list(h.as_vector()), t3]
            for (t1, t2), (h, t3) in sorted(ext.mult_table.items())
        ],
        "inv_table": [
            [t1, list(h.as_vector()), t2]
            for t1, (h, t2) in sorted(ext.inv_table.items())
        ],
    }


def extension_from_dict(doc: Mapping, validate: bool = True) -> ExtensionPresentation:
    base = malcev.presentation_from_dict(doc["base"], validate=validate)
    psi = tuple(
        malcev.automorphism_from_dict(base, adoc, f"psi_{i}")
        for i, adoc in enumerate(doc["psi"])
    )
    mult_table = {
        (t1, t2): (malcev.element_from_vector(base, h), t3)
        for t1, t2, h, t3 in doc["mult_table"]
    }
    inv_table = {
        t1: (malcev.element_from_vector(base, h), t2)
        for t1, h, t2 in doc["inv_table"]
    }
    ext = ExtensionPresentation(base, doc["f"], psi, mult_table, inv_table)
    if validate:
        validate_extension(ext)
    return ext
