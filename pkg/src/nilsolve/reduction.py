"""Symbolic collection of an equation into an integer system.

Each distinct variable V of the equation gets a block of integer variables
(V_a1..V_an, V_b1..V_br, V_c, V_d1..V_dt), one per normal-form exponent of
its unknown value.  The whole equation word is then collected exactly as in
concrete multiplication, but with exponents living in an algebra of affine
forms (a/b blocks) and quadratic expressions with floor terms (c/d blocks).
Equating every collected exponent to zero (modulo l_i for b-generators,
modulo k_m for d-generators) yields the integer system, whose solvability
is equivalent to that of the group equation.

Soundness contract: for every integer assignment to the block variables,
evaluating each collected exponent gives the corresponding exponent of the
concretely substituted word (exactly for the a-block and the c row,
modulo l_i / k_m for the b / d rows).  Tests enforce this pointwise; no
closed-form coefficient table is trusted.

b-exponents are accumulated unreduced (they stay affine) and reduced once
at the end, emitting eta-weighted floor terms of the accumulated total.
Running per-occurrence reduction would telescope to the same values, by
uniqueness of normal forms; the single final floor keeps every numerator
affine by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple

from . import malcev
from .equations import EquationWord, UnassignedVariable
from .malcev import Automorphism, MalcevPresentation, NormalForm


class ReductionError(Exception):
    pass


class UnsupportedTwist(ReductionError):
    """Raised when a twist needs half-integer quadratic coefficients.

    Powering a generator image g by a block variable e contributes
    C(e, 2) * Q(g) to the central exponents, with Q(g) the self-collection
    cost of g.  When Q(g) is odd this is not expressible with integer
    quadratic coefficients plus affine-numerator floors (its second
    difference is odd, theirs is always even), so such twists are rejected.
    Images whose a/b part is a single generator power, in particular all
    conjugation twists, have Q(g) = 0 and are always fine.
    """


# ---------------------------------------------------------------------------
# affine forms, floor terms, quadratic expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffineForm:
    terms: tuple  # ((var, coeff), ...) sorted by var, no zero coeffs
    const: int = 0

    def coeffs(self) -> dict:
        return dict(self.terms)

    def variables(self) -> set:
        return {v for v, _ in self.terms}

    def is_zero(self) -> bool:
        return not self.terms and self.const == 0

    def is_constant(self) -> bool:
        return not self.terms


def _af(coeffs: Mapping, const) -> AffineForm:
    terms = tuple(sorted((v, c) for v, c in coeffs.items() if c != 0))
    return AffineForm(terms, const)


def af_const(k: int = 0) -> AffineForm:
    return AffineForm((), k)


def af_var(name: str, coeff: int = 1) -> AffineForm:
    return _af({name: coeff}, 0)


def af_add(x: AffineForm, y: AffineForm) -> AffineForm:
    coeffs = x.coeffs()
    for v, c in y.terms:
        coeffs[v] = coeffs.get(v, 0) + c
    return _af(coeffs, x.const + y.const)


def af_scale(x: AffineForm, k: int) -> AffineForm:
    if k == 0:
        return af_const(0)
    return _af({v: c * k for v, c in x.terms}, x.const * k)


def af_neg(x: AffineForm) -> AffineForm:
    return af_scale(x, -1)


def af_mod(x: AffineForm, m: int) -> AffineForm:
    """Coefficients and constant reduced into [0, m); same value mod m."""
    return _af({v: c % m for v, c in x.terms}, x.const % m)


@dataclass(frozen=True)
class FloorTerm:
    numerator: AffineForm
    denominator: int


@dataclass(frozen=True)
class QuadExpr:
    quad: tuple = ()    # (((v1, v2), coeff), ...) with v1 <= v2, sorted
    affine: AffineForm = AffineForm(())
    floors: tuple = ()  # ((coeff, FloorTerm), ...)

    def variables(self) -> set:
        out = self.affine.variables()
        for (u, v), _ in self.quad:
            out.add(u)
            out.add(v)
        for _, ft in self.floors:
            out |= ft.numerator.variables()
        return out

    def quad_variables(self) -> set:
        out = set()
        for (u, v), _ in self.quad:
            out.add(u)
            out.add(v)
        return out

    def floor_variables(self) -> set:
        out = set()
        for _, ft in self.floors:
            out |= ft.numerator.variables()
        return out

    def is_zero(self) -> bool:
        return not self.quad and not self.floors and self.affine.is_zero()

    def is_affine(self) -> bool:
        return not self.quad and not self.floors


def _qx(quad: Mapping, affine: AffineForm, floors) -> QuadExpr:
    qterms = tuple(sorted((pair, c) for pair, c in quad.items() if c != 0))
    fl = {}
    for coeff, ft in floors:
        if coeff == 0:
            continue
        fl[ft] = fl.get(ft, 0) + coeff
    fterms = tuple(
        sorted(
            ((c, ft) for ft, c in fl.items() if c != 0),
            key=lambda it: (it[1].denominator, it[1].numerator.terms, it[1].numerator.const),
        )
    )
    return QuadExpr(qterms, affine, fterms)


def qx_from_affine(x: AffineForm) -> QuadExpr:
    return QuadExpr((), x, ())


def qx_add(x: QuadExpr, y: QuadExpr) -> QuadExpr:
    quad = dict(x.quad)
    for pair, c in y.quad:
        quad[pair] = quad.get(pair, 0) + c
    return _qx(quad, af_add(x.affine, y.affine), list(x.floors) + list(y.floors))


def qx_scale(x: QuadExpr, k: int) -> QuadExpr:
    if k == 0:
        return QuadExpr()
    return _qx(
        {pair: c * k for pair, c in x.quad},
        af_scale(x.affine, k),
        [(c * k, ft) for c, ft in x.floors],
    )


def qx_neg(x: QuadExpr) -> QuadExpr:
    return qx_scale(x, -1)


def qx_add_affine(x: QuadExpr, y: AffineForm) -> QuadExpr:
    return QuadExpr(x.quad, af_add(x.affine, y), x.floors)


def mul_affine(x: AffineForm, y: AffineForm) -> QuadExpr:
    """Product of two affine forms as a quadratic expression."""
    quad: dict = {}
    for u, cu in x.terms:
        for v, cv in y.terms:
            pair = (u, v) if u <= v else (v, u)
            quad[pair] = quad.get(pair, 0) + cu * cv
    coeffs: dict = {}
    if y.const != 0:
        for u, cu in x.terms:
            coeffs[u] = coeffs.get(u, 0) + cu * y.const
    if x.const != 0:
        for v, cv in y.terms:
            coeffs[v] = coeffs.get(v, 0) + cv * x.const
    return _qx(quad, _af(coeffs, x.const * y.const), ())


def qx_mod(x: QuadExpr, m: int) -> QuadExpr:
    """All coefficients reduced into [0, m); same value mod m pointwise."""
    return _qx(
        {pair: c % m for pair, c in x.quad},
        af_mod(x.affine, m),
        [(c % m, ft) for c, ft in x.floors],
    )


def eval_symbolic(expr, sigma: Mapping):
    """Exact evaluation; floors divide toward minus infinity.

    Values may be ints or numpy integer arrays.
    """
    if isinstance(expr, AffineForm):
        total = expr.const
        for v, c in expr.terms:
            if v not in sigma:
                raise UnassignedVariable(f"variable {v} not assigned")
            total = total + c * sigma[v]
        return total
    if isinstance(expr, FloorTerm):
        return eval_symbolic(expr.numerator, sigma) // expr.denominator
    if isinstance(expr, QuadExpr):
        total = eval_symbolic(expr.affine, sigma)
        for (u, v), c in expr.quad:
            for w in (u, v):
                if w not in sigma:
                    raise UnassignedVariable(f"variable {w} not assigned")
            total = total + c * sigma[u] * sigma[v]
        for c, ft in expr.floors:
            total = total + c * eval_symbolic(ft, sigma)
        return total
    raise TypeError(f"cannot evaluate {type(expr).__name__}")


def canonical_floor(numerator: AffineForm, denominator: int):
    """Splits floor(numerator / denominator) into affine + canonical floor.

    Multiples of the denominator move out of the floor:
    floor((q*d + rho)/d) = q + floor(rho/d) with every residual coefficient
    in [0, d).  Returns (extracted AffineForm, FloorTerm or None); the floor
    is None when the residual is constant (then its floor is zero) or the
    denominator is 1.
    """
    if denominator == 1:
        return numerator, None
    extracted = _af(
        {v: c // denominator for v, c in numerator.terms},
        numerator.const // denominator,
    )
    residual = _af(
        {v: c % denominator for v, c in numerator.terms},
        numerator.const % denominator,
    )
    if residual.is_constant():
        return extracted, None
    return extracted, FloorTerm(residual, denominator)


# ---------------------------------------------------------------------------
# rendering and JSON
# ---------------------------------------------------------------------------

def render_affine(x: AffineForm) -> str:
    parts = []
    for v, c in x.terms:
        if c == 1:
            parts.append(f"+ {v}")
        elif c == -1:
            parts.append(f"- {v}")
        elif c < 0:
            parts.append(f"- {-c}*{v}")
        else:
            parts.append(f"+ {c}*{v}")
    if x.const != 0 or not parts:
        parts.append(f"+ {x.const}" if x.const >= 0 else f"- {-x.const}")
    out = " ".join(parts)
    return out[2:] if out.startswith("+ ") else "-" + out[2:]


def render_quad(x: QuadExpr) -> str:
    parts = []
    for (u, v), c in x.quad:
        mono = f"{u}*{v}" if u != v else f"{u}^2"
        if c == 1:
            parts.append(f"+ {mono}")
        elif c == -1:
            parts.append(f"- {mono}")
        elif c < 0:
            parts.append(f"- {-c}*{mono}")
        else:
            parts.append(f"+ {c}*{mono}")
    for c, ft in x.floors:
        body = f"floor(({render_affine(ft.numerator)})/{ft.denominator})"
        if c == 1:
            parts.append(f"+ {body}")
        elif c == -1:
            parts.append(f"- {body}")
        elif c < 0:
            parts.append(f"- {-c}*{body}")
        else:
            parts.append(f"+ {c}*{body}")
    if not x.affine.is_zero() or not parts:
        rendered = render_affine(x.affine)
        parts.append(f"- {rendered[1:]}" if rendered.startswith("-") else f"+ {rendered}")
    out = " ".join(parts)
    return out[2:] if out.startswith("+ ") else "-" + out[2:]


def affine_to_dict(x: AffineForm) -> dict:
    return {"const": x.const, "lin": [[v, c] for v, c in x.terms]}


def affine_from_dict(doc: Mapping) -> AffineForm:
    return _af({v: c for v, c in doc.get("lin", [])}, doc.get("const", 0))


def quad_to_dict(x: QuadExpr) -> dict:
    return {
        "const": x.affine.const,
        "lin": [[v, c] for v, c in x.affine.terms],
        "quad": [[u, v, c] for (u, v), c in x.quad],
        "floors": [
            [c, affine_to_dict(ft.numerator), ft.denominator] for c, ft in x.floors
        ],
    }


def quad_from_dict(doc: Mapping) -> QuadExpr:
    return _qx(
        {(u, v): c for u, v, c in doc.get("quad", [])},
        affine_from_dict(doc),
        [
            (c, FloorTerm(affine_from_dict(num), den))
            for c, num, den in doc.get("floors", [])
        ],
    )


# ---------------------------------------------------------------------------
# symbolic elements and collection
# ---------------------------------------------------------------------------

class Block(NamedTuple):
    """Integer-variable names backing one group variable."""

    a: tuple
    b: tuple
    c: str
    d: tuple

    def all_names(self) -> tuple:
        return (*self.a, *self.b, self.c, *self.d)


@dataclass(frozen=True)
class SymElement:
    """A group element with symbolic exponents (ordered-word semantics).

    a/b entries are affine; only c/d entries may be quadratic.  b entries
    are allowed to wander outside [0, l_i): the element they denote is the
    ordered product a^a b^b c^c d^d, reduced only when asked.
    """

    a: tuple
    b: tuple
    c: QuadExpr
    d: tuple


def sym_identity(p: MalcevPresentation) -> SymElement:
    return SymElement(
        tuple(af_const(0) for _ in range(p.n)),
        tuple(af_const(0) for _ in range(p.r)),
        QuadExpr(),
        tuple(QuadExpr() for _ in range(p.t)),
    )


def sym_from_constant(p: MalcevPresentation, w: NormalForm) -> SymElement:
    return SymElement(
        tuple(af_const(x) for x in w.a),
        tuple(af_const(x) for x in w.b),
        qx_from_affine(af_const(w.c)),
        tuple(qx_from_affine(af_const(x)) for x in w.d),
    )


def sym_block(p: MalcevPresentation, block: Block) -> SymElement:
    return SymElement(
        tuple(af_var(v) for v in block.a),
        tuple(af_var(v) for v in block.b),
        qx_from_affine(af_var(block.c)),
        tuple(qx_from_affine(af_var(v)) for v in block.d),
    )


def _sym_pair_costs(p: MalcevPresentation, ua, ub, va, vb) -> list:
    """Symbolic twin of malcev.pair_costs; entries are QuadExprs."""
    costs = [QuadExpr() for _ in range(p.t + 1)]

    def add(vec, product: QuadExpr):
        c, d = vec
        if c != 0:
            costs[0] = qx_add(costs[0], qx_scale(product, c))
        for m, dm in enumerate(d):
            if dm != 0:
                costs[m + 1] = qx_add(costs[m + 1], qx_scale(product, dm))

    for (i, j), vec in p.gamma.items():
        add(vec, qx_neg(mul_affine(ub[j - 1], va[i - 1])))
    for (i, j), vec in p.alpha.items():
        add(vec, mul_affine(ua[j - 1], va[i - 1]))
    for (i, j), vec in p.beta.items():
        add(vec, mul_affine(ub[j - 1], vb[i - 1]))
    return costs


def sym_multiply(p: MalcevPresentation, u: SymElement, v: SymElement) -> SymElement:
    costs = _sym_pair_costs(p, u.a, u.b, v.a, v.b)
    return SymElement(
        tuple(af_add(x, y) for x, y in zip(u.a, v.a)),
        tuple(af_add(x, y) for x, y in zip(u.b, v.b)),
        qx_add(qx_add(u.c, v.c), costs[0]),
        tuple(
            qx_add(qx_add(x, y), w) for x, y, w in zip(u.d, v.d, costs[1:])
        ),
    )


def sym_invert(p: MalcevPresentation, u: SymElement) -> SymElement:
    q = _sym_pair_costs(p, u.a, u.b, u.a, u.b)
    return SymElement(
        tuple(af_neg(x) for x in u.a),
        tuple(af_neg(x) for x in u.b),
        qx_add(qx_neg(u.c), q[0]),
        tuple(qx_add(qx_neg(x), qm) for x, qm in zip(u.d, q[1:])),
    )


def _binom_times(e: AffineForm, q: int) -> QuadExpr:
    """q * C(e, 2) as a QuadExpr; only exact for even q."""
    if q == 0:
        return QuadExpr()
    if q % 2 != 0:
        raise UnsupportedTwist(
            f"image self-cost {q} is odd: C(e,2)*{q} has no integer-coefficient form"
        )
    half = q // 2
    esq = mul_affine(e, e)
    return qx_add_affine(qx_scale(esq, half), af_scale(e, -half))


def _sym_power_concrete(p: MalcevPresentation, g: NormalForm, e: AffineForm) -> SymElement:
    """g^e for a concrete g and a symbolic exponent, unreduced."""
    q = malcev.self_costs(p, g.a, g.b)
    c = qx_add(qx_from_affine(af_scale(e, g.c)), _binom_times(e, q[0]))
    d = tuple(
        qx_add(qx_from_affine(af_scale(e, gd)), _binom_times(e, qm))
        for gd, qm in zip(g.d, q[1:])
    )
    return SymElement(
        tuple(af_scale(e, x) for x in g.a),
        tuple(af_scale(e, x) for x in g.b),
        c,
        d,
    )


def apply_automorphism_symbolic(
    p: MalcevPresentation, theta: Automorphism, u: SymElement
) -> SymElement:
    """Symbolic image of u; commutes with concrete application pointwise.

    The a/b part is the product of generator images raised to u's affine
    exponents; the central part of u contributes linearly because images of
    c and the d_i are central.
    """
    acc = sym_identity(p)
    for rho in range(p.n + p.r):
        e = u.a[rho] if rho < p.n else u.b[rho - p.n]
        if e.is_zero():
            continue
        acc = sym_multiply(p, acc, _sym_power_concrete(p, theta.images[rho], e))
    c = acc.c
    d = list(acc.d)
    central_images = theta.images[p.n + p.r:]
    central_exponents = [u.c, *u.d]
    for img, q in zip(central_images, central_exponents):
        c = qx_add(c, qx_scale(q, img.c))
        for m in range(p.t):
            if img.d[m] != 0:
                d[m] = qx_add(d[m], qx_scale(q, img.d[m]))
    return SymElement(acc.a, acc.b, c, tuple(d))


@dataclass(frozen=True)
class SymbolicNormalForm:
    """Collected symbolic exponents of the whole equation word.

    a entries evaluate to the exact a-exponents of the substituted word;
    b entries match modulo l_i (coefficients are stored reduced into
    [0, l_i)); the c entry is exact, floors included; d entries match
    modulo k_m.
    """

    a: tuple
    b: tuple
    b_mod: tuple
    c: QuadExpr
    d: tuple
    d_mod: tuple
    variables: tuple          # registry, in block order
    blocks: Mapping           # group variable -> Block

    def block_of(self, var: str) -> Block:
        return self.blocks[var]


def allocate_blocks(eq: EquationWord, p: MalcevPresentation):
    registry: list = []
    blocks: dict = {}
    for var in eq.variables:
        names = tuple(f"{var}_{g}" for g in p.names)
        n, r = p.n, p.r
        block = Block(
            a=names[:n],
            b=names[n:n + r],
            c=names[n + r],
            d=names[n + r + 1:],
        )
        blocks[var] = block
        registry.extend(names)
    return tuple(registry), blocks


def symbolic_collect(eq: EquationWord, p: MalcevPresentation) -> SymbolicNormalForm:
    """Collects the equation word with one shared block per distinct variable."""
    registry, blocks = allocate_blocks(eq, p)
    acc = sym_from_constant(p, eq.constants[0])
    for occ, w in zip(eq.occurrences, eq.constants[1:]):
        value = sym_block(p, blocks[occ.var])
        if occ.twist is not None:
            value = apply_automorphism_symbolic(p, occ.twist, value)
        if occ.epsilon == -1:
            value = sym_invert(p, value)
        acc = sym_multiply(p, acc, value)
        acc = sym_multiply(p, acc, sym_from_constant(p, w))

    c = acc.c
    d = list(acc.d)
    b_stored = []
    for i in range(p.r):
        li = p.l[i]
        total = acc.b[i]
        extracted, floor = canonical_floor(total, li)
        vec = p.eta.get(i + 1)
        if vec is not None:
            ec, ed = vec
            for weight, row in [(ec, None), *[(em, m) for m, em in enumerate(ed)]]:
                if weight == 0:
                    continue
                cost = qx_from_affine(af_scale(extracted, weight))
                if floor is not None:
                    cost = qx_add(cost, _qx({}, af_const(0), [(weight, floor)]))
                if row is None:
                    c = qx_add(c, cost)
                else:
                    d[row] = qx_add(d[row], cost)
        b_stored.append(af_mod(total, li))
    return SymbolicNormalForm(
        a=acc.a,
        b=tuple(b_stored),
        b_mod=p.l,
        c=c,
        d=tuple(d),
        d_mod=p.k,
        variables=registry,
        blocks=blocks,
    )


# ---------------------------------------------------------------------------
# the integer system
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZSystem:
    """Linear equations, linear congruences, quadratic equations with floor
    terms, and quadratic congruences, over a registry of integer variables.
    """

    linear_eqs: tuple
    linear_congs: tuple   # ((AffineForm, modulus), ...)
    quad_eqs: tuple
    quad_congs: tuple     # ((QuadExpr, modulus), ...)
    variables: tuple

    def __post_init__(self):
        known = set(self.variables)
        used = set()
        for f in self.linear_eqs:
            used |= f.variables()
        for f, m in self.linear_congs:
            used |= f.variables()
            if m < 1:
                raise ReductionError(f"congruence modulus {m} < 1")
        for q in self.quad_eqs:
            used |= q.variables()
        for q, m in self.quad_congs:
            used |= q.variables()
            if m < 1:
                raise ReductionError(f"congruence modulus {m} < 1")
        stray = used - known
        if stray:
            raise ReductionError(f"unregistered variables in system: {sorted(stray)}")

    def is_empty(self) -> bool:
        return not (
            self.linear_eqs or self.linear_congs or self.quad_eqs or self.quad_congs
        )


def build_zsystem(snf: SymbolicNormalForm) -> ZSystem:
    """One row per generator exponent, trivially-true rows dropped.

    a rows become linear equations, b rows congruences mod l_i, the c row
    the quadratic equation, d rows quadratic congruences mod k_m.  An
    assignment satisfies the system iff the substituted word is the
    identity.  Congruence rows store coefficients reduced into [0, m).
    """
    linear_eqs = tuple(f for f in snf.a if not f.is_zero())
    linear_congs = []
    for f, m in zip(snf.b, snf.b_mod):
        if m == 1:
            continue
        row = af_mod(f, m)
        if not row.is_zero():
            linear_congs.append((row, m))
    quad_eqs = () if snf.c.is_zero() else (snf.c,)
    quad_congs = []
    for q, m in zip(snf.d, snf.d_mod):
        if m == 1:
            continue
        row = qx_mod(q, m)
        if not row.is_zero():
            quad_congs.append((row, m))
    return ZSystem(
        linear_eqs=linear_eqs,
        linear_congs=tuple(linear_congs),
        quad_eqs=quad_eqs,
        quad_congs=tuple(quad_congs),
        variables=snf.variables,
    )


def zsystem_to_dict(sys: ZSystem) -> dict:
    return {
        "variables": list(sys.variables),
        "linear_eqs": [affine_to_dict(f) for f in sys.linear_eqs],
        "linear_congs": [
            {"expr": affine_to_dict(f), "mod": m} for f, m in sys.linear_congs
        ],
        "quad_eqs": [quad_to_dict(q) for q in sys.quad_eqs],
        "quad_congs": [
            {"expr": quad_to_dict(q), "mod": m} for q, m in sys.quad_congs
        ],
    }


def zsystem_from_dict(doc: Mapping) -> ZSystem:
    return ZSystem(
        linear_eqs=tuple(affine_from_dict(d) for d in doc.get("linear_eqs", [])),
        linear_congs=tuple(
            (affine_from_dict(d["expr"]), d["mod"]) for d in doc.get("linear_congs", [])
        ),
        quad_eqs=tuple(quad_from_dict(d) for d in doc.get("quad_eqs", [])),
        quad_congs=tuple(
            (quad_from_dict(d["expr"]), d["mod"]) for d in doc.get("quad_congs", [])
        ),
        variables=tuple(doc.get("variables", [])),
    )


def render_zsystem(sys: ZSystem) -> str:
    lines = []
    for f in sys.linear_eqs:
        lines.append(f"{render_affine(f)} = 0")
    for f, m in sys.linear_congs:
        lines.append(f"{render_affine(f)} == 0  (mod {m})")
    for q in sys.quad_eqs:
        lines.append(f"{render_quad(q)} = 0")
    for q, m in sys.quad_congs:
        lines.append(f"{render_quad(q)} == 0  (mod {m})")
    if not lines:
        lines.append("(empty system: every assignment is a solution)")
    return "\n".join(lines)
