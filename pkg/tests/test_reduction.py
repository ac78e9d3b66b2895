"""Symbolic collection: worked example, soundness oracle, shape limits."""

import itertools
import random

import pytest

from nilsolve import catalog, equations, fuzz, malcev, reduction
from nilsolve.equations import parse_equation, normalize_equation, substitute
from nilsolve.malcev import Automorphism
from nilsolve.reduction import (
    AffineForm,
    FloorTerm,
    UnsupportedTwist,
    af_add,
    af_const,
    af_var,
    apply_automorphism_symbolic,
    build_zsystem,
    eval_symbolic,
    symbolic_collect,
    sym_block,
    allocate_blocks,
)

WORKED = "X b a1 c X a2 c^-3 a1 X = 1"


def collect(p, text):
    eq = normalize_equation(parse_equation(text, p), p)
    return eq, symbolic_collect(eq, p)


def box_assignments(p, block, bound):
    """Every assignment of one block with a/c in [-bound, bound], b/d full."""
    spans = []
    spans += [range(-bound, bound + 1)] * p.n
    spans += [range(li) for li in p.l]
    spans.append(range(-bound, bound + 1))
    spans += [range(ki) for ki in p.k]
    for combo in itertools.product(*spans):
        yield dict(zip(block.all_names(), combo))


def element_of(p, block, sigma):
    n, r = p.n, p.r
    names = block.all_names()
    vec = [sigma[v] for v in names]
    return malcev.element_from_exponents(
        p, vec[:n], vec[n:n + r], vec[n + r], vec[n + r + 1:]
    )


def assert_sound_at(p, eq, snf, sigma):
    values = {var: element_of(p, snf.block_of(var), sigma) for var in eq.variables}
    concrete = substitute(eq, p, values)
    for i in range(p.n):
        assert eval_symbolic(snf.a[i], sigma) == concrete.a[i]
    for i in range(p.r):
        assert eval_symbolic(snf.b[i], sigma) % p.l[i] == concrete.b[i]
    assert eval_symbolic(snf.c, sigma) == concrete.c
    for i in range(p.t):
        assert eval_symbolic(snf.d[i], sigma) % p.k[i] == concrete.d[i]


class TestEvalSymbolic:
    def test_floor_positive(self):
        ft = FloorTerm(af_add(af_var("X"), af_const(1)), 2)
        assert eval_symbolic(ft, {"X": 1}) == 1

    def test_floor_rounds_toward_minus_infinity(self):
        ft = FloorTerm(af_add(af_var("X"), af_const(1)), 2)
        assert eval_symbolic(ft, {"X": -4}) == -2

    def test_worked_example_c_row_at_origin(self, torsion):
        _, snf = collect(torsion, WORKED)
        origin = {v: 0 for v in snf.variables}
        assert eval_symbolic(snf.c, origin) == -3

    def test_unassigned(self):
        with pytest.raises(equations.UnassignedVariable):
            eval_symbolic(af_var("X"), {})


class TestWorkedExample:
    def test_a_rows(self, torsion):
        _, snf = collect(torsion, WORKED)
        assert snf.a[0] == af_add(af_var("X_a1", 3), af_const(2))
        assert snf.a[1] == af_add(af_var("X_a2", 3), af_const(1))

    def test_b_row_reduced_mod_2(self, torsion):
        _, snf = collect(torsion, WORKED)
        sys = build_zsystem(snf)
        assert sys.linear_congs == ((af_add(af_var("X_b"), af_const(1)), 2),)

    def test_c_row_is_the_collected_cost(self, torsion):
        # Independently derived by hand collection (and confirmed pointwise
        # against direct substitution below): the exact c-exponent is
        # 3 X_c - 3 X_a1 X_a2 - 3 X_a2 - X_a1 - 3 + floor((3 X_b + 1) / 2).
        _, snf = collect(torsion, WORKED)
        for sigma_vals in itertools.product(range(-3, 4), repeat=5):
            sigma = dict(zip(snf.variables, sigma_vals))
            x1, x2, x3, x4, x5 = sigma_vals
            expected = 3 * x4 - 3 * x1 * x2 - 3 * x2 - x1 - 3 + (3 * x3 + 1) // 2
            assert eval_symbolic(snf.c, sigma) == expected

    def test_d_row_matches_reduced_polynomial(self, torsion):
        _, snf = collect(torsion, WORKED)
        sys = build_zsystem(snf)
        assert len(sys.quad_congs) == 1
        row, mod = sys.quad_congs[0]
        assert mod == 2
        for sigma_vals in itertools.product(range(-2, 3), repeat=5):
            sigma = dict(zip(snf.variables, sigma_vals))
            x1, x2, x3, _, x5 = sigma_vals
            assert (
                eval_symbolic(row, sigma) - (x1 * x3 + x2 * x3 + x3 + x5 + 1)
            ) % 2 == 0

    def test_pointwise_soundness_on_box(self, torsion):
        eq, snf = collect(torsion, WORKED)
        for sigma in box_assignments(torsion, snf.block_of("X"), 2):
            assert_sound_at(torsion, eq, snf, sigma)


class TestSimpleCollections:
    def test_single_occurrence_heisenberg(self, heis):
        _, snf = collect(heis, "a1 X = 1")
        assert snf.a[0] == af_add(af_var("X_a1"), af_const(1))
        assert snf.a[1] == af_var("X_a2")
        assert snf.c == reduction.qx_from_affine(af_var("X_c"))

    def test_constant_identity_equation_gives_empty_system(self, torsion):
        _, snf = collect(torsion, "1 = 1")
        assert build_zsystem(snf).is_empty()

    def test_nontrivial_constant_equation_is_infeasible(self, torsion):
        _, snf = collect(torsion, "a1 = 1")
        sys = build_zsystem(snf)
        assert sys.linear_eqs and sys.linear_eqs[0].const == 1


class TestSymbolicAutomorphisms:
    def test_identity_twist_keeps_block(self, heis):
        eq = normalize_equation(parse_equation("X = 1", heis), heis)
        _, blocks = allocate_blocks(eq, heis)
        block = sym_block(heis, blocks["X"])
        out = apply_automorphism_symbolic(heis, malcev.identity_automorphism(heis), block)
        assert out == block

    def test_inversion_twist(self, heis):
        eq = normalize_equation(parse_equation("X = 1", heis), heis)
        _, blocks = allocate_blocks(eq, heis)
        out = apply_automorphism_symbolic(heis, heis.automorphisms["inv"], sym_block(heis, blocks["X"]))
        sigma = {"X_a1": 1, "X_a2": 1, "X_c": 0}
        assert [eval_symbolic(e, sigma) for e in out.a] == [-1, -1]
        assert eval_symbolic(out.c, sigma) == 0

    def test_swap_twist_negates_centre_coefficient(self, heis):
        eq = normalize_equation(parse_equation("X = 1", heis), heis)
        _, blocks = allocate_blocks(eq, heis)
        out = apply_automorphism_symbolic(heis, heis.automorphisms["swap"], sym_block(heis, blocks["X"]))
        assert dict(out.c.affine.terms)["X_c"] == -1

    @pytest.mark.parametrize("name", ["inv", "swap", "shear", "id"])
    def test_commutes_with_concrete_application(self, heis, name, rng):
        theta = (
            malcev.identity_automorphism(heis)
            if name == "id"
            else heis.automorphisms[name]
        )
        eq = normalize_equation(parse_equation("X = 1", heis), heis)
        _, blocks = allocate_blocks(eq, heis)
        out = apply_automorphism_symbolic(heis, theta, sym_block(heis, blocks["X"]))
        for _ in range(50):
            sigma = {v: rng.randint(-4, 4) for v in blocks["X"].all_names()}
            u = element_of(heis, blocks["X"], sigma)
            img = malcev.apply_automorphism(heis, theta, u)
            assert [eval_symbolic(e, sigma) for e in out.a] == list(img.a)
            assert eval_symbolic(out.c, sigma) == img.c

    def test_odd_self_cost_image_rejected(self, heis):
        # a1 -> a1 a2, a2 -> a2 is an automorphism whose first image has an
        # odd self-collection cost; its symbolic action needs half-integer
        # quadratic coefficients, so it is rejected rather than mangled.
        theta = malcev.validate_automorphism(
            heis,
            Automorphism(
                images=(
                    malcev.element_from_vector(heis, [1, 1, 0]),
                    malcev.element_from_vector(heis, [0, 1, 0]),
                    malcev.element_from_vector(heis, [0, 0, 1]),
                ),
                inverse_images=(
                    malcev.element_from_vector(heis, [1, -1, 0]),
                    malcev.element_from_vector(heis, [0, 1, 0]),
                    malcev.element_from_vector(heis, [0, 0, 1]),
                ),
                name="slide",
            ),
        )
        eq = normalize_equation(parse_equation("X = 1", heis), heis)
        _, blocks = allocate_blocks(eq, heis)
        with pytest.raises(UnsupportedTwist):
            apply_automorphism_symbolic(heis, theta, sym_block(heis, blocks["X"]))


class TestShapeInvariants:
    def _central_block_vars(self, snf):
        out = set()
        for block in snf.blocks.values():
            out.add(block.c)
            out.update(block.d)
        return out

    @pytest.mark.parametrize("group", ["torsion_heisenberg", "heisenberg"])
    def test_central_variables_stay_affine(self, group):
        # Central block variables may only enter the affine parts of the
        # c/d rows: no quadratic monomial or floor numerator mentions them.
        p = catalog.get_group(group)
        rng = random.Random(hash(group) & 0xFFF)
        cfg = fuzz.FuzzConfig(twist_probability=0.4)
        for _ in range(40):
            eq = normalize_equation(fuzz.random_equation(p, rng, cfg), p)
            snf = symbolic_collect(eq, p)
            central = self._central_block_vars(snf)
            for row in (snf.c, *snf.d):
                assert not (row.quad_variables() & central)
                assert not (row.floor_variables() & central)
            for form in (*snf.a, *snf.b):
                assert isinstance(form, AffineForm)
                assert not (form.variables() & central)

    def test_floor_numerators_all_affine(self, torsion, rng):
        cfg = fuzz.FuzzConfig(twist_probability=0.4)
        for _ in range(40):
            eq = normalize_equation(fuzz.random_equation(torsion, rng, cfg), torsion)
            snf = symbolic_collect(eq, torsion)
            for row in (snf.c, *snf.d):
                for _coeff, ft in row.floors:
                    assert isinstance(ft.numerator, AffineForm)
                    assert ft.denominator >= 1


class TestSoundness:
    @pytest.mark.parametrize("group", ["torsion_heisenberg", "heisenberg"])
    def test_random_equations_pointwise(self, group):
        p = catalog.get_group(group)
        rng = random.Random(hash(group) & 0xFFFF)
        cfg = fuzz.FuzzConfig(twist_probability=0.3)
        for _ in range(30):
            eq = normalize_equation(fuzz.random_equation(p, rng, cfg), p)
            snf = symbolic_collect(eq, p)
            for _ in range(60):
                sigma = {v: rng.randint(-2, 2) for v in snf.variables}
                assert_sound_at(p, eq, snf, sigma)

    def test_system_satisfaction_iff_identity(self, torsion, rng):
        cfg = fuzz.FuzzConfig(max_occurrences=2, twist_probability=0.3)
        from nilsolve.zsolver import verify_witness

        for _ in range(20):
            eq = normalize_equation(fuzz.random_equation(torsion, rng, cfg), torsion)
            snf = symbolic_collect(eq, torsion)
            sys = build_zsystem(snf)
            for _ in range(40):
                sigma = {v: rng.randint(-2, 2) for v in snf.variables}
                values = {
                    var: element_of(torsion, snf.block_of(var), sigma)
                    for var in eq.variables
                }
                concrete = substitute(eq, torsion, values)
                assert verify_witness(sys, sigma) == concrete.is_identity()
