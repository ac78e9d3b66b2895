"""Parser, normalization and evaluation of equation words."""

import random

import pytest

from nilsolve import catalog, fuzz, malcev
from nilsolve.equations import (
    EquationWord,
    MalformedExponent,
    MissingEquals,
    UnassignedVariable,
    UnknownAutomorphism,
    UnknownSymbol,
    parse_equation,
    normalize_equation,
    serialize_equation,
    substitute,
)

WORKED = "X b a1 c X a2 c^-3 a1 X = 1"


def nf(p, *vec):
    return malcev.element_from_vector(p, list(vec))


class TestParse:
    def test_worked_example_shape(self, torsion):
        eq = parse_equation(WORKED, torsion)
        assert [occ.var for occ in eq.occurrences] == ["X", "X", "X"]
        assert [occ.epsilon for occ in eq.occurrences] == [1, 1, 1]
        assert eq.variables == ("X",)
        assert len(eq.constants) == 4

    def test_constant_only(self, torsion):
        eq = parse_equation("a1 = 1", torsion)
        assert eq.occurrences == ()
        assert eq.constants == (nf(torsion, 1, 0, 0, 0, 0),)

    def test_unknown_symbol(self, torsion):
        with pytest.raises(UnknownSymbol, match="q"):
            parse_equation("X q = 1", torsion)

    def test_malformed_exponent(self, torsion):
        with pytest.raises(MalformedExponent):
            parse_equation("a1^x = 1", torsion)

    def test_missing_equals(self, torsion):
        with pytest.raises(MissingEquals):
            parse_equation("X a1", torsion)
        with pytest.raises(MissingEquals):
            parse_equation("X = a1", torsion)

    def test_unknown_automorphism(self, heis):
        with pytest.raises(UnknownAutomorphism):
            parse_equation("nosuch:X = 1", heis)

    def test_twist_and_inverse(self, heis):
        eq = parse_equation("inv:X^-1 a1 = 1", heis)
        occ = eq.occurrences[0]
        assert occ.epsilon == -1
        assert occ.twist is heis.automorphisms["inv"]

    def test_variable_power_expands(self, line):
        eq = parse_equation("X^2 a^3 Y^2 a^-3 Y^-1 a = 1", line)
        assert [o.var for o in eq.occurrences] == ["X", "X", "Y", "Y", "Y"]
        assert [o.epsilon for o in eq.occurrences] == [1, 1, 1, 1, -1]


class TestNormalize:
    def test_worked_example_matches_collected_form(self, torsion):
        eq = normalize_equation(parse_equation(WORKED, torsion), torsion)
        assert serialize_equation(eq, torsion) == "X a1 b X a1 a2 X c^-3 d = 1"

    def test_merges_adjacent_constants(self, torsion):
        eq = normalize_equation(parse_equation("a1 a1^2 X = 1", torsion), torsion)
        assert eq.constants[0] == nf(torsion, 3, 0, 0, 0, 0)

    def test_identity_between_occurrences(self, torsion):
        eq = normalize_equation(parse_equation("X Y = 1", torsion), torsion)
        assert all(w.is_identity() for w in eq.constants)
        assert len(eq.constants) == 3

    def test_idempotent(self, torsion, rng):
        cfg = fuzz.FuzzConfig()
        for _ in range(25):
            eq = fuzz.random_equation(torsion, rng, cfg)
            once = normalize_equation(eq, torsion)
            assert normalize_equation(once, torsion) == once

    def test_preserves_solution_set(self, torsion, rng):
        cfg = fuzz.FuzzConfig()
        for _ in range(25):
            eq = fuzz.random_equation(torsion, rng, cfg)
            normal = normalize_equation(eq, torsion)
            for _ in range(10):
                sigma = {
                    var: malcev.random_element(torsion, rng, 3) for var in eq.variables
                }
                assert substitute(eq, torsion, sigma) == substitute(normal, torsion, sigma)


class TestSubstitute:
    def test_solves(self, heis):
        eq = parse_equation("X a1 = 1", heis)
        assert substitute(eq, heis, {"X": nf(heis, -1, 0, 0)}).is_identity()

    def test_non_solution(self, heis):
        eq = parse_equation("X a1 = 1", heis)
        assert substitute(eq, heis, {"X": malcev.identity(heis)}) == nf(heis, 1, 0, 0)

    def test_worked_example_at_identity(self, torsion):
        eq = parse_equation(WORKED, torsion)
        value = substitute(eq, torsion, {"X": malcev.identity(torsion)})
        # With X = 1 the word is just its constants, so direct generator
        # evaluation must agree (indices: a1=0, a2=1, b=2, c=3, d=4).
        direct = malcev.evaluate_word(
            torsion, [(2, 1), (0, 1), (3, 1), (1, 1), (3, -3), (0, 1)]
        )
        assert value == direct
        assert not value.is_identity()

    def test_unassigned_variable(self, heis):
        eq = parse_equation("X Y = 1", heis)
        with pytest.raises(UnassignedVariable):
            substitute(eq, heis, {"X": malcev.identity(heis)})

    def test_concatenation_is_homomorphic(self, torsion, rng):
        # substituting a concatenated word equals the product of the parts
        cfg = fuzz.FuzzConfig(max_variables=2, max_occurrences=2)
        for _ in range(20):
            left = fuzz.random_equation(torsion, rng, cfg)
            right = fuzz.random_equation(torsion, rng, cfg)
            glued = EquationWord(
                left.constants[:-1]
                + (malcev.multiply(torsion, left.constants[-1], right.constants[0]),)
                + right.constants[1:],
                left.occurrences + right.occurrences,
            )
            sigma = {
                var: malcev.random_element(torsion, rng, 3)
                for var in glued.variables
            }
            assert substitute(glued, torsion, sigma) == malcev.multiply(
                torsion,
                substitute(left, torsion, sigma),
                substitute(right, torsion, sigma),
            )


class TestRoundTrip:
    @pytest.mark.parametrize("group", ["torsion_heisenberg", "heisenberg", "integers"])
    def test_parse_serialize_identity(self, group):
        p = catalog.get_group(group)
        rng = random.Random(hash(group) & 0xFFFF)
        cfg = fuzz.FuzzConfig(twist_probability=0.5)
        for _ in range(40):
            eq = fuzz.random_equation(p, rng, cfg)
            text = serialize_equation(eq, p)
            again = parse_equation(text, p)
            assert again == eq, text
