"""Diagonal forms, lift parameters and the coefficientwise lift."""

import random
from fractions import Fraction

import pytest

from core.errors import (
    AdmissibilityViolated,
    InsufficientTruncation,
    NotFundamental,
    ParseError,
    SignConditionViolated,
)
from core.qseries import QSeries
from core.shimura import LiftClaim, LiftParams, QuadForm, TwistKind, lift, lift_theta, theta_product


class TestQuadForm:

    def test_parse_multiplicity_notation(self):
        """Exponents are multiplicities; coefficients come back sorted."""
        assert QuadForm.parse("1^3,2,4").coeffs == (1, 1, 1, 2, 4)
        assert QuadForm.parse("(1^4, 2)").coeffs == (1, 1, 1, 1, 2)
        assert QuadForm((4, 1, 2)).coeffs == (1, 2, 4)

    @pytest.mark.parametrize("text", ["x", "1^0", "0", "1,,2", "1^"])
    def test_parse_errors(self, text):
        """Malformed notation raises ParseError."""
        with pytest.raises(ParseError):
            QuadForm.parse(text)

    def test_empty_form_rejected(self):
        """At least one coefficient."""
        with pytest.raises(ValueError):
            QuadForm(())

    def test_notation(self):
        """Exponent 1 is dropped when printing."""
        form = QuadForm.parse("1^3,2,4^2")
        assert form.notation() == "1^3,2,4^2"
        assert str(form) == "(1^3,2,4^2)"
        assert form.multiplicities == [(1, 3), (2, 1), (4, 2)]

    def test_invariants(self):
        """Rank, level, lift weight and the derived levels."""
        form = QuadForm.parse("1,2^2,3^2")
        assert form.ell == 5
        assert form.level == 6
        assert form.lift_weight == 2
        assert form.image_level == 12
        assert form.theta_level == 24

    @pytest.mark.parametrize("text, principal", [
        ("1^5", True),
        ("1^3,2^2", True),
        ("1^4,2", False),
        ("1,4^4", True),
        ("1^4,3", False),
        ("1^2,2,3^2,6", False),
    ])
    def test_principal_character(self, text, principal):
        """Each non-square coefficient must occur an even number of times."""
        assert QuadForm.parse(text).has_principal_character() is principal


class TestLiftParams:

    def test_sign_condition(self):
        """(-1)^k t must be positive."""
        with pytest.raises(SignConditionViolated):
            LiftParams.for_form(QuadForm.parse("1^6,2"), 1)

    def test_even_level_takes_fundamental_discriminant(self):
        """At even level a fundamental twist selects the Kohnen variant."""
        params = LiftParams.for_form(QuadForm.parse("1^4,2"), 1)
        assert params.twist.kind is TwistKind.FUNDAMENTAL
        assert params.kohnen
        assert params.image_weight == 4
        assert params.image_level == 4

    def test_odd_level_takes_square_free(self):
        """At odd level the twist is square-free."""
        params = LiftParams.for_form(QuadForm.parse("1^4,3"), 1)
        assert params.twist.kind is TwistKind.SQUARE_FREE
        assert not params.kohnen

    def test_square_free_required(self):
        """A twist with a square factor is refused at odd level."""
        with pytest.raises(NotFundamental):
            LiftParams.for_form(QuadForm.parse("1^5"), 4)

    def test_admissibility_gate(self):
        """t = -1 at even level needs the override."""
        form = QuadForm.parse("1,2,4^5")
        with pytest.raises(AdmissibilityViolated):
            LiftParams.for_form(form, -1)
        params = LiftParams.for_form(form, -1, assume_conjecture=True)
        assert params.claim is LiftClaim.ASSUMED_MAPPING

    @pytest.mark.parametrize("text, claim", [
        ("1^5", LiftClaim.PROVED),
        ("1^3,2^2", LiftClaim.PROVED),
        ("1^4,2", LiftClaim.CHARACTER_EXTENSION),
    ])
    def test_claim(self, text, claim):
        """Principal character lifts are proved; quadratic ones extend the character."""
        assert LiftParams.for_form(QuadForm.parse(text), 1).claim is claim


class TestLift:

    def test_theta_product_counts(self):
        """The theta product of (1^4,2) gives r_5 at 1 and 4."""
        series = theta_product(QuadForm.parse("1^4,2"), 4)
        assert series[1] == 8
        assert series[4] == 72

    def test_lift_matches_divisor_sum(self):
        """The lift of (1^4,2) is 8 sigma_3(n) - 128 sigma_3(n/4) on its first terms."""
        result = lift_theta(QuadForm.parse("1^4,2"), 1, 4)
        assert [result.series[n] for n in range(1, 5)] == [8, 72, 224, 456]
        assert result.constant_term_formula == result.series[0]

    def test_lift_with_negative_discriminant(self):
        """b(1) = a(4) for the (1^6,2) lift by D = -4."""
        result = lift_theta(QuadForm.parse("1^6,2"), -4, 3)
        assert result.series[1] == 372

    def test_insufficient_input(self):
        """The lift needs |t| T^2 input coefficients."""
        form = QuadForm.parse("1^4,2")
        params = LiftParams.for_form(form, 1)
        with pytest.raises(InsufficientTruncation):
            lift(theta_product(form, 3), params, 3)


class TestLiftLinearity:

    @pytest.mark.parametrize("seed", [5, 11, 2024])
    def test_lift_is_linear(self, seed):
        """S_t(a + b) = S_t(a) + S_t(b) and S_t(c a) = c S_t(a)."""
        rng = random.Random(seed)
        params = LiftParams.for_form(QuadForm.parse("1^4,2"), 1)
        a, b = (QSeries([rng.randint(-20, 20) for _ in range(26)]) for _ in range(2))
        c = Fraction(rng.randint(1, 9), rng.randint(1, 9))
        assert lift(a + b, params, 5) == lift(a, params, 5) + lift(b, params, 5)
        assert lift(a * c, params, 5) == lift(a, params, 5) * c
