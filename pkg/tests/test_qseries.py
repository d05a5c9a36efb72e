"""Truncated q-series arithmetic and the standard building blocks."""

import random
from fractions import Fraction

import pytest

from core.errors import NonIntegralLeadingExponent, SeriesNotInvertible
from core.qseries import (
    QSeries,
    derivative_D,
    dilate,
    eisenstein,
    eisenstein2,
    eisenstein_multiplier,
    eta_quotient,
    theta,
)


class TestQSeries:

    def test_truncation_pads_and_cuts(self):
        """Explicit truncation pads with zeros or drops the tail."""
        assert QSeries([1, 2], 4).coeffs == (1, 2, 0, 0, 0)
        assert QSeries([1, 2, 3, 4], 1).coeffs == (1, 2)

    def test_negative_truncation_rejected(self):
        """Truncation must be non-negative."""
        with pytest.raises(ValueError):
            QSeries([1], -1)

    def test_product_truncates_to_shorter(self):
        """(1+q)^2 through q^2; the result keeps the smaller truncation."""
        a = QSeries([1, 1, 0, 0])
        b = QSeries([1, 1, 0])
        assert (a * b).coeffs == (1, 2, 1)

    def test_power_and_inverse(self):
        """(1-q)^-1 is the geometric series."""
        s = QSeries([1, -1, 0, 0, 0])
        assert (s ** -1).coeffs == (1, 1, 1, 1, 1)
        assert (s ** 2).coeffs == (1, -2, 1, 0, 0)

    def test_inverse_needs_constant_term(self):
        """A series with zero constant term is not invertible."""
        with pytest.raises(SeriesNotInvertible):
            QSeries([0, 1, 0]).inverse()

    def test_scalar_arithmetic(self):
        """Scalars act coefficientwise; added scalars go to the constant term."""
        s = QSeries([1, 2, 3])
        assert (s * 2).coeffs == (2, 4, 6)
        assert (s + 1).coeffs == (2, 2, 3)
        assert (s / 2)[1] == 1
        assert (s - s).coeffs == (0, 0, 0)

    def test_dilate(self):
        """f(2z) moves c_n to c_2n and keeps the truncation."""
        s = QSeries([1, 2, 3, 4, 5])
        assert dilate(s, 2).coeffs == (1, 0, 2, 0, 3)
        with pytest.raises(ValueError):
            dilate(s, 0)

    def test_shift_and_valuation(self):
        """Multiplying by q raises the valuation by one."""
        s = QSeries([1, 1, 0, 0])
        assert s.shift(1).coeffs == (0, 1, 1, 0)
        assert s.shift(1).valuation() == 1
        assert QSeries.zero(3).valuation() == 4

    def test_derivative(self):
        """D = q d/dq multiplies c_n by n."""
        assert QSeries([5, 1, 1, 1]).derivative().coeffs == (0, 1, 2, 3)

    def test_integrality(self):
        """A single fractional coefficient makes the series non-integral."""
        assert QSeries([1, 2]).is_integral()
        assert not QSeries([1, Fraction(1, 2)]).is_integral()


class TestBuildingBlocks:

    def test_theta(self):
        """Theta has coefficient 2 at every positive square."""
        assert theta(10).coeffs == (1, 2, 0, 0, 2, 0, 0, 0, 0, 2, 0)

    def test_eisenstein_four(self):
        """E4 = 1 + 240 sum sigma_3(n) q^n."""
        e4 = eisenstein(4, 3)
        assert e4.coeffs == (1, 240, 2160, 6720)

    def test_eisenstein_rejects_odd_weight(self):
        """Only even k >= 4."""
        with pytest.raises(ValueError):
            eisenstein(5, 3)
        with pytest.raises(ValueError):
            eisenstein(2, 3)

    @pytest.mark.parametrize("k, expected", [(4, 240), (6, -504), (8, 480)])
    def test_eisenstein_multiplier(self, k, expected):
        """-2k/B_k for the weights the bases use."""
        assert eisenstein_multiplier(k) == expected

    def test_eisenstein2(self):
        """E2 = 1 - 24 sum sigma(n) q^n."""
        assert eisenstein2(3).coeffs == (1, -24, -72, -96)

    def test_eta_quotient_weight_four_level_eight(self):
        """eta(2z)^4 eta(4z)^4 = q - 4q^3 - 2q^5 + 24q^7 + ..."""
        f = eta_quotient([(2, 4), (4, 4)], 7)
        assert f.coeffs == (0, 1, 0, -4, 0, -2, 0, 24)

    def test_eta_quotient_weight_eight_level_two(self):
        """eta(z)^8 eta(2z)^8 begins q - 8q^2 + 12q^3."""
        f = eta_quotient([(1, 8), (2, 8)], 3)
        assert f.coeffs == (0, 1, -8, 12)

    def test_eta_quotient_non_integral_exponent(self):
        """eta(z) alone has leading exponent 1/24."""
        with pytest.raises(NonIntegralLeadingExponent):
            eta_quotient([(1, 1)], 5)

    def test_theta_squared_counts_two_squares(self):
        """Theta^2 gives r_2(n)."""
        assert (theta(5) ** 2).coeffs == (1, 4, 4, 0, 4, 8)


def _random_series(rng: random.Random, trunc: int = 12, unit: bool = False) -> QSeries:
    coeffs = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(trunc + 1)]
    if unit and not coeffs[0]:
        coeffs[0] = Fraction(1)
    return QSeries(coeffs)


class TestRingLaws:

    @pytest.fixture(params=[3, 17, 2024])
    def rng(self, request):
        return random.Random(request.param)

    def test_commutative_ring(self, rng):
        """Addition and the truncated product satisfy the commutative ring axioms."""
        a, b, c = (_random_series(rng) for _ in range(3))
        assert a + b == b + a
        assert a * b == b * a
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a - a == QSeries.zero(12)
        assert a * QSeries.constant(1, 12) == a

    def test_inverse(self, rng):
        """f * f^-1 = 1 for a unit constant term."""
        a = _random_series(rng, unit=True)
        assert a * a.inverse() == QSeries.constant(1, 12)

    def test_leibniz_rule(self, rng):
        """D(fg) = D(f) g + f D(g)."""
        a, b = _random_series(rng), _random_series(rng)
        assert derivative_D(a * b) == derivative_D(a) * b + a * derivative_D(b)
        assert (a * b).derivative() == derivative_D(a * b)

    def test_dilate_composition(self, rng):
        """f(2(3z)) = f(6z), and dilation is a ring homomorphism."""
        a, b = _random_series(rng), _random_series(rng)
        assert dilate(dilate(a, 2), 3) == dilate(a, 6)
        assert dilate(a * b, 3) == dilate(a, 3) * dilate(b, 3)
        assert dilate(a + b, 2) == dilate(a, 2) + dilate(b, 2)
