"""Divisor sums, characters, Bernoulli numbers and the s_i / C_i sums."""

from fractions import Fraction
from math import gcd

import pytest

from core.arith import (
    CoeffProvider,
    bernoulli_number,
    c_function,
    divisors,
    factorize,
    generalized_bernoulli,
    is_fundamental,
    kronecker,
    l_value,
    mobius,
    psi_a,
    s_function,
    s_function_product,
    sigma,
    sigma_at,
    split_prime_power,
)
from core.errors import CoprimalityViolation, EvenArgument


class TestDivisorFunctions:

    @pytest.mark.parametrize("k, n, expected", [
        (0, 12, 6),
        (1, 12, 28),
        (3, 2, 9),
        (3, 3, 28),
        (3, 4, 73),
        (5, 2, 33),
    ])
    def test_sigma(self, k, n, expected):
        """sigma_k against small hand values."""
        assert sigma(k, n) == expected

    def test_sigma_at_non_integer_is_zero(self):
        """sigma vanishes off the positive integers."""
        assert sigma_at(3, Fraction(3, 2)) == 0
        assert sigma_at(3, Fraction(0)) == 0
        assert sigma_at(3, Fraction(4)) == 73

    @pytest.mark.parametrize("n, expected", [(1, 1), (2, -1), (4, 0), (6, 1), (30, -1), (12, 0)])
    def test_mobius(self, n, expected):
        """Moebius function on square-free and non-square-free n."""
        assert mobius(n) == expected

    def test_divisors_sorted(self):
        """Divisors come back sorted."""
        assert divisors(12) == (1, 2, 3, 4, 6, 12)

    def test_factorize_roundtrip(self):
        """Factorization rebuilds its own value."""
        f = factorize(360)
        assert f.pairs == ((2, 3), (3, 2), (5, 1))
        assert f.value() == 360
        assert f.exponent(7) == 0

    def test_split_prime_power(self):
        """n = p^lam m with p not dividing m."""
        assert split_prime_power(24, 2) == (3, 3)
        assert split_prime_power(7, 2) == (0, 7)
        assert split_prime_power(54, 3) == (3, 2)

    @pytest.mark.parametrize("k", [0, 1, 3, 7])
    def test_sigma_multiplicative(self, k):
        """sigma_k(mn) = sigma_k(m) sigma_k(n) for coprime m, n."""
        for m in range(1, 30):
            for n in range(1, 30):
                if gcd(m, n) == 1:
                    assert sigma(k, m * n) == sigma(k, m) * sigma(k, n)

    def test_mobius_sums_over_divisors(self):
        """sum_{d | n} mu(d) vanishes except at n = 1."""
        for n in range(1, 101):
            assert sum(mobius(d) for d in divisors(n)) == (1 if n == 1 else 0)


class TestCharacters:

    @pytest.mark.parametrize("a, n, expected", [
        (-4, 3, -1),
        (-4, 5, 1),
        (2, 3, -1),
        (2, 7, 1),
        (-3, 2, -1),
        (5, 2, -1),
        (1, 2, 1),
        (2, 4, 0),
        (-3, 7, 1),
    ])
    def test_kronecker(self, a, n, expected):
        """Kronecker symbol including the 2-adic cases."""
        assert kronecker(a, n) == expected

    def test_psi_a_is_product_of_symbols(self):
        """psi_a(d) multiplies (a_j/d) over the coefficients."""
        assert psi_a((1, 1, 1, 1, 2), 3) == -1
        assert psi_a((1, 1, 1, 2, 2), 3) == 1
        assert psi_a((1, 1, 1, 1, 3), 5) == -1

    @pytest.mark.parametrize("D, expected", [
        (1, True), (-3, True), (-4, True), (5, True), (8, True), (-8, True), (12, True),
        (2, False), (-1, False), (4, False), (-12, False), (9, False),
    ])
    def test_is_fundamental(self, D, expected):
        """Fundamental discriminants, 1 included."""
        assert is_fundamental(D) is expected

    @pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47])
    def test_euler_criterion(self, p):
        """(a/p) = a^((p-1)/2) mod p for odd primes p."""
        for a in range(-2 * p, 2 * p + 1):
            assert pow(a, (p - 1) // 2, p) == kronecker(a, p) % p


class TestBernoulli:

    def test_bernoulli_numbers(self):
        """B_1 = -1/2 convention and the usual even values."""
        assert bernoulli_number(1) == Fraction(-1, 2)
        assert bernoulli_number(2) == Fraction(1, 6)
        assert bernoulli_number(4) == Fraction(-1, 30)
        assert bernoulli_number(6) == Fraction(1, 42)

    def test_generalized_bernoulli_minus_four(self):
        """B_{1,chi_-4} = -1/2."""
        assert generalized_bernoulli(1, -4) == Fraction(-1, 2)

    def test_l_value_trivial_character(self):
        """L(-3, 1) = -B_4/4 = 1/120."""
        assert l_value(4, 1) == Fraction(1, 120)

    def test_l_value_rejects_small_k(self):
        """k must be at least 2."""
        with pytest.raises(ValueError):
            l_value(1, -4)


class TestSFunctions:

    def test_s2_at_three(self):
        """8 s_2(3) = 8 sigma_3(3) + 24 = 248."""
        assert s_function(2, 3) == 31

    def test_s_function_at_one(self):
        """Every s_i(1) is sigma_w(1) = 1."""
        for index in range(1, 8):
            assert s_function(index, 1) == 1

    @pytest.mark.parametrize("index", [1, 2, 3, 4, 5, 6, 7])
    @pytest.mark.parametrize("m", [3, 5, 9, 15, 25, 27, 45])
    def test_product_form_agrees(self, index, m):
        """Divisor-sum and Euler-product forms of s_i agree on odd m."""
        assert s_function(index, m) == s_function_product(index, m)

    def test_even_argument_rejected(self):
        """s_i is only defined on odd m."""
        with pytest.raises(EvenArgument):
            s_function(2, 4)

    def test_skip_primes_drops_three_part(self):
        """Skipping 3 evaluates at the 3-free part of m."""
        assert s_function(1, 15, skip_primes=(3,)) == s_function(1, 5)


class TestCFunctions:

    def test_c_function_at_one(self):
        """C_i(1) = tau(1)."""
        provider = CoeffProvider("f", (0, 1, 0, -4))
        assert c_function(1, 1, provider) == 1

    def test_c_function_divisor_sum(self):
        """C_1(3) = tau(3) - (2/3) 3 tau(1) = -4 + 3."""
        provider = CoeffProvider("f", (0, 1, 0, -4))
        assert c_function(1, 3, provider) == -1

    def test_coprimality_enforced(self):
        """C_1 excludes 2 and C_2 excludes 2 and 3."""
        provider = CoeffProvider("f", tuple(range(10)))
        with pytest.raises(CoprimalityViolation):
            c_function(1, 2, provider)
        with pytest.raises(CoprimalityViolation):
            c_function(2, 9, provider)

    def test_provider_bound(self):
        """Index past the bound raises; non-positive indices read as zero."""
        provider = CoeffProvider("f", (0, 1, 2))
        assert provider(0) == 0
        with pytest.raises(IndexError):
            provider(3)
