"""Representation counts and the divisor-sum formulas built from lift coefficients."""

from fractions import Fraction

import pytest

from core import tables
from core.catalog import SpaceBasis
from core.errors import UnsupportedBasisElement
from core.repcount import (
    DivisorSumFormula,
    NewformPool,
    count_brute,
    count_series,
    eval_formula,
    formula_from_combo,
    formula_from_lambdas,
)
from core.lincomb import ComboResult, ComboStatus
from core.shimura import QuadForm


class TestCounts:

    def test_sum_of_five_squares(self):
        """r_5(n) for n = 0..3."""
        assert count_series(QuadForm.parse("1^5"), 3) == [1, 10, 40, 80]

    @pytest.mark.parametrize("text, n, expected", [
        ("1^4,2", 0, 1),
        ("1^4,2", 1, 8),
        ("1^4,2", 4, 72),
        ("2,3^4", 2, 2),
        ("1^3,2,4", 1, 6),
        ("1^4,3", 4, 40),
        ("1,4^4", 16, 90),
        ("1^3,2^2", 16, 474),
    ])
    def test_hand_values(self, text, n, expected):
        """Counts checked by hand."""
        assert count_brute(QuadForm.parse(text), n) == expected

    @pytest.mark.parametrize("text", ["1^5", "1^4,2", "1,2^2,3^2", "1^6,4", "1^3,3^6"])
    def test_brute_force_agrees_with_series(self, text):
        """Enumeration and the theta product agree."""
        form = QuadForm.parse(text)
        series = count_series(form, 40)
        assert [count_brute(form, n) for n in range(41)] == series

    def test_brute_force_agrees_on_every_table_form(self):
        """Enumeration and the theta product agree for every tabulated form through n = 200."""
        forms = {row.form for table_id in tables.TABLE_IDS for row in tables.load(table_id).rows}
        for form in sorted(forms, key=str):
            series = count_series(form, 200)
            assert [count_brute(form, n) for n in range(201)] == series, str(form)

    def test_negative_arguments(self):
        """Counts are for n >= 0."""
        form = QuadForm.parse("1^5")
        with pytest.raises(ValueError):
            count_brute(form, -1)
        with pytest.raises(ValueError):
            count_series(form, -1)


class TestDivisorSumFormula:

    def _quinary(self):
        return DivisorSumFormula(
            form=QuadForm.parse("1^4,2"), twist=1,
            sigma_terms=[(Fraction(8), 1), (Fraction(-128), 4)],
        )

    def test_properties(self):
        """Powers and indices follow from the rank."""
        formula = self._quinary()
        assert formula.ell == 5
        assert formula.power == 1
        assert formula.sigma_index == 3
        assert formula.argument_scale == 1

    @pytest.mark.parametrize("n, expected", [(1, 8), (2, 72), (3, 248), (4, 456)])
    def test_eval(self, n, expected):
        """8 sigma_3(3) + 24 sigma_3(1) = 248 at n = 3."""
        assert eval_formula(self._quinary(), n) == expected

    def test_eval_matches_counts(self):
        """The formula reproduces r_5(1^4,2; n^2)."""
        formula = self._quinary()
        form = formula.form
        counts = count_series(form, 30 * 30)
        for n in range(1, 31):
            assert eval_formula(formula, n) == counts[n * n]

    def test_eval_needs_positive_n(self):
        """n = 0 is outside the formula."""
        with pytest.raises(ValueError):
            eval_formula(self._quinary(), 0)

    def test_describe(self):
        """Readable rendering of the terms."""
        assert "sigma_3(n/4d)" in self._quinary().describe()
        assert DivisorSumFormula(QuadForm.parse("1^5"), 1).describe() == "0"


class TestFromLambdas:

    def test_eisenstein_terms(self, catalog):
        """Lambdas in M_4(4) become sigma terms; zero lambdas are skipped."""
        space = catalog.space("M_4(4)")
        form = QuadForm.parse("1^4,2")
        formula = formula_from_lambdas([Fraction(1, 30), Fraction(0), Fraction(-8, 15)], space, form, 1)
        assert formula.sigma_terms == [(8, 1), (-128, 4)]
        assert formula.newform_terms == []

    def test_newform_terms(self, catalog):
        """The cusp form of M_4(8) becomes a newform term."""
        space = catalog.space("M_4(8)")
        form = QuadForm.parse("1,2^3,4")
        lambdas = [Fraction(1, 120), Fraction(-1, 120), Fraction(1, 30), Fraction(-8, 15), Fraction(1)]
        formula = formula_from_lambdas(lambdas, space, form, 1)
        assert formula.newform_terms == [(1, "Delta_4_8", 1)]
        assert len(formula.sigma_terms) == 4

    def test_length_mismatch(self, catalog):
        """One coefficient per basis element."""
        with pytest.raises(ValueError):
            formula_from_lambdas([Fraction(1)], catalog.space("M_4(4)"), QuadForm.parse("1^4,2"), 1)

    def test_inconsistent_combo(self, catalog):
        """An unsolved combination has no formula."""
        combo = ComboResult("M_4(4)", status=ComboStatus.INCONSISTENT)
        with pytest.raises(ValueError):
            formula_from_combo(combo, catalog.space("M_4(4)"), QuadForm.parse("1^4,2"), 1)

    def test_unsupported_element(self, catalog):
        """Aux forms in a basis cannot be turned into divisor sums."""
        space = SpaceBasis("odd", 8, 8, [catalog.form("G_4_8")], catalog)
        with pytest.raises(UnsupportedBasisElement):
            formula_from_lambdas([Fraction(1)], space, QuadForm.parse("1^9"), 1)


class TestNewformPool:

    def test_tau_grows_on_demand(self, catalog):
        """Providers extend past their first bound."""
        pool = NewformPool(catalog)
        assert pool.tau("Delta_8_2", 3) == 12
        assert pool.tau("Delta_8_2", 0) == 0
        first = pool.get("Delta_8_2", 10).bound
        assert pool.get("Delta_8_2", first + 1).bound > first
