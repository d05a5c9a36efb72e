"""Exact solving over the rationals and basis expansion."""

import random
from fractions import Fraction

import pytest

from core.errors import Inconsistent, InsufficientTruncation, Underdetermined
from core.lincomb import ComboStatus, combine, rank, series_equal, solve_exact, solve_in_basis
from core.qseries import QSeries


class TestSolveExact:

    def test_unique_solution(self):
        """A square non-singular system."""
        assert solve_exact([[1, 1], [1, -1]], [3, 1]) == [2, 1]

    def test_rational_solution(self):
        """Solutions stay exact."""
        assert solve_exact([[3]], [1]) == [Fraction(1, 3)]

    def test_inconsistent(self):
        """An overdetermined inconsistent system gives None."""
        assert solve_exact([[1], [1]], [1, 2]) is None

    def test_dependent_columns(self):
        """Dependent columns are reported."""
        with pytest.raises(Underdetermined):
            solve_exact([[1, 2], [2, 4]], [1, 2])

    def test_row_count_mismatch(self):
        """Matrix and right-hand side must have the same rows."""
        with pytest.raises(ValueError):
            solve_exact([[1]], [1, 2])

    def test_rank(self):
        """Rank over the rationals."""
        assert rank([[1, 2], [2, 4]]) == 1
        assert rank([[1, 0], [0, 1], [1, 1]]) == 2


class TestSeriesHelpers:

    def test_combine(self):
        """Linear combination of columns."""
        a = QSeries([1, 0, 1])
        b = QSeries([0, 1, 1])
        assert combine([a, b], [2, 3]).coeffs == (2, 3, 5)

    def test_series_equal(self):
        """Equality through a bound; too-short series raise."""
        a = QSeries([1, 2, 3])
        b = QSeries([1, 2, 4])
        assert series_equal(a, b, 1)
        assert not series_equal(a, b, 2)
        with pytest.raises(InsufficientTruncation):
            series_equal(a, b, 5)


class TestSolveInBasis:

    def test_basis_element(self, catalog):
        """E4(2z) has coordinates (0, 1, 0) in M_4(4)."""
        space = catalog.space("M_4(4)")
        combo = solve_in_basis(catalog.expand("E4@2", 12), space)
        assert combo.status is ComboStatus.EXACT
        assert combo.coefficients == [0, 1, 0]
        assert combo.residual_zero_through == 12

    def test_constant_mismatch(self, catalog):
        """Rows n >= 1 match but the constant term does not."""
        space = catalog.space("M_4(4)")
        e4 = catalog.expand("E4@1", 12)
        target = QSeries([5] + list(e4.coeffs[1:]))
        combo = solve_in_basis(target, space)
        assert combo.status is ComboStatus.CONSTANT_MISMATCH
        assert combo.ok
        assert combo.constant_term_solved == 1

    def test_not_in_span(self, catalog):
        """q alone is not a weight 4 form of level 4."""
        space = catalog.space("M_4(4)")
        combo = solve_in_basis(QSeries([0, 1], 12), space)
        assert combo.status is ComboStatus.INCONSISTENT
        with pytest.raises(Inconsistent):
            combo.require_consistent()

    def test_needs_two_sturm_bounds(self, catalog):
        """The solve reads rows 1..2B."""
        space = catalog.space("M_4(4)")
        with pytest.raises(InsufficientTruncation):
            solve_in_basis(QSeries([1, 240, 2160]), space)

    def test_solve_rows_cover_invisible_dilate(self, catalog):
        """E4(4z) vanishes on rows 1..3, so M_4(4) solves on rows 1..4."""
        combo = solve_in_basis(catalog.expand("E4@1", 12), catalog.space("M_4(4)"))
        assert catalog.space("M_4(4)").sturm_bound == 3
        assert combo.solve_rows == 4

    def test_late_row_only_verifies(self, catalog):
        """A change at row 2B leaves the solve alone and is caught by verification."""
        space = catalog.space("M_4(4)")
        e4 = list(catalog.expand("E4@1", 12).coeffs)
        e4[6] += 1
        combo = solve_in_basis(QSeries(e4), space)
        assert combo.status is ComboStatus.INCONSISTENT
        assert combo.coefficients == [1, 0, 0]
        assert combo.first_bad_row == 6
        assert combo.residual_zero_through == 5

    @pytest.mark.parametrize("name", ["M_4(12)", "M_6(8)", "M_8(6)"])
    @pytest.mark.parametrize("seed", [1, 7])
    def test_random_combination_recovered(self, catalog, name, seed):
        """A random rational combination of the basis solves back to itself."""
        rng = random.Random(seed)
        space = catalog.space(name)
        lambdas = [Fraction(rng.randint(-50, 50), rng.randint(1, 12)) for _ in range(space.dimension)]
        target = combine(space.series(2 * space.sturm_bound + 4), lambdas)
        combo = solve_in_basis(target, space)
        assert combo.status is ComboStatus.EXACT
        assert combo.coefficients == lambdas
        assert space.sturm_bound <= combo.solve_rows <= 2 * space.sturm_bound
