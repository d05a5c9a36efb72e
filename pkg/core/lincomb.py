"""Exact linear algebra over the rationals and basis expansion of q-series."""

import logging
from dataclasses import dataclass, field
from enum import Enum, auto
from fractions import Fraction
from math import gcd, lcm
from typing import List, Optional, Sequence, Tuple

from .errors import InsufficientTruncation, Inconsistent, Underdetermined
from .qseries import QSeries

logger = logging.getLogger(__name__)


class ComboStatus(Enum):
    EXACT = auto()
    CONSTANT_MISMATCH = auto()
    INCONSISTENT = auto()


@dataclass
class ComboResult:
    """A target series written in a basis."""
    basis_name: str
    coefficients: List[Fraction] = field(default_factory=list)  # aligned with basis order
    residual_zero_through: int = 0  # rows 1..this are verified zero
    constant_term_target: Fraction = Fraction(0)
    constant_term_solved: Fraction = Fraction(0)
    constant_term_formula: Optional[Fraction] = None  # a(0) * H_k when known
    status: ComboStatus = ComboStatus.INCONSISTENT
    first_bad_row: Optional[int] = None
    solve_rows: int = 0  # rows 1..this were solved on, later rows only verify

    @property
    def ok(self) -> bool:
        return self.status is not ComboStatus.INCONSISTENT

    def require_consistent(self) -> "ComboResult":
        """Raise Inconsistent unless a solution was found."""
        if not self.ok:
            raise Inconsistent(
                f"target is not in the span of {self.basis_name} (first bad row {self.first_bad_row})"
            )
        return self


def _integer_row(values: Sequence[Fraction]) -> List[int]:
    """Scale a rational row to a primitive integer row."""
    den = 1
    for v in values:
        den = lcm(den, Fraction(v).denominator)
    row = [int(Fraction(v) * den) for v in values]
    content = 0
    for v in row:
        content = gcd(content, v)
    if content > 1:
        row = [v // content for v in row]
    return row


def row_echelon(matrix: Sequence[Sequence[Fraction]], pivot_columns: int = None) -> Tuple[List[List[int]], List[int]]:
    """Fraction-free forward elimination.

    Rows are scaled to primitive integer vectors and every elimination
    step is an integer cross-multiplication followed by removal of the
    row content. Only the first pivot_columns columns are used as pivots.
    Returns the echelon rows and the pivot column list.
    """
    rows = [_integer_row(r) for r in matrix]
    if not rows:
        return rows, []
    ncols = len(rows[0])
    if pivot_columns is None:
        pivot_columns = ncols
    pivots: List[int] = []
    r = 0
    for c in range(pivot_columns):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        top = rows[r]
        a = top[c]
        for i in range(r + 1, len(rows)):
            b = rows[i][c]
            if not b:
                continue
            new = [a * x - b * y for x, y in zip(rows[i], top)]
            content = 0
            for v in new:
                content = gcd(content, v)
            if content > 1:
                new = [v // content for v in new]
            rows[i] = new
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(matrix: Sequence[Sequence[Fraction]]) -> int:
    """Rank over the rationals."""
    return len(row_echelon(matrix)[1])


def solve_exact(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Optional[List[Fraction]]:
    """Unique solution of matrix * x = rhs, or None when inconsistent.

    Raises Underdetermined when the columns are dependent.
    """
    if len(matrix) != len(rhs):
        raise ValueError("row count of matrix and right-hand side differ")
    ncols = len(matrix[0])
    augmented = [list(row) + [b] for row, b in zip(matrix, rhs)]
    rows, pivots = row_echelon(augmented, pivot_columns=ncols)
    if len(pivots) < ncols:
        raise Underdetermined(f"rank {len(pivots)} < {ncols} columns")
    for row in rows[len(pivots):]:
        if row[ncols]:
            return None
    x = [Fraction(0)] * ncols
    for r in range(ncols - 1, -1, -1):
        row = rows[r]
        acc = Fraction(row[ncols])
        for j in range(r + 1, ncols):
            if row[j]:
                acc -= row[j] * x[j]
        x[r] = acc / row[r]
    return x


def series_equal(a: QSeries, b: QSeries, through: int) -> bool:
    """True iff a and b agree on every coefficient n <= through."""
    if a.trunc < through or b.trunc < through:
        raise InsufficientTruncation(through, min(a.trunc, b.trunc))
    return all(a[n] == b[n] for n in range(through + 1))


def combine(columns: Sequence[QSeries], coefficients: Sequence[Fraction]) -> QSeries:
    """sum_j coefficients[j] * columns[j]."""
    trunc = min(c.trunc for c in columns)
    out = [Fraction(0)] * (trunc + 1)
    for col, lam in zip(columns, coefficients):
        if lam:
            for n in range(trunc + 1):
                if col[n]:
                    out[n] += lam * col[n]
    return QSeries(out)


def _solve_rows(columns: Sequence[QSeries], first: int, last: int) -> int:
    """Smallest m in first..last with rows 1..m of full column rank, else last."""
    for m in range(first, last + 1):
        if rank([[col[n] for col in columns] for n in range(1, m + 1)]) == len(columns):
            return m
    return last


def solve_in_basis(target: QSeries, basis, constant_term_formula: Optional[Fraction] = None) -> ComboResult:
    """Express target in the basis.

    Solves on rows 1..B (B the Sturm bound of the basis space) with row 0
    held out. Bases with a dilate invisible on rows 1..B take further rows
    until the system has full rank. Every remaining known row, from the
    solve rows through at least 2B, is verification only, and the constant
    term is compared last.
    """
    bound = basis.sturm_bound
    rows_needed = 2 * bound
    if target.trunc < rows_needed:
        raise InsufficientTruncation(rows_needed, target.trunc)
    columns = basis.series(target.trunc)
    solve_rows = _solve_rows(columns, bound, rows_needed)
    matrix = [[col[n] for col in columns] for n in range(1, solve_rows + 1)]
    rhs = [target[n] for n in range(1, solve_rows + 1)]
    solution = solve_exact(matrix, rhs)
    result = ComboResult(
        basis_name=basis.name,
        constant_term_target=target[0],
        constant_term_formula=constant_term_formula,
        solve_rows=solve_rows,
    )
    if solution is None:
        logger.debug("target not in span of %s on rows 1..%d", basis.name, solve_rows)
        return result
    result.coefficients = solution
    combo = combine(columns, solution)
    through = 0
    for n in range(1, target.trunc + 1):
        if combo[n] != target[n]:
            result.first_bad_row = n
            break
        through = n
    result.residual_zero_through = through
    result.constant_term_solved = combo[0]
    if result.first_bad_row is not None:
        logger.debug("%s: solved on rows 1..%d but row %d differs",
                     basis.name, solve_rows, result.first_bad_row)
        return result
    if combo[0] == target[0]:
        result.status = ComboStatus.EXACT
    else:
        result.status = ComboStatus.CONSTANT_MISMATCH
    return result
