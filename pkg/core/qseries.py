"""Truncated q-expansions with exact rational coefficients."""

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, List, Sequence, Tuple, Union

from .arith import bernoulli_number, sigma
from .errors import NonIntegralLeadingExponent, SeriesNotInvertible

Scalar = Union[int, Fraction]


class QSeries:
    """A power series c_0 + c_1 q + ... + c_T q^T, known through q^T.

    Values are immutable; every binary operation truncates to the
    smaller of the two truncations.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[Scalar], trunc: int = None):
        values = [Fraction(c) for c in coeffs]
        if trunc is not None:
            if trunc < 0:
                raise ValueError(f"truncation must be non-negative, got {trunc}")
            if len(values) > trunc + 1:
                values = values[:trunc + 1]
            else:
                values.extend([Fraction(0)] * (trunc + 1 - len(values)))
        if not values:
            raise ValueError("a series needs at least the constant coefficient")
        self._coeffs: Tuple[Fraction, ...] = tuple(values)

    @classmethod
    def constant(cls, value: Scalar, trunc: int) -> "QSeries":
        """The constant series value + O(q^(trunc+1))."""
        return cls([value], trunc)

    @classmethod
    def zero(cls, trunc: int) -> "QSeries":
        return cls([], trunc)

    @property
    def trunc(self) -> int:
        return len(self._coeffs) - 1

    @property
    def coeffs(self) -> Tuple[Fraction, ...]:
        return self._coeffs

    def __len__(self) -> int:
        return len(self._coeffs)

    def __getitem__(self, n):
        return self._coeffs[n]

    def __iter__(self):
        return iter(self._coeffs)

    def __repr__(self) -> str:
        head = ", ".join(str(c) for c in self._coeffs[:6])
        more = ", ..." if self.trunc >= 6 else ""
        return f"QSeries(trunc={self.trunc}, [{head}{more}])"

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def truncate(self, trunc: int) -> "QSeries":
        """Drop coefficients above q^trunc."""
        if trunc > self.trunc:
            raise ValueError(f"cannot extend truncation {self.trunc} to {trunc}")
        return QSeries(self._coeffs[:trunc + 1])

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self._coeffs)

    def valuation(self) -> int:
        """Index of the first nonzero coefficient, trunc+1 for the zero series."""
        for n, c in enumerate(self._coeffs):
            if c:
                return n
        return self.trunc + 1

    def __add__(self, other):
        if isinstance(other, QSeries):
            return add(self, other)
        if isinstance(other, (int, Fraction)):
            return add(self, QSeries.constant(other, self.trunc))
        return NotImplemented

    __radd__ = __add__

    def __neg__(self) -> "QSeries":
        return QSeries([-c for c in self._coeffs])

    def __sub__(self, other):
        if isinstance(other, (QSeries, int, Fraction)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, QSeries):
            return mul(self, other)
        if isinstance(other, (int, Fraction)):
            scale = Fraction(other)
            return QSeries([c * scale for c in self._coeffs])
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __pow__(self, power: int) -> "QSeries":
        if not isinstance(power, int):
            raise TypeError(f"only integer powers are supported, got {type(power)}")
        if power < 0:
            return self.inverse() ** (-power)
        result = QSeries.constant(1, self.trunc)
        base = self
        while power:
            if power & 1:
                result = result * base
            power >>= 1
            if power:
                base = base * base
        return result

    def inverse(self) -> "QSeries":
        """1/f for a series with unit-able constant term."""
        a = self._coeffs
        if a[0] == 0:
            raise SeriesNotInvertible("constant term is zero")
        inv0 = 1 / a[0]
        b = [inv0]
        support = [(i, c) for i, c in enumerate(a) if i and c]
        for n in range(1, self.trunc + 1):
            acc = Fraction(0)
            for i, c in support:
                if i > n:
                    break
                acc += c * b[n - i]
            b.append(-acc * inv0)
        return QSeries(b)

    def shift(self, s: int) -> "QSeries":
        """Multiply by q^s, keeping the truncation."""
        if s < 0:
            raise ValueError("negative shifts leave the power-series ring")
        if s == 0:
            return self
        return QSeries([0] * s + list(self._coeffs[:self.trunc + 1 - s]), self.trunc)

    def dilate(self, t: int) -> "QSeries":
        return dilate(self, t)

    def derivative(self) -> "QSeries":
        return derivative_D(self)

    def hecke(self, p: int, weight: int) -> "QSeries":
        """T_p for trivial character and p coprime to the level.

        The result is known through q^(trunc // p).
        """
        pk = p ** (weight - 1)
        out = []
        for n in range(self.trunc // p + 1):
            value = self._coeffs[n * p]
            if n % p == 0:
                value += pk * self._coeffs[n // p]
            out.append(value)
        return QSeries(out)


def _multiply(a: Sequence[Fraction], b: Sequence[Fraction], trunc: int) -> List[Fraction]:
    sparse_a = [(i, c) for i, c in enumerate(a[:trunc + 1]) if c]
    sparse_b = [(j, c) for j, c in enumerate(b[:trunc + 1]) if c]
    if len(sparse_a) > len(sparse_b):
        sparse_a, sparse_b = sparse_b, sparse_a
    integral = all(c.denominator == 1 for _, c in sparse_a) and all(
        c.denominator == 1 for _, c in sparse_b
    )
    if integral:
        out_int = [0] * (trunc + 1)
        dense_b = [0] * (trunc + 1)
        for j, c in sparse_b:
            dense_b[j] = c.numerator
        for i, c in sparse_a:
            ci = c.numerator
            for j in range(trunc + 1 - i):
                bj = dense_b[j]
                if bj:
                    out_int[i + j] += ci * bj
        return [Fraction(v) for v in out_int]
    out = [Fraction(0)] * (trunc + 1)
    for i, c in sparse_a:
        for j, d in sparse_b:
            if i + j > trunc:
                break
            out[i + j] += c * d
    return out


def add(a: QSeries, b: QSeries) -> QSeries:
    """Coefficientwise sum, truncated at the smaller truncation."""
    trunc = min(a.trunc, b.trunc)
    return QSeries([a[n] + b[n] for n in range(trunc + 1)])


def mul(a: QSeries, b: QSeries) -> QSeries:
    """Cauchy product, truncated at the smaller truncation."""
    trunc = min(a.trunc, b.trunc)
    return QSeries(_multiply(a.coeffs, b.coeffs, trunc))


def dilate(a: QSeries, t: int) -> QSeries:
    """f(z) -> f(tz): c_n moves to c_{tn}, truncation preserved."""
    if t < 1:
        raise ValueError(f"dilation factor must be positive, got {t}")
    if t == 1:
        return a
    out = [Fraction(0)] * (a.trunc + 1)
    for n in range(a.trunc // t + 1):
        out[n * t] = a[n]
    return QSeries(out)


def derivative_D(a: QSeries) -> QSeries:
    """D = q d/dq, so c_n -> n c_n."""
    return QSeries([n * c for n, c in enumerate(a.coeffs)])


@lru_cache(maxsize=64)
def _euler_product(trunc: int) -> QSeries:
    """prod_{n>=1} (1 - q^n) through q^trunc by the pentagonal number theorem."""
    coeffs = [0] * (trunc + 1)
    coeffs[0] = 1
    m = 1
    while True:
        p1 = m * (3 * m - 1) // 2
        p2 = m * (3 * m + 1) // 2
        if p1 > trunc:
            break
        sign = -1 if m % 2 else 1
        coeffs[p1] = sign
        if p2 <= trunc:
            coeffs[p2] = sign
        m += 1
    return QSeries(coeffs)


def eta_quotient(factors: Sequence[Tuple[int, int]], trunc: int) -> QSeries:
    """prod eta(t_i z)^{r_i} as an integer q-series.

    factors is a list of (dilation t_i, exponent r_i).
    """
    weighted = sum(t * r for t, r in factors)
    if weighted % 24 or weighted < 0:
        raise NonIntegralLeadingExponent(
            f"sum of t*r is {weighted}, leading exponent {weighted}/24 is not a non-negative integer"
        )
    lead = weighted // 24
    if lead > trunc:
        return QSeries.zero(trunc)
    body_trunc = trunc - lead
    base = _euler_product(body_trunc)
    body = QSeries.constant(1, body_trunc)
    for t, r in factors:
        if r:
            body = body * dilate(base, t) ** r
    if lead == 0:
        return body
    return QSeries([0] * lead + list(body.coeffs), trunc)


@lru_cache(maxsize=128)
def eisenstein(k: int, trunc: int) -> QSeries:
    """E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n for even k >= 4."""
    if k < 4 or k % 2:
        raise ValueError(f"Eisenstein series needs even k >= 4, got {k}")
    scale = -Fraction(2 * k) / bernoulli_number(k)
    return QSeries([1] + [scale * sigma(k - 1, n) for n in range(1, trunc + 1)])


def eisenstein_multiplier(k: int) -> Fraction:
    """-2k/B_k, the factor in front of sigma_{k-1} in E_k."""
    return -Fraction(2 * k) / bernoulli_number(k)


@lru_cache(maxsize=32)
def eisenstein2(trunc: int) -> QSeries:
    """Quasimodular E_2 = 1 - 24 sum sigma(n) q^n."""
    return QSeries([1] + [-24 * sigma(1, n) for n in range(1, trunc + 1)])


@lru_cache(maxsize=32)
def theta(trunc: int) -> QSeries:
    """Jacobi theta sum_{n in Z} q^{n^2}."""
    coeffs = [0] * (trunc + 1)
    coeffs[0] = 1
    n = 1
    while n * n <= trunc:
        coeffs[n * n] = 2
        n += 1
    return QSeries(coeffs)
