"""Representation counts r_l(a; n) and divisor-sum formulas for them."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, List, Sequence, Tuple, Union

from .arith import CoeffProvider, divisors, kronecker, mobius, sigma
from .catalog import Catalog, SpaceBasis, load_catalog
from .errors import UnsupportedBasisElement
from .lincomb import ComboResult, ComboStatus
from .qseries import eisenstein_multiplier
from .shimura import QuadForm, theta_product

logger = logging.getLogger(__name__)

# Smallest bound a newform provider is built with; grows on demand.
PROVIDER_FLOOR = 64


@lru_cache(maxsize=1 << 18)
def _count_tail(coeffs: Tuple[int, ...], remaining: int) -> int:
    """Vectors over the given coefficients with sum a_i x_i^2 = remaining."""
    if not coeffs:
        return 1 if remaining == 0 else 0
    a, rest = coeffs[0], coeffs[1:]
    total = _count_tail(rest, remaining)
    x = 1
    while a * x * x <= remaining:
        total += 2 * _count_tail(rest, remaining - a * x * x)
        x += 1
    return total


def count_brute(form: QuadForm, n: int) -> int:
    """Count integer vectors x with sum a_i x_i^2 = n by direct enumeration.

    Each variable runs over |x_i| <= floor(sqrt(remaining / a_i)); counts
    for a (coefficient tail, remaining) pair are memoized across calls.
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    # largest coefficient first prunes hardest
    return _count_tail(form.coeffs[::-1], n)


def count_series(form: QuadForm, upto: int) -> List[int]:
    """r_l(a; n) for n = 0..upto, read off the theta product."""
    if upto < 0:
        raise ValueError(f"upto must be non-negative, got {upto}")
    return [int(c) for c in theta_product(form, upto).coeffs]


@dataclass
class DivisorSumFormula:
    """Closed formula for r_l(a; |t| n^2).

    r = sum_{d|n, (d,2N)=1} mu(d) psi_a(d) (t/d) d^((l-3)/2) b(n/d) where
    b(m) = sum c_j sigma_{l-2}(m/m_j) + sum c tau(m/s), and sigma, tau
    vanish off the positive integers.
    """
    form: QuadForm
    twist: int
    sigma_terms: List[Tuple[Fraction, int]] = field(default_factory=list)  # (c_j, m_j)
    newform_terms: List[Tuple[Fraction, str, int]] = field(default_factory=list)  # (c, name, scale)
    label: str = ""

    @property
    def ell(self) -> int:
        return self.form.ell

    @property
    def power(self) -> int:
        return (self.ell - 3) // 2

    @property
    def sigma_index(self) -> int:
        return self.ell - 2

    @property
    def argument_scale(self) -> int:
        """r is evaluated at this multiple of n^2."""
        return abs(self.twist)

    def describe(self) -> str:
        parts = [f"{c}*sigma_{self.sigma_index}(n/{m}d)" for c, m in self.sigma_terms]
        parts += [f"{c}*tau[{name}](n/{s}d)" for c, name, s in self.newform_terms]
        return " + ".join(parts) if parts else "0"


class NewformPool:
    """Lazily grown coefficient providers for the catalog newforms."""

    def __init__(self, catalog: Catalog = None):
        self.catalog = catalog
        self.providers: Dict[str, CoeffProvider] = {}

    def get(self, name: str, upto: int) -> CoeffProvider:
        provider = self.providers.get(name)
        if provider is None or provider.bound < upto:
            catalog = self.catalog or load_catalog()
            bound = max(upto, PROVIDER_FLOOR, 2 * provider.bound if provider else 0)
            provider = catalog.newform_coeffs(name, bound)
            self.providers[name] = provider
        return provider

    def tau(self, name: str, n: int) -> int:
        if n < 1:
            return 0
        return self.get(name, n)(n)


def _inner_value(formula: DivisorSumFormula, m: int, pool: NewformPool) -> Fraction:
    """b(m): the lifted coefficient written through sigma and newform terms."""
    total = Fraction(0)
    for c, scale in formula.sigma_terms:
        if m % scale == 0:
            total += c * sigma(formula.sigma_index, m // scale)
    for c, name, scale in formula.newform_terms:
        if m % scale == 0:
            total += c * pool.tau(name, m // scale)
    return total


def eval_formula(formula: DivisorSumFormula, n: int, pool: NewformPool = None) -> Union[int, Fraction]:
    """Evaluate the Mobius-inverted divisor sum at n >= 1."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    pool = pool or NewformPool()
    modulus = 2 * formula.form.level
    total = Fraction(0)
    for d in divisors(n):
        if gcd(d, modulus) != 1:
            continue
        mu = mobius(d)
        if not mu:
            continue
        weight = mu * formula.form.psi(d) * kronecker(formula.twist, d)
        if weight:
            total += weight * d ** formula.power * _inner_value(formula, n // d, pool)
    if total.denominator != 1:
        logger.warning("%s at n=%d evaluated to non-integer %s", formula.label or formula.form, n, total)
    return int(total) if total.denominator == 1 else total


def formula_from_combo(combo: ComboResult, basis: SpaceBasis, form: QuadForm, twist: int) -> DivisorSumFormula:
    """Turn solved basis coefficients into sigma and newform terms."""
    if combo.status is ComboStatus.INCONSISTENT:
        raise ValueError(f"{form}: cannot build a formula from an inconsistent combination")
    return formula_from_lambdas(combo.coefficients, basis, form, twist)


def formula_from_lambdas(lambdas: Sequence[Fraction], basis: SpaceBasis, form: QuadForm,
                         twist: int) -> DivisorSumFormula:
    """Turn basis coefficients, solved or printed, into sigma and newform terms."""
    if len(lambdas) != len(basis.elements):
        raise ValueError(f"{form}: {len(lambdas)} coefficients for {len(basis.elements)} basis elements")
    formula = DivisorSumFormula(form=form, twist=twist, label=f"{form} in {basis.name}")
    for lam, spec in zip(lambdas, basis.elements):
        if not lam:
            continue
        eis = spec.eisenstein_dilate()
        if eis is not None:
            k, t = eis
            formula.sigma_terms.append((lam * eisenstein_multiplier(k), t))
            continue
        newform = spec.newform_dilate()
        if newform is not None:
            name, t = newform
            formula.newform_terms.append((lam, name, t))
            continue
        raise UnsupportedBasisElement(f"{spec.name} in {basis.name} is neither an Eisenstein nor a newform dilate")
    return formula
