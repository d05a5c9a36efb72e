"""Divisor functions, characters, L-values and the s_i / C_i sums."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Tuple

import sympy

from .errors import CoprimalityViolation, EvenArgument, NotFundamental

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Factorization:
    """Prime factorization of a positive integer."""
    n: int
    pairs: Tuple[Tuple[int, int], ...]  # (p, lambda_p), sorted by p

    @property
    def primes(self) -> List[int]:
        return [p for p, _ in self.pairs]

    def exponent(self, p: int) -> int:
        """Exponent of p in n (0 if p does not divide n)."""
        for q, e in self.pairs:
            if q == p:
                return e
        return 0

    def value(self) -> int:
        """Rebuild n from the pairs."""
        out = 1
        for p, e in self.pairs:
            out *= p ** e
        return out


@lru_cache(maxsize=65536)
def factorize(n: int) -> Factorization:
    """Factor a positive integer."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    pairs = tuple(sorted(sympy.factorint(n).items()))
    return Factorization(n=n, pairs=tuple((int(p), int(e)) for p, e in pairs))


@lru_cache(maxsize=65536)
def divisors(n: int) -> Tuple[int, ...]:
    """Sorted positive divisors of n."""
    return tuple(int(d) for d in sympy.divisors(n))


def sigma(k: int, n: int) -> int:
    """Sum of k-th powers of the divisors of n."""
    if n < 1:
        raise ValueError(f"sigma needs n >= 1, got {n}")
    out = 1
    for p, e in factorize(n).pairs:
        if k == 0:
            out *= e + 1
        else:
            pk = p ** k
            out *= (pk ** (e + 1) - 1) // (pk - 1)
    return out


def sigma_at(k: int, x: Fraction) -> int:
    """sigma_k(x), taken as 0 when x is not a positive integer."""
    x = Fraction(x)
    if x.denominator != 1 or x <= 0:
        return 0
    return sigma(k, int(x))


def mobius(n: int) -> int:
    """Moebius function."""
    pairs = factorize(n).pairs
    if any(e > 1 for _, e in pairs):
        return 0
    return -1 if len(pairs) % 2 else 1


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for arbitrary integers."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    twos = 0
    while n % 2 == 0:
        n //= 2
        twos += 1
    if twos:
        if a % 2 == 0:
            return 0
        if twos % 2 and a % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    return result * int(sympy.jacobi_symbol(a % n, n))


def psi_a(coeffs, d: int) -> int:
    """Quadratic character prod_j (a_j/d) of a diagonal form."""
    coeffs = getattr(coeffs, "coeffs", coeffs)
    out = 1
    for a in coeffs:
        out *= kronecker(a, d)
        if out == 0:
            return 0
    return out


def is_squarefree(n: int) -> bool:
    """True when no prime square divides n (n != 0)."""
    if n == 0:
        return False
    return all(e == 1 for _, e in factorize(abs(n)).pairs) if abs(n) > 1 else True


def is_fundamental(D: int) -> bool:
    """Fundamental discriminant test; D = 1 counts as the trivial one."""
    if D == 1:
        return True
    if D == 0:
        return False
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        t = D // 4
        return t % 4 in (2, 3) and is_squarefree(t)
    return False


def discriminant_of(t: int) -> int:
    """Fundamental discriminant attached to a square-free t (t or 4t)."""
    if not is_squarefree(t):
        raise NotFundamental(f"{t} is not square-free")
    return t if t % 4 == 1 else 4 * t


def _to_fraction(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


@lru_cache(maxsize=None)
def bernoulli_number(k: int) -> Fraction:
    """B_k with B_1 = -1/2."""
    if k == 1:
        return Fraction(-1, 2)
    return _to_fraction(sympy.bernoulli(k))


@lru_cache(maxsize=None)
def generalized_bernoulli(k: int, D: int) -> Fraction:
    """B_{k,chi_D} = f^(k-1) * sum_{a=1}^{f} chi_D(a) B_k(a/f)."""
    if D == 1:
        return bernoulli_number(k)
    f = abs(D)
    x = sympy.Symbol("x")
    poly = sympy.Poly(sympy.bernoulli(k, x), x)
    total = Fraction(0)
    for a in range(1, f + 1):
        chi = kronecker(D, a)
        if chi:
            total += chi * _to_fraction(poly.eval(sympy.Rational(a, f)))
    return Fraction(f) ** (k - 1) * total


def l_value(k: int, D: int) -> Fraction:
    """L(1-k, chi_D) = -B_{k,chi_D}/k."""
    if k < 2:
        raise ValueError(f"l_value needs k >= 2, got {k}")
    if not is_fundamental(D):
        raise NotFundamental(f"{D} is not a fundamental discriminant")
    return -generalized_bernoulli(k, D) / k


def h_constant(k: int, D: int, N: int, kohnen: bool) -> Fraction:
    """Constant-term factor of the lift: 1/2 L(1-k,chi_D) prod (1 - (D/p) p^(k-1))."""
    value = l_value(k, D) / 2
    for p in factorize(N if kohnen else 2 * N).primes:
        value *= 1 - kronecker(D, p) * p ** (k - 1)
    return value


# s_i: (kronecker top, power e, sigma weight w)
S_PARAMS: Dict[int, Tuple[int, int, int]] = {
    1: (1, 1, 3),
    2: (2, 1, 3),
    3: (3, 1, 3),
    4: (6, 1, 3),
    5: (-2, 2, 5),
    6: (-4, 2, 5),
    7: (1, 3, 7),
}


def s_function(index: int, m: int, skip_primes: Iterable[int] = ()) -> int:
    """s_i(m) as sum_{d|m} mu(d) chi(d) d^e sigma_w(m/d).

    skip_primes drops the Euler factors at those primes (used for the
    gcd(m,6)=1 variants, where the 3-part is handled separately).
    """
    if m < 1 or m % 2 == 0:
        raise EvenArgument(f"s_{index} is defined on odd m, got {m}")
    top, e, w = S_PARAMS[index]
    skip = set(skip_primes)
    if skip:
        for p in skip:
            while m % p == 0:
                m //= p
    total = 0
    for d in divisors(m):
        mu = mobius(d)
        if mu:
            total += mu * kronecker(top, d) * d ** e * sigma(w, m // d)
    return total


def s_function_product(index: int, m: int) -> Fraction:
    """Euler-product form of s_i(m), kept as an independent cross-check."""
    if m < 1 or m % 2 == 0:
        raise EvenArgument(f"s_{index} is defined on odd m, got {m}")
    top, e, w = S_PARAMS[index]
    value = Fraction(1)
    for p, lam in factorize(m).pairs if m > 1 else ():
        pw = p ** w
        head = Fraction(pw ** (lam + 1) - 1, pw - 1)
        tail = Fraction(pw ** lam - 1, pw - 1)
        value *= head - p ** e * kronecker(top, p) * tail
    return value


@dataclass
class CoeffProvider:
    """Coefficients a(1..bound) of a q-expansion, looked up by index."""
    name: str
    values: Tuple[int, ...] = field(default_factory=tuple)  # values[n] = a(n)

    @property
    def bound(self) -> int:
        return len(self.values) - 1

    def __call__(self, n: int) -> int:
        if n < 1:
            return 0
        if n > self.bound:
            raise IndexError(f"{self.name}: coefficient {n} beyond bound {self.bound}")
        return self.values[n]


# C_i: (kronecker top, power e, newform name, primes m must avoid)
C_PARAMS: Dict[int, Tuple[int, int, str, Tuple[int, ...]]] = {
    1: (2, 1, "Delta_4_8", (2,)),
    2: (1, 1, "Delta_4_6", (2, 3)),
    3: (-2, 2, "Delta_6_4", (2,)),
    4: (-2, 2, "Delta_6_8", (2,)),
    5: (1, 3, "Delta_8_2", (2,)),
    6: (1, 3, "Delta_8_3", (2, 3)),
    7: (-4, 2, "Delta_6_3", (2, 3)),
}


def _check_c_argument(index: int, m: int):
    excluded = C_PARAMS[index][3]
    if m < 1 or any(m % p == 0 for p in excluded):
        raise CoprimalityViolation(
            f"C_{index} needs m >= 1 coprime to {excluded}, got {m}"
        )


def c_function(index: int, m: int, provider: CoeffProvider) -> int:
    """C_i(m) as sum_{d|m} mu(d) chi(d) d^e tau(m/d)."""
    _check_c_argument(index, m)
    top, e, _, _ = C_PARAMS[index]
    total = 0
    for d in divisors(m):
        mu = mobius(d)
        if mu:
            total += mu * kronecker(top, d) * d ** e * provider(m // d)
    return total


def c_function_product(index: int, m: int, provider: CoeffProvider) -> Optional[Fraction]:
    """Literal product form tau(m) prod_p (1 - p^e chi(p) tau(m/p)/tau(m)).

    Returns None when tau(m) = 0 and the literal form is undefined.
    """
    _check_c_argument(index, m)
    top, e, _, _ = C_PARAMS[index]
    tau_m = provider(m)
    if tau_m == 0:
        return None
    value = Fraction(tau_m)
    for p in factorize(m).primes if m > 1 else ():
        value *= 1 - Fraction(p ** e * kronecker(top, p) * provider(m // p), tau_m)
    return value


def split_prime_power(n: int, p: int) -> Tuple[int, int]:
    """Write n = p^lam * m with p not dividing m; returns (lam, m)."""
    lam = 0
    while n % p == 0:
        n //= p
        lam += 1
    return lam, n
