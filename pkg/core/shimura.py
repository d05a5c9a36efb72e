"""Theta products of diagonal forms and the Shimura / Shimura-Kohnen lifts."""

import logging
import re
from dataclasses import dataclass
from enum import Enum, auto
from fractions import Fraction
from math import gcd, isqrt, lcm
from typing import List, Tuple

from .arith import (
    discriminant_of, divisors, h_constant, is_fundamental, is_squarefree, kronecker, psi_a,
)
from .errors import (
    AdmissibilityViolated, InsufficientTruncation, NotFundamental, ParseError, SignConditionViolated,
)
from .qseries import QSeries, dilate, theta

logger = logging.getLogger(__name__)

_TERM_RE = re.compile(r"\s*(\d+)\s*(?:\^\s*(\d+))?\s*")


@dataclass(frozen=True)
class QuadForm:
    """Diagonal form a_1 x_1^2 + ... + a_l x_l^2."""
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("a quadratic form needs at least one coefficient")
        if any(a < 1 for a in self.coeffs):
            raise ValueError(f"coefficients must be positive, got {self.coeffs}")
        object.__setattr__(self, "coeffs", tuple(sorted(self.coeffs)))

    @classmethod
    def parse(cls, text: str) -> "QuadForm":
        """Read multiplicity notation such as '1^3,2,4' or '(1^4, 2)'."""
        body = text.strip()
        if body.startswith("(") and body.endswith(")"):
            body = body[1:-1]
        coeffs: List[int] = []
        offset = 0
        for part in body.split(","):
            m = _TERM_RE.fullmatch(part)
            if not m:
                raise ParseError("bad multiplicity term", text, offset)
            a = int(m.group(1))
            mult = int(m.group(2)) if m.group(2) else 1
            if a < 1 or mult < 1:
                raise ParseError("coefficients and multiplicities must be positive", text, offset)
            coeffs.extend([a] * mult)
            offset += len(part) + 1
        return cls(tuple(coeffs))

    @property
    def ell(self) -> int:
        return len(self.coeffs)

    @property
    def level(self) -> int:
        """N_a = lcm of the coefficients."""
        out = 1
        for a in self.coeffs:
            out = lcm(out, a)
        return out

    @property
    def lift_weight(self) -> int:
        """k = (l-1)/2; the lift lands in weight 2k."""
        return (self.ell - 1) // 2

    @property
    def image_level(self) -> int:
        return 2 * self.level

    @property
    def theta_level(self) -> int:
        return 4 * self.level

    @property
    def multiplicities(self) -> List[Tuple[int, int]]:
        out: List[Tuple[int, int]] = []
        for a in self.coeffs:
            if out and out[-1][0] == a:
                out[-1] = (a, out[-1][1] + 1)
            else:
                out.append((a, 1))
        return out

    def notation(self) -> str:
        """Multiplicity notation, exponent 1 dropped."""
        return ",".join(f"{a}^{i}" if i > 1 else str(a) for a, i in self.multiplicities)

    def psi(self, d: int) -> int:
        return psi_a(self.coeffs, d)

    def has_principal_character(self) -> bool:
        """Every a_j is a square or occurs an even number of times."""
        return _principal(self.coeffs)

    def __str__(self) -> str:
        return f"({self.notation()})"


class TwistKind(Enum):
    SQUARE_FREE = auto()
    FUNDAMENTAL = auto()


class LiftClaim(Enum):
    PROVED = auto()
    CHARACTER_EXTENSION = auto()  # real quadratic character, mapping property cited not proved here
    ASSUMED_MAPPING = auto()  # admissibility gate overridden


@dataclass(frozen=True)
class Twist:
    value: int
    kind: TwistKind

    @property
    def discriminant(self) -> int:
        """Fundamental discriminant used in the constant term."""
        if self.kind is TwistKind.FUNDAMENTAL:
            return self.value
        return discriminant_of(self.value)

    def __str__(self) -> str:
        tag = "t" if self.kind is TwistKind.SQUARE_FREE else "D"
        return f"{tag}={self.value}"


@dataclass
class LiftParams:
    """Weight, level, character and twist of one lift."""
    k: int
    N: int
    chi: Tuple[int, ...]  # Kronecker tops; chi(d) = prod (c/d)
    twist: Twist
    assume_conjecture: bool = False

    @classmethod
    def for_form(cls, form: QuadForm, twist: int, assume_conjecture: bool = False) -> "LiftParams":
        """Parameters for lifting the theta product of form by the given twist.

        Odd level takes a square-free t; even level takes a fundamental
        discriminant D. A non-fundamental twist at even level is kept as
        square-free and only passes validate() with the override set.
        """
        if form.level % 2 == 0 and is_fundamental(twist):
            kind = TwistKind.FUNDAMENTAL
        else:
            kind = TwistKind.SQUARE_FREE
        params = cls(
            k=form.lift_weight,
            N=form.level,
            chi=form.coeffs,
            twist=Twist(twist, kind),
            assume_conjecture=assume_conjecture,
        )
        params.validate()
        return params

    @property
    def kohnen(self) -> bool:
        return self.twist.kind is TwistKind.FUNDAMENTAL

    @property
    def image_weight(self) -> int:
        return 2 * self.k

    @property
    def image_level(self) -> int:
        return 2 * self.N

    @property
    def claim(self) -> LiftClaim:
        admissible = (self.N % 2 == 1) == (self.twist.kind is TwistKind.SQUARE_FREE)
        if not admissible:
            return LiftClaim.ASSUMED_MAPPING
        if not _principal(self.chi):
            return LiftClaim.CHARACTER_EXTENSION
        return LiftClaim.PROVED

    def validate(self):
        """Sign, twist-type and admissibility checks."""
        t = self.twist.value
        if t == 0 or (-1) ** self.k * t <= 0:
            raise SignConditionViolated(f"(-1)^{self.k} * {t} must be positive")
        if self.twist.kind is TwistKind.SQUARE_FREE and not is_squarefree(t):
            raise NotFundamental(f"twist {t} is not square-free")
        if self.twist.kind is TwistKind.FUNDAMENTAL and not is_fundamental(t):
            raise NotFundamental(f"twist {t} is not a fundamental discriminant")
        admissible = (self.N % 2 == 1) == (self.twist.kind is TwistKind.SQUARE_FREE)
        if not admissible and not self.assume_conjecture:
            expected = "square-free t" if self.N % 2 else "fundamental discriminant D"
            raise AdmissibilityViolated(
                f"level {self.N} needs a {expected}; pass the conjecture override to lift with {self.twist}"
            )

    def chi_at(self, d: int) -> int:
        return psi_a(self.chi, d)


def _principal(tops) -> bool:
    """prod (a/.) is principal: each non-square a occurs an even number of times."""
    counts = {}
    for a in tops:
        counts[a] = counts.get(a, 0) + 1
    return all(isqrt(a) ** 2 == a or i % 2 == 0 for a, i in counts.items())


def theta_product(form: QuadForm, trunc: int) -> QSeries:
    """prod_j Theta(a_j z); coefficient n is r_l(a; n)."""
    if trunc < 0:
        raise ValueError(f"truncation must be non-negative, got {trunc}")
    base = theta(trunc)
    result = QSeries.constant(1, trunc)
    for a, mult in form.multiplicities:
        factor = dilate(base, a)
        for _ in range(mult):
            result = result * factor
    return result


def required_input(params: LiftParams, out_trunc: int) -> int:
    """Input truncation |t| * T^2 that a lift through q^T reads."""
    return abs(params.twist.value) * out_trunc * out_trunc


def lift(coeffs: QSeries, params: LiftParams, out_trunc: int) -> QSeries:
    """Apply S_t (square-free twist) or S_D (fundamental twist) coefficientwise.

    b(0) = a(0) H_k, and for n >= 1
    b(n) = sum_{d|n, (d, M)=1} chi(d) (t/d) d^(k-1) a(|t| n^2 / d^2)
    with M = 2N for S_t and M = N for S_D.
    """
    params.validate()
    t = params.twist.value
    need = required_input(params, out_trunc)
    if coeffs.trunc < need:
        raise InsufficientTruncation(need, coeffs.trunc)
    modulus = params.N if params.kohnen else 2 * params.N
    constant = coeffs[0] * h_constant(params.k, params.twist.discriminant, params.N, params.kohnen) \
        if coeffs[0] else Fraction(0)
    out = [constant]
    size = abs(t)
    for n in range(1, out_trunc + 1):
        total = Fraction(0)
        for d in divisors(n):
            if gcd(d, modulus) != 1:
                continue
            weight = params.chi_at(d) * kronecker(t, d)
            if weight:
                m = n // d
                total += weight * d ** (params.k - 1) * coeffs[size * m * m]
        out.append(total)
    return QSeries(out)


@dataclass
class LiftResult:
    """Lift of a theta product together with its provenance."""
    form: QuadForm
    params: LiftParams
    series: QSeries
    claim: LiftClaim
    constant_term_formula: Fraction = Fraction(0)


def lift_theta(form: QuadForm, twist: int, out_trunc: int, assume_conjecture: bool = False) -> LiftResult:
    """theta_product followed by lift, with the claim status attached."""
    params = LiftParams.for_form(form, twist, assume_conjecture)
    source = theta_product(form, required_input(params, out_trunc))
    series = lift(source, params, out_trunc)
    claim = params.claim
    if claim is not LiftClaim.PROVED:
        logger.info("%s with %s: %s", form, params.twist, claim.name.lower())
    return LiftResult(
        form=form,
        params=params,
        series=series,
        claim=claim,
        constant_term_formula=series[0],
    )
