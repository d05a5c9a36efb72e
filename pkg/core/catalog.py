"""Registry of modular-form spaces, their basis elements and recipes."""

import logging
import os
import re
import threading
from dataclasses import dataclass, field
from enum import Enum, auto
from fractions import Fraction
from functools import lru_cache
from math import ceil
from typing import Dict, List, Optional, Tuple

import sympy

from .arith import CoeffProvider, factorize, kronecker, divisors
from .errors import CatalogError, UnknownForm
from .lincomb import rank, solve_exact
from .qseries import (
    QSeries, derivative_D, dilate, eisenstein, eisenstein2, eta_quotient,
)

logger = logging.getLogger(__name__)

CATALOG_VERSION = 1
DEFAULT_CATALOG_PATH = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data", "catalog.txt"
)


def index_gamma0(N: int) -> Fraction:
    """[SL_2(Z) : Gamma_0(N)] = N prod_{p|N} (1 + 1/p)."""
    value = Fraction(N)
    for p in factorize(N).primes if N > 1 else ():
        value *= Fraction(p + 1, p)
    return value


def sturm_bound(k: int, N: int) -> int:
    """ceil(k/12 * index) + 1."""
    return ceil(Fraction(k, 12) * index_gamma0(N)) + 1


def dimension_mk(k: int, N: int) -> int:
    """dim M_k(Gamma_0(N)) for even k >= 4."""
    if k < 4 or k % 2:
        raise ValueError(f"dimension formula needs even k >= 4, got {k}")
    mu = index_gamma0(N)
    primes = factorize(N).primes if N > 1 else []
    nu2 = 0 if N % 4 == 0 else 1
    nu3 = 0 if N % 9 == 0 else 1
    for p in primes:
        nu2 *= 1 + kronecker(-4, p)
        nu3 *= 1 + kronecker(-3, p)
    cusps = 0
    for d in divisors(N):
        g = sympy.gcd(d, N // d)
        cusps += int(sympy.totient(g))
    genus = 1 + mu / 12 - Fraction(nu2, 4) - Fraction(nu3, 3) - Fraction(cusps, 2)
    cusp_dim = (k - 1) * (genus - 1) + (Fraction(k, 2) - 1) * cusps + nu2 * (k // 4) + nu3 * (k // 3)
    return int(cusp_dim) + cusps


class FormKind(Enum):
    EISENSTEIN = auto()
    NEWFORM = auto()
    DILATE = auto()
    AUX = auto()


# Recipe tree nodes

@dataclass(frozen=True)
class Eis:
    k: int
    t: int = 1

    def text(self) -> str:
        return f"E{self.k}@{self.t}"


@dataclass(frozen=True)
class Eta:
    factors: Tuple[Tuple[int, int], ...]

    def text(self) -> str:
        return "eta[" + ",".join(f"({t},{r})" for t, r in self.factors) + "]"


@dataclass(frozen=True)
class Deriv:
    inner: object

    def text(self) -> str:
        return f"D({self.inner.text()})"


@dataclass(frozen=True)
class Sum:
    terms: Tuple[Tuple[Fraction, object], ...]

    def text(self) -> str:
        return "sum[" + ",".join(f"({_rational_text(c)},{e.text()})" for c, e in self.terms) + "]"


@dataclass(frozen=True)
class Prod:
    factors: Tuple[object, ...]

    def text(self) -> str:
        return "prod[" + ",".join(f.text() for f in self.factors) + "]"


@dataclass(frozen=True)
class Dil:
    t: int
    inner: object

    def text(self) -> str:
        return f"dil[{self.t}]({self.inner.text()})"


@dataclass(frozen=True)
class Ref:
    name: str

    def text(self) -> str:
        return f"${self.name}"


@dataclass(frozen=True)
class Eigen:
    """Normalized T_p eigenform in the span of gens.

    Picks the rational eigenvalue of multiplicity one that no form in
    exclude carries.
    """
    p: int
    gens: Tuple[object, ...]
    exclude: Tuple[object, ...] = ()

    def text(self) -> str:
        gens = ",".join(g.text() for g in self.gens)
        excl = ",".join(x.text() for x in self.exclude)
        return f"eigen[{self.p}]({gens};{excl})"


def _rational_text(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*(?:@\d+)?")
_INT_RE = re.compile(r"-?\d+")
_RATIONAL_RE = re.compile(r"-?\d+(?:/\d+)?")


class _RecipeParser:
    """Recursive-descent parser for the recipe grammar."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def parse(self):
        node = self._expr()
        self._skip()
        if self.pos != len(self.text):
            self._fail("trailing text")
        return node

    def _fail(self, message: str):
        raise CatalogError(f"recipe {self.text!r}: {message}", self.pos)

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self, literal: str) -> bool:
        self._skip()
        return self.text.startswith(literal, self.pos)

    def _expect(self, literal: str):
        if not self._peek(literal):
            self._fail(f"expected {literal!r}")
        self.pos += len(literal)

    def _match(self, pattern) -> str:
        self._skip()
        m = pattern.match(self.text, self.pos)
        if not m:
            self._fail(f"expected {pattern.pattern}")
        self.pos = m.end()
        return m.group(0)

    def _int(self) -> int:
        return int(self._match(_INT_RE))

    def _rational(self) -> Fraction:
        return Fraction(self._match(_RATIONAL_RE))

    def _list(self, item, opener: str, closer: str, separators=(",",)) -> list:
        self._expect(opener)
        items = []
        if self._peek(closer):
            self.pos += len(closer)
            return items
        while True:
            items.append(item())
            if self._peek(closer):
                self.pos += len(closer)
                return items
            self._expect(separators[0])

    def _expr(self):
        self._skip()
        if self._peek("eta["):
            self.pos += 3
            return Eta(tuple(self._list(self._pair_int, "[", "]")))
        if self._peek("sum["):
            self.pos += 3
            return Sum(tuple(self._list(self._pair_term, "[", "]")))
        if self._peek("prod["):
            self.pos += 4
            return Prod(tuple(self._list(self._expr, "[", "]")))
        if self._peek("dil["):
            self.pos += 4
            t = self._int()
            self._expect("]")
            self._expect("(")
            inner = self._expr()
            self._expect(")")
            return Dil(t, inner)
        if self._peek("eigen["):
            self.pos += 6
            p = self._int()
            self._expect("]")
            self._expect("(")
            gens = self._expr_run(";")
            self._expect(";")
            exclude = self._expr_run(")")
            self._expect(")")
            return Eigen(p, tuple(gens), tuple(exclude))
        if self._peek("D("):
            self.pos += 2
            inner = self._expr()
            self._expect(")")
            return Deriv(inner)
        if self._peek("$"):
            self.pos += 1
            return Ref(self._match(_NAME_RE))
        if self._peek("E"):
            self.pos += 1
            k = int(self._match(re.compile(r"\d+")))
            t = 1
            if self._peek("@"):
                self.pos += 1
                t = int(self._match(re.compile(r"\d+")))
            return Eis(k, t)
        self._fail("unknown recipe term")

    def _expr_run(self, closer: str) -> list:
        items = []
        if self._peek(closer):
            return items
        while True:
            items.append(self._expr())
            if self._peek(closer):
                return items
            self._expect(",")

    def _pair_int(self) -> Tuple[int, int]:
        self._expect("(")
        t = self._int()
        self._expect(",")
        r = self._int()
        self._expect(")")
        if t < 1:
            self._fail("eta dilation must be positive")
        return t, r

    def _pair_term(self) -> Tuple[Fraction, object]:
        self._expect("(")
        c = self._rational()
        self._expect(",")
        e = self._expr()
        self._expect(")")
        return c, e


def parse_recipe(text: str):
    """Parse a recipe string into a tree."""
    return _RecipeParser(text.strip()).parse()


@dataclass
class FormSpec:
    """A named basis element with its recipe."""
    name: str
    weight: int
    level: int
    kind: FormKind
    recipe: object

    @property
    def recipe_text(self) -> str:
        return self.recipe.text()

    def eisenstein_dilate(self) -> Optional[Tuple[int, int]]:
        """(k, t) when this is E_k(tz) with k >= 4."""
        if isinstance(self.recipe, Eis) and self.recipe.k >= 4:
            return self.recipe.k, self.recipe.t
        return None

    def newform_dilate(self) -> Optional[Tuple[str, int]]:
        """(newform name, t) when this is f(tz) for a catalog newform f."""
        if self.kind is FormKind.NEWFORM:
            return self.name, 1
        if self.kind is FormKind.DILATE and isinstance(self.recipe, Dil) and isinstance(self.recipe.inner, Ref):
            return self.recipe.inner.name, self.recipe.t
        return None


@dataclass
class SpaceBasis:
    """An ordered basis of M_k(Gamma_0(N))."""
    name: str
    weight: int
    level: int
    elements: List[FormSpec] = field(default_factory=list)
    catalog: Optional["Catalog"] = field(default=None, repr=False, compare=False)

    @property
    def dimension(self) -> int:
        return len(self.elements)

    @property
    def sturm_bound(self) -> int:
        return sturm_bound(self.weight, self.level)

    @property
    def element_names(self) -> List[str]:
        return [e.name for e in self.elements]

    def series(self, trunc: int) -> List[QSeries]:
        """Expansions of every element through q^trunc."""
        if self.catalog is None:
            raise CatalogError(f"space {self.name} is not attached to a catalog")
        return [self.catalog.expand(e, trunc) for e in self.elements]


_EIS_NAME_RE = re.compile(r"^E(\d+)@(\d+)$")
_DILATE_NAME_RE = re.compile(r"^(.+)@(\d+)$")


class Catalog:
    """Forms and spaces loaded from a catalog file."""

    def __init__(self, version: int = CATALOG_VERSION, source: str = ""):
        self.version = version
        self.source = source
        self.forms: Dict[str, FormSpec] = {}
        self.spaces: Dict[str, SpaceBasis] = {}
        self._cache: Dict[str, QSeries] = {}
        self._eigen: Dict[str, Tuple[List[object], List[Fraction]]] = {}
        self._lock = threading.RLock()

    # loading / saving

    @classmethod
    def load(cls, path: str = None, validate: bool = True) -> "Catalog":
        """Read a catalog file."""
        path = path or DEFAULT_CATALOG_PATH
        try:
            with open(path, "r", encoding="utf-8") as f:
                text = f.read()
        except OSError as e:
            raise CatalogError(f"cannot read catalog {path}: {e}")
        catalog = cls.loads(text, source=path)
        if validate:
            catalog.validate()
        return catalog

    @classmethod
    def loads(cls, text: str, source: str = "<string>") -> "Catalog":
        """Parse catalog text."""
        catalog = cls(source=source)
        pending_spaces = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("catalog"):
                parts = line.split()
                if len(parts) != 2 or not parts[1].isdigit():
                    raise CatalogError(f"{source}:{lineno}: bad version line")
                catalog.version = int(parts[1])
                if catalog.version != CATALOG_VERSION:
                    raise CatalogError(f"{source}:{lineno}: unsupported catalog version {catalog.version}")
                continue
            fields = [p.strip() for p in line.split("|")]
            if len(fields) != 5:
                raise CatalogError(f"{source}:{lineno}: expected 5 '|'-separated fields, got {len(fields)}")
            kind, name, weight, level, body = fields
            try:
                weight, level = int(weight), int(level)
            except ValueError:
                raise CatalogError(f"{source}:{lineno}: weight and level must be integers")
            if kind == "space":
                names = [n.strip() for n in body.split(",") if n.strip()]
                pending_spaces.append((lineno, name, weight, level, names))
                continue
            try:
                form_kind = FormKind[kind.upper()]
            except KeyError:
                raise CatalogError(f"{source}:{lineno}: unknown record kind {kind!r}")
            try:
                recipe = parse_recipe(body)
            except CatalogError as e:
                raise CatalogError(f"{source}:{lineno}: {e}")
            catalog.add_form(FormSpec(name, weight, level, form_kind, recipe))
        for lineno, name, weight, level, names in pending_spaces:
            try:
                elements = [catalog.form(n) for n in names]
            except UnknownForm as e:
                raise CatalogError(f"{source}:{lineno}: {e}")
            catalog.spaces[name] = SpaceBasis(name, weight, level, elements, catalog)
        return catalog

    def dumps(self) -> str:
        """Serialize back to catalog text; implicit dilates are not written."""
        lines = [f"catalog {self.version}"]
        for spec in self.forms.values():
            lines.append(" | ".join([
                spec.kind.name.lower(), spec.name, str(spec.weight), str(spec.level), spec.recipe_text,
            ]))
        for space in self.spaces.values():
            lines.append(" | ".join([
                "space", space.name, str(space.weight), str(space.level), ", ".join(space.element_names),
            ]))
        return "\n".join(lines) + "\n"

    def add_form(self, spec: FormSpec):
        if spec.name in self.forms:
            raise CatalogError(f"duplicate form {spec.name}")
        self.forms[spec.name] = spec

    # lookup

    def form(self, name: str) -> FormSpec:
        """Look up a form; E{k}@{t} and {newform}@{t} resolve implicitly."""
        spec = self.forms.get(name)
        if spec is not None:
            return spec
        m = _EIS_NAME_RE.match(name)
        if m:
            k, t = int(m.group(1)), int(m.group(2))
            return FormSpec(name, k, t, FormKind.EISENSTEIN, Eis(k, t))
        m = _DILATE_NAME_RE.match(name)
        if m and m.group(1) in self.forms:
            base = self.forms[m.group(1)]
            t = int(m.group(2))
            kind = FormKind.DILATE if t > 1 else base.kind
            recipe = Dil(t, Ref(base.name)) if t > 1 else Ref(base.name)
            return FormSpec(name, base.weight, base.level * t, kind, recipe)
        raise UnknownForm(f"no form named {name!r}")

    def space(self, name: str) -> SpaceBasis:
        try:
            return self.spaces[name]
        except KeyError:
            raise UnknownForm(f"no space named {name!r}")

    def find_space(self, weight: int, level: int) -> SpaceBasis:
        """The registered basis of M_weight(level)."""
        for space in self.spaces.values():
            if space.weight == weight and space.level == level:
                return space
        raise UnknownForm(f"no basis registered for M_{weight}({level})")

    def builtin_spaces(self) -> List[SpaceBasis]:
        return list(self.spaces.values())

    def newforms(self) -> List[FormSpec]:
        return [f for f in self.forms.values() if f.kind is FormKind.NEWFORM]

    # expansion

    def expand(self, spec, trunc: int) -> QSeries:
        """q-expansion of a form (or its name) through q^trunc."""
        if isinstance(spec, str):
            spec = self.form(spec)
        if trunc < 0:
            raise ValueError(f"truncation must be non-negative, got {trunc}")
        with self._lock:
            cached = self._cache.get(spec.name)
            if cached is not None and cached.trunc >= trunc:
                return cached.truncate(trunc)
        series = self._evaluate(spec.recipe, trunc, spec)
        with self._lock:
            cached = self._cache.get(spec.name)
            if cached is None or cached.trunc < series.trunc:
                self._cache[spec.name] = series
        return series

    def _evaluate(self, node, trunc: int, owner: FormSpec) -> QSeries:
        if isinstance(node, Eis):
            base = eisenstein2(trunc) if node.k == 2 else eisenstein(node.k, trunc)
            return dilate(base, node.t)
        if isinstance(node, Eta):
            return eta_quotient(node.factors, trunc)
        if isinstance(node, Deriv):
            return derivative_D(self._evaluate(node.inner, trunc, owner))
        if isinstance(node, Sum):
            total = QSeries.zero(trunc)
            for c, term in node.terms:
                total = total + self._evaluate(term, trunc, owner) * c
            return total
        if isinstance(node, Prod):
            result = QSeries.constant(1, trunc)
            for factor in node.factors:
                result = result * self._evaluate(factor, trunc, owner)
            return result
        if isinstance(node, Dil):
            return _dilate_to(self._evaluate(node.inner, trunc // node.t, owner), node.t, trunc)
        if isinstance(node, Ref):
            return self.expand(node.name, trunc)
        if isinstance(node, Eigen):
            return self._eigenform(node, trunc, owner)
        raise CatalogError(f"cannot evaluate recipe node {node!r}")

    def _eigenform(self, node: Eigen, trunc: int, owner: FormSpec) -> QSeries:
        with self._lock:
            known = self._eigen.get(owner.name)
        if known is None:
            known = self._construct_eigenform(node, owner)
            with self._lock:
                self._eigen[owner.name] = known
        gens, weights = known
        total = QSeries.zero(trunc)
        for gen, w in zip(gens, weights):
            if w:
                total = total + self._evaluate(gen, trunc, owner) * w
        return total

    def _construct_eigenform(self, node: Eigen, owner: FormSpec) -> Tuple[List[object], List[Fraction]]:
        """Find the T_p eigenvector and return it as weights on the generators."""
        p, k = node.p, owner.weight
        if owner.level % p == 0:
            raise CatalogError(f"{owner.name}: T_{p} needs p coprime to level {owner.level}")
        rows = 2 * sturm_bound(k, owner.level)
        work = p * (rows + 1)
        gens = [self._evaluate(g, work, owner) for g in node.gens]

        # independent generators, judged on rows 0..rows
        chosen: List[int] = []
        for i in range(len(gens)):
            trial = chosen + [i]
            matrix = [[gens[j][n] for j in trial] for n in range(rows + 1)]
            if rank(matrix) == len(trial):
                chosen = trial
        basis = [gens[i] for i in chosen]
        dim = len(basis)
        matrix = [[b[n] for b in basis] for n in range(rows + 1)]

        hecke_matrix = sympy.zeros(dim, dim)
        for col, b in enumerate(basis):
            image = b.hecke(p, k)
            coords = solve_exact(matrix, [image[n] for n in range(rows + 1)])
            if coords is None:
                raise CatalogError(f"{owner.name}: generators do not span a T_{p}-stable space")
            for r, value in enumerate(coords):
                hecke_matrix[r, col] = sympy.Rational(value.numerator, value.denominator)

        excluded = set()
        for x in node.exclude:
            xs = self._evaluate(x, work, owner)
            image = xs.hecke(p, k)
            lead = xs.valuation()
            if lead > rows:
                raise CatalogError(f"{owner.name}: excluded form vanishes on the working range")
            ratio = image[lead] / xs[lead]
            if any(image[n] != ratio * xs[n] for n in range(rows + 1)):
                raise CatalogError(f"{owner.name}: excluded form {x.text()} is not a T_{p} eigenform")
            excluded.add(ratio)

        lam = sympy.Symbol("lam")
        _, factors = sympy.factor_list(hecke_matrix.charpoly(lam).as_expr(), lam)
        candidates = []
        for factor, multiplicity in factors:
            poly = sympy.Poly(factor, lam)
            if poly.degree() != 1 or multiplicity != 1:
                continue
            root = -poly.all_coeffs()[1] / poly.all_coeffs()[0]
            value = Fraction(int(sympy.Rational(root).p), int(sympy.Rational(root).q))
            if value not in excluded:
                candidates.append(value)
        if len(candidates) != 1:
            raise CatalogError(
                f"{owner.name}: expected one admissible T_{p} eigenvalue, found {candidates}"
            )
        eigenvalue = candidates[0]
        null = (hecke_matrix - sympy.Rational(eigenvalue.numerator, eigenvalue.denominator) * sympy.eye(dim)).nullspace()
        vector = [Fraction(int(v.p), int(v.q)) for v in (sympy.Rational(x) for x in null[0])]
        lead = sum(v * b[1] for v, b in zip(vector, basis))
        if lead == 0:
            raise CatalogError(f"{owner.name}: eigenvector has vanishing q^1 coefficient")
        weights = [Fraction(0)] * len(gens)
        for v, i in zip(vector, chosen):
            weights[i] = v / lead
        logger.info("%s: T_%d eigenvalue %s from %d generators (rank %d)",
                    owner.name, p, eigenvalue, len(gens), dim)
        return list(node.gens), weights

    # checks

    def newform_coeffs(self, name: str, trunc: int) -> CoeffProvider:
        """Coefficients of a catalog newform as a CoeffProvider."""
        spec = self.form(name)
        if spec.kind is not FormKind.NEWFORM:
            raise UnknownForm(f"{name} is not a catalog newform")
        series = self.expand(spec, trunc)
        if not series.is_integral():
            raise CatalogError(f"{name} has non-integral coefficients")
        return CoeffProvider(name=name, values=tuple(int(c) for c in series.coeffs))

    def check_independence(self, space: SpaceBasis):
        """Full column rank of the basis on rows 0..2B."""
        rows = 2 * space.sturm_bound
        columns = space.series(rows)
        matrix = [[col[n] for col in columns] for n in range(rows + 1)]
        got = rank(matrix)
        if got != space.dimension:
            raise CatalogError(f"{space.name}: basis has rank {got}, expected {space.dimension}")

    def validate(self):
        """Dimension, normalization and independence checks for every space."""
        for spec in self.newforms():
            series = self.expand(spec, 2)
            if series[0] != 0 or series[1] != 1:
                raise CatalogError(f"newform {spec.name} is not normalized (c0={series[0]}, c1={series[1]})")
        for space in self.spaces.values():
            expected = dimension_mk(space.weight, space.level)
            if space.dimension != expected:
                raise CatalogError(
                    f"{space.name}: {space.dimension} elements but dim M_{space.weight}({space.level}) = {expected}"
                )
            self.check_independence(space)
        logger.debug("catalog %s validated: %d forms, %d spaces",
                     self.source, len(self.forms), len(self.spaces))


def _dilate_to(series: QSeries, t: int, trunc: int) -> QSeries:
    """f(tz) through q^trunc from f known through q^(trunc // t)."""
    out = [Fraction(0)] * (trunc + 1)
    for n in range(trunc // t + 1):
        out[n * t] = series[n]
    return QSeries(out)


def catalog_path(override: str = None) -> str:
    """Catalog path: explicit override, then QFLIFT_CATALOG, then the bundled file."""
    return override or os.environ.get("QFLIFT_CATALOG") or DEFAULT_CATALOG_PATH


@lru_cache(maxsize=8)
def load_catalog(path: str = None) -> Catalog:
    """Load and validate a catalog once per path."""
    return Catalog.load(catalog_path(path))


def builtin_spaces() -> List[SpaceBasis]:
    """The bases shipped in the bundled catalog."""
    return load_catalog().builtin_spaces()


def expand(spec, trunc: int, catalog: Catalog = None) -> QSeries:
    """Expand a form by name or spec through q^trunc."""
    return (catalog or load_catalog()).expand(spec, trunc)


def newform_coeffs(name: str, trunc: int, catalog: Catalog = None) -> CoeffProvider:
    return (catalog or load_catalog()).newform_coeffs(name, trunc)
