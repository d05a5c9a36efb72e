"""Printed lift tables: file format, row reproduction and regeneration."""

import logging
import os
from dataclasses import dataclass, field
from enum import Enum, auto
from fractions import Fraction
from typing import Dict, List, Optional

from .catalog import Catalog, SpaceBasis, load_catalog
from .errors import CatalogError, EngineError, ParseError
from .lincomb import ComboResult, ComboStatus, solve_in_basis
from .repcount import NewformPool, count_series, eval_formula, formula_from_lambdas
from .shimura import LiftClaim, QuadForm, lift_theta

logger = logging.getLogger(__name__)

TABLE_VERSION = 1
TABLES_DIR = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data", "tables"
)
TABLE_IDS = (
    "T3", "T4", "T5", "T6", "T6_odd", "T6_conj", "T7", "T8", "T9", "T10",
    "T11_1", "T11_2", "T11_3",
)

# Rows a table may flag before its reproduction counts as failed.
MISMATCH_ALLOWANCE: Dict[str, int] = {"T8": 2}

# Extra coefficients checked past the 2B rows the solve uses.
CHECK_MARGIN = 4

# Squares n^2, n <= this, on which printed and solved rows are tested against the counts.
EVIDENCE_N = 12


@dataclass
class TableRow:
    """One printed row: a form, the basis it is expanded in, the twist and the coefficients."""
    form: QuadForm
    basis: str
    twist: int
    lambdas: List[Fraction] = field(default_factory=list)
    note: str = ""


@dataclass
class LiftTable:
    table_id: str
    version: int = TABLE_VERSION
    conjectural: bool = False  # rows lift with the admissibility gate overridden
    rows: List[TableRow] = field(default_factory=list)
    source: str = ""

    def row(self, form) -> TableRow:
        if isinstance(form, str):
            form = QuadForm.parse(form)
        for row in self.rows:
            if row.form == form:
                return row
        raise KeyError(f"{self.table_id} has no row {form}")


def _fraction(text: str, source: str, lineno: int) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{source}:{lineno}: bad rational", text)


def loads(text: str, source: str = "<string>") -> LiftTable:
    """Parse table text."""
    table: Optional[LiftTable] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "|" not in line:
            key, _, value = line.partition(" ")
            value = value.strip()
            if key == "table":
                table = LiftTable(table_id=value, source=source)
            elif table is None:
                raise ParseError(f"{source}:{lineno}: missing 'table' header", line)
            elif key == "version":
                if not value.isdigit() or int(value) != TABLE_VERSION:
                    raise ParseError(f"{source}:{lineno}: unsupported table version", line)
                table.version = int(value)
            elif key == "conjectural":
                table.conjectural = value == "yes"
            else:
                raise ParseError(f"{source}:{lineno}: unknown directive {key!r}", line)
            continue
        if table is None:
            raise ParseError(f"{source}:{lineno}: row before 'table' header", line)
        fields = [p.strip() for p in line.split("|")]
        if len(fields) not in (4, 5):
            raise ParseError(f"{source}:{lineno}: expected 4 or 5 '|'-separated fields", line)
        try:
            twist = int(fields[2])
        except ValueError:
            raise ParseError(f"{source}:{lineno}: twist must be an integer", line)
        table.rows.append(TableRow(
            form=QuadForm.parse(fields[0]),
            basis=fields[1],
            twist=twist,
            lambdas=[_fraction(v, source, lineno) for v in fields[3].split(",")],
            note=fields[4] if len(fields) == 5 else "",
        ))
    if table is None:
        raise ParseError(f"{source}: empty table", text)
    return table


def dumps(table: LiftTable) -> str:
    lines = [f"table {table.table_id}", f"version {table.version}"]
    if table.conjectural:
        lines.append("conjectural yes")
    for row in table.rows:
        fields = [row.form.notation(), row.basis, str(row.twist), ", ".join(str(v) for v in row.lambdas)]
        if row.note:
            fields.append(row.note)
        lines.append(" | ".join(fields))
    return "\n".join(lines) + "\n"


def table_path(table_id: str, directory: str = None) -> str:
    return os.path.join(directory or TABLES_DIR, f"{table_id}.txt")


def load(table_id: str, directory: str = None) -> LiftTable:
    """Read a shipped table by id."""
    path = table_path(table_id, directory)
    try:
        with open(path, "r", encoding="utf-8") as f:
            return loads(f.read(), source=path)
    except OSError as e:
        raise CatalogError(f"cannot read table {path}: {e}")


def save(table: LiftTable, directory: str) -> str:
    os.makedirs(directory, exist_ok=True)
    path = table_path(table.table_id, directory)
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(table))
    return path


class RowStatus(Enum):
    MATCH = auto()
    MISMATCH = auto()
    ERRATUM = auto()  # mismatch on a row whose note records a known misprint
    INCONSISTENT = auto()
    ERROR = auto()


@dataclass
class RowReport:
    """Solved-vs-printed comparison for a single row."""
    table_id: str
    row: TableRow
    status: RowStatus
    solved: List[Fraction] = field(default_factory=list)
    combo: Optional[ComboResult] = None
    claim: Optional[LiftClaim] = None
    differing: List[int] = field(default_factory=list)  # basis indices where solved != printed
    error: str = ""
    evidence: str = ""  # counts against the printed and solved formulas, for rows that differ

    @property
    def constant_status(self) -> str:
        if self.combo is None:
            return ""
        return self.combo.status.name.lower()


@dataclass
class TableReport:
    table_id: str
    conjectural: bool = False
    rows: List[RowReport] = field(default_factory=list)

    def count(self, status: RowStatus) -> int:
        return sum(1 for r in self.rows if r.status is status)

    @property
    def flagged(self) -> int:
        """Rows that differ with no recorded misprint to explain them."""
        return self.count(RowStatus.MISMATCH)

    @property
    def ok(self) -> bool:
        """True when every row matches, up to documented errata and the table's allowance."""
        hard = self.count(RowStatus.MISMATCH) + self.count(RowStatus.INCONSISTENT) + self.count(RowStatus.ERROR)
        allowance = MISMATCH_ALLOWANCE.get(self.table_id)
        if allowance is not None:
            return self.count(RowStatus.INCONSISTENT) + self.count(RowStatus.ERROR) == 0 \
                and self.flagged <= allowance
        return hard == 0


def _check_space(row: TableRow, space: SpaceBasis, weight: int, level: int):
    if space.weight != weight or space.level % level:
        raise CatalogError(
            f"{row.form}: lift lands in M_{weight}({level}) which {space.name} does not contain"
        )


def count_evidence(row: TableRow, solved: List[Fraction], space: SpaceBasis, n_max: int = EVIDENCE_N,
                   pool: NewformPool = None) -> str:
    """Printed and solved divisor-sum formulas against r(|t| n^2) for n <= n_max."""
    scale = abs(row.twist)
    counts = count_series(row.form, scale * n_max * n_max)
    pool = pool or NewformPool(space.catalog)
    first_bad = {}
    for label, lambdas in (("printed", row.lambdas), ("solved", solved)):
        try:
            formula = formula_from_lambdas(lambdas, space, row.form, row.twist)
            values = [eval_formula(formula, n, pool) for n in range(1, n_max + 1)]
        except EngineError as e:
            return f"no count check: {e}"
        first_bad[label] = next(((n, counts[scale * n * n], v) for n, v in enumerate(values, 1)
                                 if v != counts[scale * n * n]), None)
    parts = []
    for label in ("printed", "solved"):
        bad = first_bad[label]
        if bad is None:
            parts.append(f"{label} holds for n <= {n_max}")
        else:
            n, count, value = bad
            parts.append(f"{label} gives {value} at n={n} where the count is {count}")
    return "; ".join(parts)


def reproduce_row(row: TableRow, table_id: str = "", conjectural: bool = False,
                  catalog: Catalog = None) -> RowReport:
    """Lift the row's theta product, solve in its basis and compare with the printed values."""
    catalog = catalog or load_catalog()
    try:
        space = catalog.space(row.basis)
        out_trunc = 2 * space.sturm_bound + CHECK_MARGIN
        result = lift_theta(row.form, row.twist, out_trunc, assume_conjecture=conjectural)
        _check_space(row, space, result.params.image_weight, result.params.image_level)
        combo = solve_in_basis(result.series, space, result.constant_term_formula)
    except EngineError as e:
        logger.warning("%s %s: %s", table_id, row.form, e)
        return RowReport(table_id, row, RowStatus.ERROR, error=str(e))
    report = RowReport(table_id, row, RowStatus.INCONSISTENT, combo=combo, claim=result.claim)
    if combo.status is ComboStatus.INCONSISTENT:
        return report
    report.solved = list(combo.coefficients)
    if len(row.lambdas) != len(report.solved):
        report.status = RowStatus.ERROR
        report.error = f"printed row has {len(row.lambdas)} entries, basis has {len(report.solved)}"
        return report
    report.differing = [i for i, (a, b) in enumerate(zip(row.lambdas, report.solved)) if a != b]
    if not report.differing:
        report.status = RowStatus.MATCH
    elif row.note:
        report.status = RowStatus.ERRATUM
    else:
        report.status = RowStatus.MISMATCH
    if report.differing:
        report.evidence = count_evidence(row, report.solved, space)
    if combo.status is ComboStatus.CONSTANT_MISMATCH:
        logger.debug("%s %s: constant term %s vs lift constant %s", table_id, row.form,
                     combo.constant_term_solved, combo.constant_term_target)
    return report


def reproduce_table(table: LiftTable, catalog: Catalog = None) -> TableReport:
    """Reproduce every row of a table in order."""
    report = TableReport(table.table_id, table.conjectural)
    for row in table.rows:
        report.rows.append(reproduce_row(row, table.table_id, table.conjectural, catalog))
    logger.info("%s: %d/%d rows match", table.table_id, report.count(RowStatus.MATCH), len(table.rows))
    return report


def regenerate_table(report: TableReport) -> LiftTable:
    """A table holding the solved coefficients; rows that failed to solve are left out."""
    table = LiftTable(report.table_id, conjectural=report.conjectural, source="regenerated")
    for r in report.rows:
        if not r.solved:
            continue
        table.rows.append(TableRow(r.row.form, r.row.basis, r.row.twist, list(r.solved)))
    return table


def diff_tables(printed: LiftTable, regenerated: LiftTable) -> List[str]:
    """Human-readable lines for every row where the two tables disagree."""
    lines: List[str] = []
    solved = {row.form: row for row in regenerated.rows}
    for row in printed.rows:
        other = solved.get(row.form)
        if other is None:
            lines.append(f"{printed.table_id} {row.form}: not regenerated")
            continue
        for i, (a, b) in enumerate(zip(row.lambdas, other.lambdas)):
            if a != b:
                lines.append(f"{printed.table_id} {row.form} [{i}]: printed {a} solved {b}")
    return lines
