"""The expand, lift, verify and tables commands."""

import logging
import os
import re
import sys
from typing import List, TextIO

from core import tables
from core.catalog import load_catalog
from core.errors import EngineError
from core.lincomb import solve_in_basis
from core.repcount import count_series
from core.runner import Bounds, VerifyManager
from core.shimura import QuadForm, lift_theta

from .report import format_value, render
from .settings import RunConfig

logger = logging.getLogger(__name__)

_BARE_EIS_RE = re.compile(r"^E\d+$")


def _open_out(config: RunConfig) -> TextIO:
    if config.out:
        return open(config.out, "w", encoding="utf-8")
    return sys.stdout


def _emit(config: RunConfig, text: str):
    out = _open_out(config)
    try:
        out.write(text)
    finally:
        if out is not sys.stdout:
            out.close()


def cmd_expand(config: RunConfig) -> int:
    """Print n, c_n for a catalog form or a theta product."""
    if config.qf:
        coeffs = count_series(QuadForm.parse(config.qf), config.upto)
    elif config.form:
        name = config.form + "@1" if _BARE_EIS_RE.match(config.form) else config.form
        coeffs = load_catalog(config.catalog).expand(name, config.upto).coeffs
    else:
        raise ValueError("expand needs --form or --qf")
    _emit(config, "".join(f"{n}, {format_value(c)}\n" for n, c in enumerate(coeffs)))
    return 0


def cmd_lift(config: RunConfig) -> int:
    """Lift a theta product; when its image space has a basis, solve for the coefficients."""
    if not config.qf:
        raise ValueError("lift needs --qf")
    form = QuadForm.parse(config.qf)
    catalog = load_catalog(config.catalog)
    result = lift_theta(form, config.twist, config.upto, config.assume_conjecture)
    lines = [f"# {form} twist {config.twist}: {result.claim.name.lower()}"]
    lines += [f"{n}, {format_value(c)}" for n, c in enumerate(result.series.coeffs)]

    try:
        space = catalog.find_space(result.params.image_weight, result.params.image_level)
    except EngineError:
        logger.info("no basis for M_%d(%d); coefficients only",
                    result.params.image_weight, result.params.image_level)
    else:
        needed = 2 * space.sturm_bound + tables.CHECK_MARGIN
        if needed > config.upto:
            result = lift_theta(form, config.twist, needed, config.assume_conjecture)
        combo = solve_in_basis(result.series, space, result.constant_term_formula)
        if combo.ok:
            lines.append(f"# {space.name}: {', '.join(space.element_names)}")
            lines.append(f"lambda {format_value(combo.coefficients)} [{combo.status.name.lower()}]")
        else:
            lines.append(f"# not in the span of {space.name} (first bad row {combo.first_bad_row})")
    _emit(config, "\n".join(lines) + "\n")
    return 0


def cmd_verify(config: RunConfig) -> int:
    """Run a verification scope; non-zero exit iff a proved check fails."""
    bounds = Bounds(n_max=config.n_max, p_max=config.p_max, lambda_max=config.lambda_max, m_max=config.m_max)
    manager = VerifyManager(config.max_concurrent, bounds, load_catalog(config.catalog), config.progress)
    manager.add_scope(config.scope)
    manager.start_all()
    report = manager.merged_report(config.scope)
    _emit(config, render(report, config.fmt))

    conjectural = [r for r in report.failures if r.section != "proved"]
    if conjectural:
        logger.warning("%d conjectural or empirical checks failed; they do not affect the exit code",
                       len(conjectural))
    return 0 if report.ok else 1


def cmd_tables(config: RunConfig) -> int:
    """Regenerate every table by lift and solve, next to the shipped versions, plus a diff."""
    out_dir = config.out or "tables_out"
    catalog = load_catalog(config.catalog)
    diff: List[str] = []
    for table_id in tables.TABLE_IDS:
        printed = tables.load(table_id)
        report = tables.reproduce_table(printed, catalog)
        regenerated = tables.regenerate_table(report)
        tables.save(regenerated, out_dir)
        tables.save(printed, os.path.join(out_dir, "printed"))
        diff.extend(tables.diff_tables(printed, regenerated))
        logger.info("%s: %d rows regenerated, %d flagged", table_id, len(regenerated.rows), report.flagged)
    with open(os.path.join(out_dir, "diff.txt"), "w", encoding="utf-8") as f:
        f.write("\n".join(diff) + ("\n" if diff else ""))
    print(f"{len(tables.TABLE_IDS)} tables written to {out_dir}; {len(diff)} differing entries")
    return 0


COMMANDS = {
    "expand": cmd_expand,
    "lift": cmd_lift,
    "verify": cmd_verify,
    "tables": cmd_tables,
}


def run(config: RunConfig) -> int:
    try:
        return COMMANDS[config.command](config)
    except EngineError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return 2
    except (ValueError, KeyError) as e:
        logger.error("%s", e)
        return 2
