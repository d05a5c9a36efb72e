"""Verification manager: queues scopes and runs them on a worker pool."""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from enum import Enum, auto
from typing import Dict, List, Optional

from tqdm import tqdm

from . import corollaries, tables
from .catalog import Catalog, load_catalog
from .checks import CheckRecord, CheckStatus, VerifyReport
from .corollaries import Evaluator
from .errors import EngineError
from .shimura import LiftClaim

logger = logging.getLogger(__name__)


class TaskStatus(Enum):
    PENDING = auto()
    RUNNING = auto()
    COMPLETED = auto()
    ERROR = auto()


@dataclass
class Bounds:
    """Sweep limits; None keeps each check's own default."""
    n_max: Optional[int] = None
    p_max: int = 100
    lambda_max: int = 3
    m_max: int = 99


@dataclass
class VerifyTask:
    """One unit of verification work."""
    scope: str
    status: TaskStatus = TaskStatus.PENDING
    report: Optional[VerifyReport] = None
    error_message: str = ""


def expand_scope(scope: str) -> List[str]:
    """Split a requested scope into the units a worker runs."""
    if scope == "all":
        return ([f"table:{t}" for t in tables.TABLE_IDS]
                + [f"cor:{c}" for c in corollaries.corollary_ids()]
                + ["equivalences"]
                + [f"relations:{s}" for s in corollaries.RELATION_SETS]
                + ["congruences", "newforms", "conjecture", "subspace", "search"])
    if scope == "tables":
        return [f"table:{t}" for t in tables.TABLE_IDS]
    if scope == "corollaries":
        return [f"cor:{c}" for c in corollaries.corollary_ids()]
    if scope == "relations":
        return [f"relations:{s}" for s in corollaries.RELATION_SETS]
    return [scope]


def _section(report: tables.TableReport, row: tables.RowReport) -> str:
    if report.conjectural or row.claim is LiftClaim.ASSUMED_MAPPING:
        return "conjectural"
    if row.claim is LiftClaim.CHARACTER_EXTENSION:
        return "empirical"
    return "proved"


def table_records(report: tables.TableReport) -> VerifyReport:
    """Row reports as check records; mismatches within the table's allowance are flagged, not failed.

    The section follows the lift claim of each row: character-twisted lifts
    are empirical, lifts past the admissibility gate conjectural.
    """
    out = VerifyReport(f"table:{report.table_id}")
    allowance = tables.MISMATCH_ALLOWANCE.get(report.table_id, 0)
    within = report.flagged <= allowance
    for row in report.rows:
        if row.status is tables.RowStatus.MATCH:
            status = CheckStatus.PASS
        elif row.status is tables.RowStatus.ERRATUM:
            status = CheckStatus.ERRATUM
        elif row.status is tables.RowStatus.MISMATCH and within:
            status = CheckStatus.FLAGGED
        elif row.status is tables.RowStatus.ERROR:
            status = CheckStatus.ERROR
        else:
            status = CheckStatus.FAIL
        notes = [n for n in (row.row.note, row.error, row.evidence) if n]
        if row.combo is not None and row.constant_status != "exact":
            notes.append(f"constant term {row.constant_status}")
        claim = row.claim.name.lower() if row.claim not in (None, LiftClaim.PROVED) else ""
        out.add(CheckRecord(f"table:{report.table_id}", str(row.row.form), row.row.lambdas, row.solved,
                            status, _section(report, row), "; ".join(notes), claim))
    return out


def run_scope(scope: str, bounds: Bounds = None, catalog: Catalog = None,
              evaluator: Evaluator = None) -> VerifyReport:
    """Run a single unit scope."""
    bounds = bounds or Bounds()
    catalog = catalog or load_catalog()
    evaluator = evaluator or Evaluator(catalog)
    kind, _, arg = scope.partition(":")
    if kind == "table":
        if arg not in tables.TABLE_IDS:
            raise KeyError(f"no table {arg!r}")
        return table_records(tables.reproduce_table(tables.load(arg), catalog))
    if kind == "cor":
        return corollaries.verify_corollary(arg, bounds.n_max, catalog, evaluator)
    if kind == "relations":
        return corollaries.verify_relations(arg, bounds.n_max, catalog, evaluator)
    if kind == "equivalences":
        return corollaries.verify_equivalences(bounds.n_max or 500, catalog, evaluator)
    if kind == "congruences":
        return corollaries.verify_congruences(bounds.p_max, bounds.lambda_max, catalog, evaluator)
    if kind == "newforms":
        return corollaries.verify_newforms(catalog=catalog)
    if kind == "conjecture":
        return corollaries.check_conjecture(bounds.m_max, catalog=catalog, evaluator=evaluator)
    if kind == "subspace":
        return corollaries.verify_subspace(arg or "T9", catalog=catalog)
    if kind == "search":
        return corollaries.search_nonary_relations(n_max=bounds.n_max or 20, catalog=catalog, evaluator=evaluator)
    raise KeyError(f"unknown scope {scope!r}")


class VerifyManager:
    """Queues verification scopes and runs them on a thread pool."""

    def __init__(self, max_concurrent: int = 2, bounds: Bounds = None, catalog: Catalog = None,
                 show_progress: bool = True):
        self.max_concurrent = max_concurrent
        self.bounds = bounds or Bounds()
        self.catalog = catalog or load_catalog()
        self.evaluator = Evaluator(self.catalog)
        self.show_progress = show_progress

        self._tasks: Dict[str, VerifyTask] = {}
        self._order: List[str] = []
        self._task_counter = 0
        self._mutex = threading.Lock()

    def add_task(self, scope: str) -> str:
        """Queue a scope. Returns task_id."""
        with self._mutex:
            self._task_counter += 1
            task_id = f"task_{self._task_counter}"
            self._tasks[task_id] = VerifyTask(scope=scope)
            self._order.append(task_id)
            return task_id

    def add_scope(self, scope: str) -> List[str]:
        """Queue every unit of a possibly compound scope."""
        return [self.add_task(unit) for unit in expand_scope(scope)]

    def get_task(self, task_id: str) -> Optional[VerifyTask]:
        return self._tasks.get(task_id)

    def _run_task(self, task_id: str) -> VerifyTask:
        task = self._tasks[task_id]
        task.status = TaskStatus.RUNNING
        try:
            task.report = run_scope(task.scope, self.bounds, self.catalog, self.evaluator)
            task.status = TaskStatus.COMPLETED
        except (EngineError, KeyError, ValueError) as e:
            logger.error("%s failed: %s", task.scope, e)
            task.status = TaskStatus.ERROR
            task.error_message = str(e)
        return task

    def start_all(self) -> List[VerifyTask]:
        """Run every pending task; returns the tasks in the order they were added."""
        pending = [tid for tid in self._order if self._tasks[tid].status is TaskStatus.PENDING]
        with ThreadPoolExecutor(max_workers=self.max_concurrent) as pool:
            futures = [pool.submit(self._run_task, tid) for tid in pending]
            done = as_completed(futures)
            if self.show_progress:
                done = tqdm(done, total=len(futures), desc="verify", unit="scope")
            for future in done:
                task = future.result()
                logger.debug("%s: %s", task.scope, task.status.name.lower())
        return [self._tasks[tid] for tid in self._order]

    def merged_report(self, scope: str = "all") -> VerifyReport:
        """All task reports in task order; a failed task becomes an ERROR record."""
        merged = VerifyReport(scope)
        for tid in self._order:
            task = self._tasks[tid]
            if task.report is not None:
                merged.extend(task.report)
            elif task.status is TaskStatus.ERROR:
                merged.add(CheckRecord(task.scope, "", None, None, CheckStatus.ERROR, note=task.error_message))
        return merged
