"""Check records shared by the verification passes."""

from dataclasses import dataclass, field
from enum import Enum, auto
from typing import List


class CheckStatus(Enum):
    PASS = auto()
    FAIL = auto()
    ERRATUM = auto()  # the printed statement fails, its corrected reading holds
    FLAGGED = auto()  # solved differs from printed, within the allowance of its table
    ERROR = auto()


@dataclass
class CheckRecord:
    """One comparison: what was checked, on which inputs, and the outcome."""
    check_id: str
    inputs: str
    expected: object
    got: object
    status: CheckStatus
    section: str = "proved"  # "conjectural" for anything resting on an unproved lift
    note: str = ""
    claim: str = ""  # lift claim behind a table row, when it is not proved

    @property
    def ok(self) -> bool:
        return self.status in (CheckStatus.PASS, CheckStatus.ERRATUM, CheckStatus.FLAGGED)


@dataclass
class VerifyReport:
    scope: str
    records: List[CheckRecord] = field(default_factory=list)

    def add(self, record: CheckRecord):
        self.records.append(record)

    def extend(self, other: "VerifyReport"):
        self.records.extend(other.records)

    def count(self, status: CheckStatus) -> int:
        return sum(1 for r in self.records if r.status is status)

    @property
    def failures(self) -> List[CheckRecord]:
        return [r for r in self.records if not r.ok]

    @property
    def ok(self) -> bool:
        """Proved checks must all hold; empirical and conjectural ones are reported but never gate."""
        return not any(r for r in self.failures if r.section == "proved")
