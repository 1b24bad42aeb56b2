from __future__ import annotations

import enum
from dataclasses import dataclass


class IssueKind(str, enum.Enum):
    SUPPRESSED_CELL = "SuppressedCell"
    BAD_NUMBER = "BadNumber"
    BAD_CODE = "BadCode"
    DUPLICATE_KEY = "DuplicateKey"
    UNMATCHED_GEOMETRY = "UnmatchedGeometry"


@dataclass(frozen=True)
class IngestIssue:
    """One non-fatal problem found while reading a source file."""

    source: str
    line: int  # 1-based physical line in the source file
    kind: IssueKind
    detail: str

    def __post_init__(self) -> None:
        if self.line < 1:
            raise ValueError(f"line must be >= 1, got {self.line}")


def summarize(issues: list[IngestIssue]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for issue in issues:
        counts[issue.kind.value] = counts.get(issue.kind.value, 0) + 1
    return counts
