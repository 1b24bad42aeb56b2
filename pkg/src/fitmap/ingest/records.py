"""Research-file parsing: cleaning, restructuring, dedup.

Every cell is whitespace-trimmed before interpretation. Suppressed or bad
count cells become missing counts on an otherwise usable record; rows with
unusable key material (entity, year, grade, assessment) are dropped with an
issue. No school/district row vanishes silently: it either contributes
records before dedup or is referenced by at least one issue.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from ..errors import FitmapError
from ..model import (
    Assessment,
    CdsCode,
    FitnessRecord,
    ZoneCounts,
    level_of,
    parse_assessment,
    parse_cdscode,
    parse_grade,
    MAX_YEAR,
    MIN_YEAR,
)
from .issues import IngestIssue, IssueKind
from .mapping import COUNT_FIELDS, ColumnMapping


class UnreadableStream(FitmapError):
    pass


class HeaderMissingMappedColumn(FitmapError):
    pass


@dataclass
class ParseStats:
    rows_total: int = 0  # data rows of any level
    rows_in_scope: int = 0  # school/district-level data rows
    rows_skipped_level: int = 0  # county/state/other rows
    rows_with_records: int = 0  # in-scope rows contributing >= 1 record pre-dedup
    rows_rejected: int = 0  # in-scope rows contributing none


@dataclass
class ParseResult:
    records: list[FitnessRecord] = field(default_factory=list)
    issues: list[IngestIssue] = field(default_factory=list)
    stats: ParseStats = field(default_factory=ParseStats)

    def __iter__(self):  # allow records, issues = parse_records(...)
        return iter((self.records, self.issues))


def _decode(data: bytes | str | io.TextIOBase) -> str:
    if isinstance(data, str):
        return data
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise UnreadableStream(f"not valid UTF-8: {exc}") from exc
    try:
        return data.read()
    except OSError as exc:
        raise UnreadableStream(str(exc)) from exc


def _header_index(header: list[str], mapping: ColumnMapping) -> dict[str, int]:
    pos = {name.strip(): i for i, name in enumerate(header)}
    index: dict[str, int] = {}
    missing: list[str] = []
    for col in mapping.source_columns():
        if col in pos:
            index[col] = pos[col]
        else:
            missing.append(col)
    if missing:
        raise HeaderMissingMappedColumn(
            f"header lacks mapped column(s): {', '.join(sorted(set(missing)))}"
        )
    return index


def _parse_count(cell: str, tokens: tuple[str, ...]) -> tuple[str, int | None]:
    """Classify one count cell: ('ok', n) | ('suppressed', None) | ('bad', None)."""
    if cell in tokens:
        return "suppressed", None
    try:
        value = float(cell)
    except ValueError:
        return "bad", None
    if value < 0 or value != int(value):
        return "bad", None
    return "ok", int(value)


class _Row:
    """One cleaned source row with mapped-column access."""

    def __init__(self, cells: list[str], index: dict[str, int], source: str, line: int):
        self.cells = cells
        self.index = index
        self.source = source
        self.line = line

    def get(self, column: str) -> str:
        i = self.index[column]
        return self.cells[i].strip() if i < len(self.cells) else ""


def _entity_of(row: _Row, mapping: ColumnMapping) -> CdsCode:
    if mapping.entity:
        return parse_cdscode(row.get(mapping.entity))
    county_col, district_col, school_col = mapping.entity_parts  # type: ignore[misc]
    county = row.get(county_col)
    district = row.get(district_col)
    school = row.get(school_col)
    # Part columns are often numeric in sources; restore canonical widths.
    if county.isdigit():
        county = county.zfill(2)
    if district.isdigit():
        district = district.zfill(5)
    if school.isdigit():
        school = school.zfill(7)
    return parse_cdscode(county + district + school)


def _counts_for(
    row: _Row, columns: dict[str, str], mapping: ColumnMapping
) -> tuple[ZoneCounts, list[str], list[str]]:
    """Parse one count-column group. Returns (counts, suppressed names, bad names)."""
    parsed: dict[str, int | None] = {f: None for f in COUNT_FIELDS}
    suppressed: list[str] = []
    bad: list[str] = []
    for canonical, column in columns.items():
        state, value = _parse_count(row.get(column), mapping.suppression_tokens)
        if state == "ok":
            parsed[canonical] = value
        elif state == "suppressed":
            suppressed.append(column)
        else:
            bad.append(column)
    counts = ZoneCounts(
        tested=parsed["tested"],
        hfz=parsed["hfz"],
        needs_improvement=parsed["ni"],
        high_risk=parsed["ni_hr"],
    )
    return counts, suppressed, bad


def _record_from_group(
    row: _Row,
    entity: CdsCode,
    year: int,
    grade,
    assessment: Assessment,
    columns: dict[str, str],
    mapping: ColumnMapping,
) -> tuple[FitnessRecord | None, list[IngestIssue]]:
    issues: list[IngestIssue] = []
    try:
        counts, suppressed, bad = _counts_for(row, columns, mapping)
    except ValueError as exc:
        return None, [
            IngestIssue(row.source, row.line, IssueKind.BAD_NUMBER, str(exc))
        ]
    for column in bad:
        issues.append(
            IngestIssue(
                row.source,
                row.line,
                IssueKind.BAD_NUMBER,
                f"unparseable count in column {column!r}; treated as missing",
            )
        )
    if suppressed:
        issues.append(
            IngestIssue(
                row.source,
                row.line,
                IssueKind.SUPPRESSED_CELL,
                f"{assessment.value}: suppressed column(s) {', '.join(suppressed)}",
            )
        )
    record = FitnessRecord(
        entity=entity,
        level=level_of(entity),
        school_year=year,
        grade=grade,
        assessment=assessment,
        counts=counts,
    )
    return record, issues


def explode_by_assessment(
    row: dict[str, str] | _Row,
    mapping: ColumnMapping,
    source: str = "<row>",
    line: int = 1,
) -> tuple[list[FitnessRecord], list[IngestIssue]]:
    """Restructure one wide row into one record per mapped assessment group.

    Output order follows the Assessment enumeration. Key-material problems
    drop the whole row with one issue; count problems only blank cells.
    """
    if isinstance(row, dict):
        cells = list(row.values())
        index = {name: i for i, name in enumerate(row)}
        row = _Row([c for c in cells], index, source, line)

    issues: list[IngestIssue] = []
    try:
        entity = _entity_of(row, mapping)
        year = int(row.get(mapping.year))
        grade = parse_grade(row.get(mapping.grade))
    except FitmapError as exc:
        return [], [IngestIssue(row.source, row.line, IssueKind.BAD_CODE, str(exc))]
    except ValueError as exc:
        return [], [IngestIssue(row.source, row.line, IssueKind.BAD_NUMBER, str(exc))]
    if not (MIN_YEAR <= year <= MAX_YEAR):
        return [], [
            IngestIssue(
                row.source,
                row.line,
                IssueKind.BAD_NUMBER,
                f"school_year {year} outside {MIN_YEAR}-{MAX_YEAR}",
            )
        ]

    records: list[FitnessRecord] = []
    for assessment in Assessment:  # canonical order
        columns = mapping.groups.get(assessment)
        if not columns:
            continue
        record, group_issues = _record_from_group(
            row, entity, year, grade, assessment, columns, mapping
        )
        issues.extend(group_issues)
        if record is not None:
            records.append(record)
    return records, issues


def _long_row_records(
    row: _Row, mapping: ColumnMapping
) -> tuple[list[FitnessRecord], list[IngestIssue]]:
    try:
        entity = _entity_of(row, mapping)
        year = int(row.get(mapping.year))
        grade = parse_grade(row.get(mapping.grade))
        assessment = parse_assessment(row.get(mapping.assessment or "assessment"))
    except FitmapError as exc:
        return [], [IngestIssue(row.source, row.line, IssueKind.BAD_CODE, str(exc))]
    except ValueError as exc:
        return [], [IngestIssue(row.source, row.line, IssueKind.BAD_NUMBER, str(exc))]
    if not (MIN_YEAR <= year <= MAX_YEAR):
        return [], [
            IngestIssue(
                row.source,
                row.line,
                IssueKind.BAD_NUMBER,
                f"school_year {year} outside {MIN_YEAR}-{MAX_YEAR}",
            )
        ]
    columns = {f: mapping.counts[f] for f in COUNT_FIELDS}
    record, issues = _record_from_group(
        row, entity, year, grade, assessment, columns, mapping
    )
    return ([record] if record is not None else []), issues


def _level_kind(row: _Row, mapping: ColumnMapping) -> str:
    token = row.get(mapping.level)
    if token in mapping.level_school_tokens:
        return "school"
    if token in mapping.level_district_tokens:
        return "district"
    return "other"


def parse_records(
    data: bytes | str | io.TextIOBase,
    mapping: ColumnMapping,
    source: str = "records.csv",
) -> ParseResult:
    """Parse one research file into cleaned records plus issues.

    Duplicate (entity, year, grade, assessment) keys keep the last occurrence
    and emit a DuplicateKey issue. County/state-level rows are out of scope
    and skipped without issues.
    """
    text = _decode(data)
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise UnreadableStream(f"{source}: empty file, no header") from None
    index = _header_index(header, mapping)

    result = ParseResult()
    by_key: dict[tuple, tuple[FitnessRecord, int]] = {}
    for raw in reader:
        if not any(cell.strip() for cell in raw):
            continue  # blank line
        line = reader.line_num
        row = _Row(raw, index, source, line)
        result.stats.rows_total += 1
        kind = _level_kind(row, mapping)
        if kind == "other":
            result.stats.rows_skipped_level += 1
            continue
        result.stats.rows_in_scope += 1

        if mapping.layout == "wide":
            records, issues = explode_by_assessment(row, mapping)
        else:
            records, issues = _long_row_records(row, mapping)

        # Level column must agree with the code's school part.
        kept: list[FitnessRecord] = []
        for record in records:
            if record.level.value != kind:
                issues.append(
                    IngestIssue(
                        source,
                        line,
                        IssueKind.BAD_CODE,
                        f"level column says {kind} but code {record.entity} is "
                        f"{record.level.value}-level",
                    )
                )
            else:
                kept.append(record)

        result.issues.extend(issues)
        if kept:
            result.stats.rows_with_records += 1
        else:
            result.stats.rows_rejected += 1
        for record in kept:
            key = record.key
            if key in by_key:
                _, prev_line = by_key[key]
                result.issues.append(
                    IngestIssue(
                        source,
                        line,
                        IssueKind.DUPLICATE_KEY,
                        f"key {key} repeats; line {line} replaces line {prev_line}",
                    )
                )
            by_key[key] = (record, line)

    result.records = [record for record, _ in by_key.values()]
    return result
