"""Column mappings that bind a source CSV layout to canonical record fields.

Research-file layouts drift across years, so a flat key=value mapping file
is the unit of configuration: the code never changes, the mapping does.

Two layouts exist. ``long`` files carry one assessment per row in an
``assessment`` column; ``wide`` files carry count-column groups for several
assessments per row. The entity code may come as one 14-digit column or as
separate county/district/school part columns (parts are zero-padded to their
canonical widths, a common source inconsistency).

Mapping file syntax: ``key = value`` lines, ``#`` comments, blank lines
ignored. List values split on commas; an empty element is the empty string,
so ``suppressed = *,N/A,`` marks ``*``, ``N/A`` and the empty cell as
suppression tokens.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import FitmapError
from ..model import Assessment

COUNT_FIELDS = ("tested", "hfz", "ni", "ni_hr")

DEFAULT_SUPPRESSION_TOKENS = ("*", "N/A", "")


class MappingError(FitmapError):
    pass


@dataclass(frozen=True)
class ColumnMapping:
    layout: str  # "long" | "wide"
    entity: str | None = None  # full 14-digit column
    entity_parts: tuple[str, str, str] | None = None  # county, district, school
    level: str = "level"
    level_school_tokens: tuple[str, ...] = ("S", "school")
    level_district_tokens: tuple[str, ...] = ("D", "district")
    year: str = "year"
    grade: str = "grade"
    # long layout
    assessment: str | None = None
    counts: dict[str, str] = field(default_factory=dict)  # canonical -> source column
    # wide layout: assessment -> {canonical count field -> source column}
    groups: dict[Assessment, dict[str, str]] = field(default_factory=dict)
    suppression_tokens: tuple[str, ...] = DEFAULT_SUPPRESSION_TOKENS

    def __post_init__(self) -> None:
        if self.layout not in ("long", "wide"):
            raise MappingError(f"layout must be long or wide, got {self.layout!r}")
        if (self.entity is None) == (self.entity_parts is None):
            raise MappingError("map exactly one of entity or entity.county/district/school")
        if self.layout == "long":
            if not self.assessment:
                raise MappingError("long layout requires an assessment column")
            missing = [f for f in COUNT_FIELDS if f not in self.counts]
            if missing:
                raise MappingError(f"long layout missing count columns: {missing}")
        else:
            if not self.groups:
                raise MappingError("wide layout requires at least one assessment group")
            for a, cols in self.groups.items():
                if "tested" not in cols or "hfz" not in cols:
                    raise MappingError(f"group {a.value} must map tested and hfz")
        for token in self.suppression_tokens:
            if not isinstance(token, str):
                raise MappingError("suppression tokens must be strings")

    def source_columns(self) -> list[str]:
        cols = [self.level, self.year, self.grade]
        cols += [self.entity] if self.entity else list(self.entity_parts or ())
        if self.layout == "long":
            cols.append(self.assessment or "")
            cols += [self.counts[f] for f in COUNT_FIELDS]
        else:
            for group in self.groups.values():
                cols += list(group.values())
        return cols


def default_mapping() -> ColumnMapping:
    """The canonical long-form schema, also used for snapshot records.csv."""
    return ColumnMapping(
        layout="long",
        entity="entity",
        level="level",
        level_school_tokens=("school", "S"),
        level_district_tokens=("district", "D"),
        year="year",
        grade="grade",
        assessment="assessment",
        counts={f: f for f in COUNT_FIELDS},
    )


def _split_list(value: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in value.split(","))


def parse_mapping(text: str) -> ColumnMapping:
    """Parse a key=value mapping file. Unknown or repeated keys are errors."""
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise MappingError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key in pairs:
            raise MappingError(f"line {lineno}: key {key!r} mapped twice")
        pairs[key] = value.strip()

    layout = pairs.pop("layout", "long")
    entity = pairs.pop("entity", None)
    part_keys = ("entity.county", "entity.district", "entity.school")
    parts = tuple(pairs.pop(k) for k in part_keys) if part_keys[0] in pairs else None
    if parts is not None and len(parts) != 3:
        raise MappingError("entity parts require county, district and school columns")

    kwargs: dict = {
        "layout": layout,
        "entity": entity,
        "entity_parts": parts,  # type: ignore[arg-type]
        "level": pairs.pop("level", "level"),
        "year": pairs.pop("year", "year"),
        "grade": pairs.pop("grade", "grade"),
    }
    if "level.school" in pairs:
        kwargs["level_school_tokens"] = _split_list(pairs.pop("level.school"))
    if "level.district" in pairs:
        kwargs["level_district_tokens"] = _split_list(pairs.pop("level.district"))
    if "suppressed" in pairs:
        kwargs["suppression_tokens"] = _split_list(pairs.pop("suppressed"))

    if layout == "long":
        kwargs["assessment"] = pairs.pop("assessment", "assessment")
        kwargs["counts"] = {f: pairs.pop(f) for f in COUNT_FIELDS if f in pairs}
    else:
        groups: dict[Assessment, dict[str, str]] = {}
        for a in Assessment:
            cols = {
                f: pairs.pop(f"{a.value}.{f}")
                for f in COUNT_FIELDS
                if f"{a.value}.{f}" in pairs
            }
            if cols:
                groups[a] = cols
        kwargs["groups"] = groups

    if pairs:
        raise MappingError(f"unknown mapping keys: {sorted(pairs)}")
    return ColumnMapping(**kwargs)
