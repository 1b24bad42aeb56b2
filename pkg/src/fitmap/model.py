"""Core identifiers, enumerations and record types.

Everything here is immutable after construction and safe to share across
threads. Text forms are fixed: a CDS code is the 14-digit concatenation of
its county(2) / district(5) / school(7) parts, an LEA id is 7 digits, and
assessments serialize as lower-snake tokens.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import FitmapError

MIN_YEAR = 1999
MAX_YEAR = 2019

DISTRICT_SCHOOL_PART = "0000000"


class NotFourteenDigits(FitmapError):
    pass


class NonDigitCharacter(FitmapError):
    pass


class BadLeaid(FitmapError):
    pass


@dataclass(frozen=True, order=True)
class CdsCode:
    """County-District-School identifier, split into its three parts."""

    county: str
    district: str
    school: str

    def __post_init__(self) -> None:
        for part, width in ((self.county, 2), (self.district, 5), (self.school, 7)):
            if len(part) != width or not part.isascii() or not part.isdigit():
                raise ValueError(f"bad CDS part {part!r}, want {width} digits")

    def __str__(self) -> str:
        return self.county + self.district + self.school

    @property
    def text(self) -> str:
        return str(self)

    @property
    def is_district(self) -> bool:
        return self.school == DISTRICT_SCHOOL_PART


def parse_cdscode(text: str) -> CdsCode:
    """Split a 14-digit string into its 2/5/7 parts, preserving leading zeros."""
    if len(text) != 14:
        raise NotFourteenDigits(f"CDS code must be 14 digits, got {len(text)}: {text!r}")
    if not text.isascii() or not text.isdigit():
        raise NonDigitCharacter(f"CDS code contains non-digit characters: {text!r}")
    return CdsCode(text[:2], text[2:7], text[7:])


def district_of(code: CdsCode) -> CdsCode:
    """District-level code for any entity: school part zeroed. Idempotent."""
    if code.is_district:
        return code
    return CdsCode(code.county, code.district, DISTRICT_SCHOOL_PART)


@dataclass(frozen=True, order=True)
class Leaid:
    """NCES local-education-agency id."""

    value: str

    def __post_init__(self) -> None:
        if len(self.value) != 7 or not self.value.isascii() or not self.value.isdigit():
            raise ValueError(f"LEAID must be 7 digits: {self.value!r}")

    def __str__(self) -> str:
        return self.value


def parse_leaid(text: str) -> Leaid:
    if len(text) != 7 or not text.isascii() or not text.isdigit():
        raise BadLeaid(f"LEAID must be 7 digits: {text!r}")
    return Leaid(text)


class Assessment(str, enum.Enum):
    """The six fitness test subjects, in canonical order."""

    AEROBIC_CAPACITY = "aerobic_capacity"
    BODY_COMPOSITION = "body_composition"
    UPPER_BODY_STRENGTH = "upper_body_strength"
    ABDOMINAL_STRENGTH = "abdominal_strength"
    FLEXIBILITY = "flexibility"
    TRUNK_LIFT = "trunk_lift"


_ASSESSMENT_BY_TOKEN = {a.value: a for a in Assessment}


def parse_assessment(token: str) -> Assessment:
    try:
        return _ASSESSMENT_BY_TOKEN[token.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown assessment token: {token!r}") from None


class Grade(enum.IntEnum):
    """Tested grades."""

    FIFTH = 5
    SEVENTH = 7
    NINTH = 9


def parse_grade(value: int | str) -> Grade:
    try:
        return Grade(int(str(value).strip()))
    except (ValueError, KeyError):
        raise ValueError(f"grade must be one of 5, 7, 9: {value!r}") from None


class Level(str, enum.Enum):
    SCHOOL = "school"
    DISTRICT = "district"


def level_of(code: CdsCode) -> Level:
    return Level.DISTRICT if code.is_district else Level.SCHOOL


@dataclass(frozen=True)
class ZoneCounts:
    """Zone counts for one (entity, year, grade, assessment) cell.

    A ``None`` count means the source suppressed or omitted the cell; zero is
    a real outcome and is never used for suppression.
    """

    tested: int | None = None
    hfz: int | None = None
    needs_improvement: int | None = None
    high_risk: int | None = None

    def __post_init__(self) -> None:
        for name in ("tested", "hfz", "needs_improvement", "high_risk"):
            v = getattr(self, name)
            if v is not None and (not isinstance(v, int) or v < 0):
                raise ValueError(f"{name} must be a non-negative count, got {v!r}")
        if self.tested is not None:
            in_zones = [self.hfz, self.needs_improvement, self.high_risk]
            known = [v for v in in_zones if v is not None]
            if known and sum(known) > self.tested:
                raise ValueError(
                    f"zone counts {known} exceed tested={self.tested}"
                )


def pct_hfz(counts: ZoneCounts) -> float | None:
    """Percent of tested students in the healthy zone, or None.

    Missing when tested is zero or either count was suppressed. Full float
    precision; rounding is a presentation concern.
    """
    if counts.tested is None or counts.hfz is None or counts.tested == 0:
        return None
    return counts.hfz * 100.0 / counts.tested


@dataclass(frozen=True)
class FitnessRecord:
    """One (entity, year, grade, assessment) observation."""

    entity: CdsCode
    level: Level
    school_year: int  # ending calendar year of the school year
    grade: Grade
    assessment: Assessment
    counts: ZoneCounts

    def __post_init__(self) -> None:
        if self.level is not level_of(self.entity):
            raise ValueError(
                f"level {self.level.value} inconsistent with entity {self.entity}"
            )
        if not (MIN_YEAR <= self.school_year <= MAX_YEAR):
            raise ValueError(
                f"school_year {self.school_year} outside {MIN_YEAR}-{MAX_YEAR}"
            )

    @property
    def pct_hfz(self) -> float | None:
        # Always recomputed from counts; never trusted from a source column.
        return pct_hfz(self.counts)

    @property
    def key(self) -> tuple[str, int, int, str]:
        return (str(self.entity), self.school_year, int(self.grade), self.assessment.value)
