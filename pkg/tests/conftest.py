"""Shared fixture data: a small two-county world with known percentages."""

from __future__ import annotations

import json

import pytest

from fitmap.ingest import build_snapshot, load_boundaries, load_school_sites, write_snapshot
from fitmap.model import (
    Assessment,
    FitnessRecord,
    Grade,
    ZoneCounts,
    level_of,
    parse_cdscode,
)

DISTRICT_A = "01100170000000"  # Alameda
DISTRICT_B = "01611190000000"  # Alameda
DISTRICT_C = "30664640000000"  # Orange
SCHOOL_A1 = "01100170130419"
SCHOOL_A2 = "01100176001788"
SCHOOL_B1 = "01611190130401"
SCHOOL_C1 = "30664640101234"

LEAID_A = "0601620"
LEAID_B = "0604740"
LEAID_C = "0628050"

DISTRICT_NAMES = {
    DISTRICT_A: ("Alameda City Unified", "Alameda"),
    DISTRICT_B: ("Berkeley Unified", "Alameda"),
    DISTRICT_C: ("Orange Unified", "Orange"),
}

SITE_ROWS = [
    # code, name, address, district, county, lon, lat
    (SCHOOL_A1, "Bay View Elementary", "10 Shore Rd, Alameda", "Alameda City Unified",
     "Alameda", -122.28, 37.76),
    (SCHOOL_A2, "Island Middle", "22 Park St, Alameda", "Alameda City Unified",
     "Alameda", -122.26, 37.74),
    (SCHOOL_B1, "Hillside Elementary", "5 Grove Ave, Berkeley", "Berkeley Unified",
     "Alameda", -122.15, 37.77),
    (SCHOOL_C1, "Canyon Elementary", "9 Ridge Dr, Orange", "Orange Unified",
     "Orange", -117.85, 33.75),
]

# aerobic_capacity counts per entity for year 2019 grade 5; None = suppressed
AEROBIC_COUNTS = {
    DISTRICT_A: (521, 337),
    DISTRICT_B: (200, 150),
    DISTRICT_C: (None, None),
    SCHOOL_A1: (50, 30),
    SCHOOL_A2: (80, 20),
    SCHOOL_B1: (40, 40),
    SCHOOL_C1: (10, 3),
}


def make_record(code: str, year: int, grade: int, assessment: Assessment,
                tested: int | None, hfz: int | None) -> FitnessRecord:
    entity = parse_cdscode(code)
    return FitnessRecord(
        entity=entity,
        level=level_of(entity),
        school_year=year,
        grade=Grade(grade),
        assessment=assessment,
        counts=ZoneCounts(tested=tested, hfz=hfz),
    )


def sample_records() -> list[FitnessRecord]:
    records = []
    for code, (tested, hfz) in AEROBIC_COUNTS.items():
        for i, assessment in enumerate(Assessment):
            if assessment is Assessment.AEROBIC_CAPACITY:
                t, h = tested, hfz
            elif tested is None:
                t, h = 30 + i, 15
            else:  # vary the other assessments but keep them deterministic
                t, h = tested, max(0, hfz - i)
            records.append(make_record(code, 2019, 5, assessment, t, h))
    # one more year so /api/meta has two entries
    records.append(make_record(DISTRICT_A, 2018, 5, Assessment.AEROBIC_CAPACITY, 500, 300))
    return records


def square(lon0: float, lat0: float, size: float = 0.1) -> list[list[list[float]]]:
    return [[
        [lon0, lat0],
        [lon0 + size, lat0],
        [lon0 + size, lat0 + size],
        [lon0, lat0 + size],
        [lon0, lat0],
    ]]


BOUNDARY_SQUARES = {
    DISTRICT_A: square(-122.3, 37.7),
    DISTRICT_B: square(-122.2, 37.7),
    DISTRICT_C: square(-117.9, 33.7),
}


def boundaries_geojson_bytes() -> bytes:
    features = []
    for code, rings in BOUNDARY_SQUARES.items():
        name, county = DISTRICT_NAMES[code]
        features.append(
            {
                "type": "Feature",
                "properties": {
                    "CDSCode": code,
                    "DistrictName": name,
                    "CountyName": county,
                },
                "geometry": {"type": "Polygon", "coordinates": rings},
            }
        )
    return json.dumps({"type": "FeatureCollection", "features": features}).encode()


def sites_csv_bytes() -> bytes:
    lines = ["cdscode,name,address,district_name,county_name,lon,lat"]
    for code, name, address, district, county, lon, lat in SITE_ROWS:
        lines.append(f'{code},{name},"{address}",{district},{county},{lon},{lat}')
    return "\n".join(lines).encode()


def crosswalk_csv_bytes() -> bytes:
    lines = [
        "leaid,cdscode",
        f"{LEAID_A},{DISTRICT_A}",
        f"{LEAID_B},{DISTRICT_B}",
        f"{LEAID_C},{DISTRICT_C}",
    ]
    return "\n".join(lines).encode()


WIDE_HEADER = (
    "ccode,dcode,scode,rtype,year,grade,"
    "ac_t,ac_h,bc_t,bc_h,ub_t,ub_h,ab_t,ab_h,fl_t,fl_h,tl_t,tl_h"
)

WIDE_MAPPING_TEXT = """\
layout = wide
entity.county = ccode
entity.district = dcode
entity.school = scode
level = rtype
level.school = S
level.district = D
year = year
grade = grade
suppressed = *,N/A,
aerobic_capacity.tested = ac_t
aerobic_capacity.hfz = ac_h
body_composition.tested = bc_t
body_composition.hfz = bc_h
upper_body_strength.tested = ub_t
upper_body_strength.hfz = ub_h
abdominal_strength.tested = ab_t
abdominal_strength.hfz = ab_h
flexibility.tested = fl_t
flexibility.hfz = fl_h
trunk_lift.tested = tl_t
trunk_lift.hfz = tl_h
"""


def wide_row(code: str, year: int = 2019, grade: int = 5,
             counts: list[tuple[str, str]] | None = None) -> str:
    """One wide CSV line for an entity; counts is 6 (tested, hfz) string pairs."""
    county, district, school = code[:2], code[2:7], code[7:]
    level = "D" if school == "0000000" else "S"
    if counts is None:
        counts = [(str(100 + 10 * i), str(60 + i)) for i in range(6)]
    cells = [county, district, school, level, str(year), str(grade)]
    for tested, hfz in counts:
        cells += [tested, hfz]
    return ",".join(cells)


@pytest.fixture(scope="session")
def sample_snapshot():
    sites, site_issues = load_school_sites(sites_csv_bytes())
    assert not site_issues
    boundaries, boundary_issues = load_boundaries(boundaries_geojson_bytes())
    assert not boundary_issues
    return build_snapshot(sample_records(), sites, boundaries)


@pytest.fixture()
def snapshot_dir(sample_snapshot, tmp_path):
    target = tmp_path / "snapshot"
    write_snapshot(sample_snapshot, target)
    return target
