"""School-site directory loading (one point per school)."""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass

from ..errors import FitmapError
from ..model import CdsCode, parse_cdscode
from .issues import IngestIssue, IssueKind
from .records import UnreadableStream, _decode

SITE_COLUMNS = ("cdscode", "name", "address", "district_name", "county_name", "lon", "lat")

_WHITESPACE_RUN = re.compile(r"\s+")


class HeaderMissingSiteColumn(FitmapError):
    pass


def clean_text(value: str) -> str:
    """Trim and collapse internal whitespace runs; stable join/display form."""
    return _WHITESPACE_RUN.sub(" ", value.strip())


@dataclass(frozen=True)
class SchoolSite:
    code: CdsCode
    name: str
    address: str
    district_name: str
    county_name: str
    lon: float
    lat: float

    def __post_init__(self) -> None:
        if not (-180.0 <= self.lon <= 180.0):
            raise ValueError(f"lon out of range: {self.lon}")
        if not (-90.0 <= self.lat <= 90.0):
            raise ValueError(f"lat out of range: {self.lat}")
        if self.code.is_district:
            raise ValueError(f"site code must be school-level: {self.code}")


def load_school_sites(
    data: bytes | str | io.TextIOBase, source: str = "sites.csv"
) -> tuple[dict[str, SchoolSite], list[IngestIssue]]:
    """Load the site directory into a code-keyed map, last occurrence winning."""
    text = _decode(data)
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = [h.strip().lower() for h in next(reader)]
    except StopIteration:
        raise UnreadableStream(f"{source}: empty file, no header") from None
    pos = {name: i for i, name in enumerate(header)}
    missing = [c for c in SITE_COLUMNS if c not in pos]
    if missing:
        raise HeaderMissingSiteColumn(
            f"site header lacks column(s): {', '.join(missing)}"
        )

    sites: dict[str, SchoolSite] = {}
    issues: list[IngestIssue] = []
    for raw in reader:
        if not any(cell.strip() for cell in raw):
            continue
        line = reader.line_num

        def cell(column: str) -> str:
            i = pos[column]
            return raw[i].strip() if i < len(raw) else ""

        try:
            code = parse_cdscode(cell("cdscode"))
        except FitmapError as exc:
            issues.append(IngestIssue(source, line, IssueKind.BAD_CODE, str(exc)))
            continue
        try:
            lon = float(cell("lon"))
            lat = float(cell("lat"))
        except ValueError:
            issues.append(
                IngestIssue(source, line, IssueKind.BAD_NUMBER, "unparseable lon/lat")
            )
            continue
        try:
            site = SchoolSite(
                code=code,
                name=clean_text(cell("name")),
                address=clean_text(cell("address")),
                district_name=clean_text(cell("district_name")),
                county_name=clean_text(cell("county_name")),
                lon=lon,
                lat=lat,
            )
        except ValueError as exc:
            kind = IssueKind.BAD_CODE if "school-level" in str(exc) else IssueKind.BAD_NUMBER
            issues.append(IngestIssue(source, line, kind, str(exc)))
            continue
        key = str(code)
        if key in sites:
            issues.append(
                IngestIssue(
                    source, line, IssueKind.DUPLICATE_KEY, f"site {key} repeats; last wins"
                )
            )
        sites[key] = site
    return sites, issues
