"""District boundary loading from GeoJSON.

Geometries are normalized to MultiPolygon ring tuples with closed rings;
unclosed rings are a common producer defect and get auto-closed losslessly.
Joins are by CDS code only, so no geometry math happens here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..errors import FitmapError
from ..model import CdsCode, district_of, parse_cdscode
from .issues import IngestIssue, IssueKind
from .sites import clean_text

Ring = tuple[tuple[float, float], ...]
Polygon = tuple[Ring, ...]

DEFAULT_CODE_PROPERTY = "CDSCode"
DEFAULT_NAME_PROPERTY = "DistrictName"
DEFAULT_COUNTY_PROPERTY = "CountyName"


class MalformedGeoJson(FitmapError):
    pass


@dataclass(frozen=True)
class DistrictBoundary:
    code: CdsCode  # always district-level
    district_name: str
    county_name: str
    polygons: tuple[Polygon, ...]

    def __post_init__(self) -> None:
        if not self.code.is_district:
            raise ValueError(f"boundary code must be district-level: {self.code}")
        for polygon in self.polygons:
            for ring in polygon:
                if len(ring) < 4 or ring[0] != ring[-1]:
                    raise ValueError("rings must be closed with >= 4 vertices")


def _close_ring(coords: list) -> Ring:
    ring = [(float(x), float(y)) for x, y in coords]
    if len(ring) < 3:
        raise ValueError(f"ring has only {len(ring)} vertices")
    if ring[0] != ring[-1]:
        ring.append(ring[0])
    return tuple(ring)


def _polygons_of(geometry: dict) -> tuple[Polygon, ...]:
    gtype = geometry.get("type")
    coords = geometry.get("coordinates")
    if gtype == "Polygon":
        raw = [coords]
    elif gtype == "MultiPolygon":
        raw = coords
    else:
        raise ValueError(f"unsupported geometry type {gtype!r}")
    return tuple(tuple(_close_ring(ring) for ring in polygon) for polygon in raw)


def load_boundaries(
    data: bytes | str,
    source: str = "boundaries.geojson",
    code_property: str = DEFAULT_CODE_PROPERTY,
    name_property: str = DEFAULT_NAME_PROPERTY,
    county_property: str = DEFAULT_COUNTY_PROPERTY,
) -> tuple[dict[str, DistrictBoundary], list[IngestIssue]]:
    """Load a FeatureCollection into a district-code-keyed boundary map."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise MalformedGeoJson(f"{source}: not UTF-8: {exc}") from exc
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedGeoJson(f"{source}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise MalformedGeoJson(f"{source}: expected a GeoJSON FeatureCollection")
    features = doc.get("features")
    if not isinstance(features, list):
        raise MalformedGeoJson(f"{source}: features must be a list")

    boundaries: dict[str, DistrictBoundary] = {}
    issues: list[IngestIssue] = []
    for position, feature in enumerate(features, start=1):
        properties = feature.get("properties") or {}
        raw_code = str(properties.get(code_property, "")).strip()
        try:
            code = district_of(parse_cdscode(raw_code))
        except FitmapError as exc:
            issues.append(
                IngestIssue(
                    source,
                    position,
                    IssueKind.BAD_CODE,
                    f"feature {position}: {exc}",
                )
            )
            continue
        try:
            polygons = _polygons_of(feature.get("geometry") or {})
        except (ValueError, TypeError) as exc:
            issues.append(
                IngestIssue(
                    source,
                    position,
                    IssueKind.BAD_CODE,
                    f"feature {position} ({raw_code}): {exc}",
                )
            )
            continue
        boundary = DistrictBoundary(
            code=code,
            district_name=clean_text(str(properties.get(name_property, ""))),
            county_name=clean_text(str(properties.get(county_property, ""))),
            polygons=polygons,
        )
        key = str(code)
        if key in boundaries:
            issues.append(
                IngestIssue(
                    source,
                    position,
                    IssueKind.DUPLICATE_KEY,
                    f"boundary {key} repeats; last wins",
                )
            )
        boundaries[key] = boundary
    return boundaries, issues
