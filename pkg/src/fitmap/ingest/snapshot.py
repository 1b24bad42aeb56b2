"""The immutable snapshot: indexed records + geometry + manifest.

On disk a snapshot is a directory of four human-inspectable files:

    records.csv         canonical long form, sorted by key
    sites.csv           school points, sorted by code
    boundaries.geojson  district polygons, sorted by code, MultiPolygon only
    manifest.json       years/counties present, checksums, unmatched codes

Serialization is canonical (fixed ordering, LF line endings), so equal
snapshots produce byte-identical files and the manifest checksums double as
a content digest.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import FitmapError
from ..model import FitnessRecord, district_of
from .boundaries import DistrictBoundary, load_boundaries
from .issues import IssueKind
from .mapping import default_mapping
from .records import parse_records
from .sites import SchoolSite, load_school_sites

RECORDS_FILE = "records.csv"
SITES_FILE = "sites.csv"
BOUNDARIES_FILE = "boundaries.geojson"
MANIFEST_FILE = "manifest.json"


class IoFailure(FitmapError):
    pass


class ChecksumMismatch(FitmapError):
    pass


class SnapshotMissing(FitmapError):
    pass


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


@dataclass(frozen=True)
class Manifest:
    years: tuple[int, ...]
    counties: tuple[str, ...]
    unmatched: tuple[str, ...]  # district codes of records with no boundary
    source_checksums: dict[str, str] = field(default_factory=dict)
    file_checksums: dict[str, str] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)

    def to_json(self) -> str:
        doc = {
            "years": list(self.years),
            "counties": list(self.counties),
            "unmatched": list(self.unmatched),
            "source_checksums": dict(sorted(self.source_checksums.items())),
            "file_checksums": dict(sorted(self.file_checksums.items())),
            "counts": dict(sorted(self.counts.items())),
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Manifest":
        doc = json.loads(text)
        return cls(
            years=tuple(doc["years"]),
            counties=tuple(doc["counties"]),
            unmatched=tuple(doc["unmatched"]),
            source_checksums=dict(doc.get("source_checksums", {})),
            file_checksums=dict(doc.get("file_checksums", {})),
            counts=dict(doc.get("counts", {})),
        )


@dataclass(frozen=True)
class Snapshot:
    """Queryable immutable database; safe for concurrent readers."""

    records: dict[tuple[str, int, int, str], FitnessRecord]
    sites: dict[str, SchoolSite]
    boundaries: dict[str, DistrictBoundary]
    manifest: Manifest

    @property
    def digest(self) -> str:
        joined = "|".join(
            self.manifest.file_checksums.get(name, "")
            for name in (RECORDS_FILE, SITES_FILE, BOUNDARIES_FILE)
        )
        return sha256_hex(joined.encode("ascii"))


def records_csv_bytes(records: list[FitnessRecord]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["entity", "level", "year", "grade", "assessment", "tested", "hfz", "ni", "ni_hr"])
    blank = lambda v: "" if v is None else v
    for record in sorted(records, key=lambda r: r.key):
        writer.writerow(
            [
                str(record.entity),
                record.level.value,
                record.school_year,
                int(record.grade),
                record.assessment.value,
                blank(record.counts.tested),
                blank(record.counts.hfz),
                blank(record.counts.needs_improvement),
                blank(record.counts.high_risk),
            ]
        )
    return buf.getvalue().encode("utf-8")


def sites_csv_bytes(sites: dict[str, SchoolSite]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["cdscode", "name", "address", "district_name", "county_name", "lon", "lat"])
    for key in sorted(sites):
        site = sites[key]
        writer.writerow(
            [key, site.name, site.address, site.district_name, site.county_name,
             repr(site.lon), repr(site.lat)]
        )
    return buf.getvalue().encode("utf-8")


def boundaries_geojson_bytes(boundaries: dict[str, DistrictBoundary]) -> bytes:
    features = []
    for key in sorted(boundaries):
        boundary = boundaries[key]
        features.append(
            {
                "type": "Feature",
                "properties": {
                    "CDSCode": key,
                    "DistrictName": boundary.district_name,
                    "CountyName": boundary.county_name,
                },
                "geometry": {
                    "type": "MultiPolygon",
                    "coordinates": [
                        [[list(point) for point in ring] for ring in polygon]
                        for polygon in boundary.polygons
                    ],
                },
            }
        )
    doc = {"type": "FeatureCollection", "features": features}
    return (json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8")


def build_snapshot(
    records: list[FitnessRecord],
    sites: dict[str, SchoolSite],
    boundaries: dict[str, DistrictBoundary],
    source_checksums: dict[str, str] | None = None,
) -> Snapshot:
    """Index everything, compute the manifest, and freeze the result.

    Records whose district has no boundary stay served (joins are by code)
    but are listed in manifest.unmatched.
    """
    indexed: dict[tuple[str, int, int, str], FitnessRecord] = {}
    for record in records:
        indexed[record.key] = record  # parse already deduped; last wins regardless

    years = tuple(sorted({record.school_year for record in indexed.values()}))
    counties = tuple(sorted({b.county_name for b in boundaries.values() if b.county_name}))
    unmatched = tuple(
        sorted(
            {
                str(district_of(record.entity))
                for record in indexed.values()
                if str(district_of(record.entity)) not in boundaries
            }
        )
    )
    record_list = list(indexed.values())
    file_checksums = {
        RECORDS_FILE: sha256_hex(records_csv_bytes(record_list)),
        SITES_FILE: sha256_hex(sites_csv_bytes(sites)),
        BOUNDARIES_FILE: sha256_hex(boundaries_geojson_bytes(boundaries)),
    }
    manifest = Manifest(
        years=years,
        counties=counties,
        unmatched=unmatched,
        source_checksums=dict(source_checksums or {}),
        file_checksums=file_checksums,
        counts={
            "records": len(indexed),
            "sites": len(sites),
            "boundaries": len(boundaries),
        },
    )
    return Snapshot(records=indexed, sites=dict(sites), boundaries=dict(boundaries), manifest=manifest)


def write_snapshot(snapshot: Snapshot, directory: str | Path) -> Path:
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        payloads = {
            RECORDS_FILE: records_csv_bytes(list(snapshot.records.values())),
            SITES_FILE: sites_csv_bytes(snapshot.sites),
            BOUNDARIES_FILE: boundaries_geojson_bytes(snapshot.boundaries),
        }
        for name, payload in payloads.items():
            expected = snapshot.manifest.file_checksums.get(name)
            actual = sha256_hex(payload)
            if expected is not None and expected != actual:
                raise ChecksumMismatch(
                    f"{name}: snapshot content does not match its manifest checksum"
                )
            (directory / name).write_bytes(payload)
        (directory / MANIFEST_FILE).write_text(snapshot.manifest.to_json(), encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"writing snapshot to {directory}: {exc}") from exc
    return directory


def read_snapshot(directory: str | Path) -> Snapshot:
    """Load and verify a snapshot directory; raises ChecksumMismatch on tampering."""
    directory = Path(directory)
    manifest_path = directory / MANIFEST_FILE
    if not manifest_path.is_file():
        raise SnapshotMissing(f"no snapshot manifest at {manifest_path}")
    try:
        manifest = Manifest.from_json(manifest_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise SnapshotMissing(f"unreadable manifest {manifest_path}: {exc}") from exc

    payloads: dict[str, bytes] = {}
    for name in (RECORDS_FILE, SITES_FILE, BOUNDARIES_FILE):
        path = directory / name
        try:
            payload = path.read_bytes()
        except OSError as exc:
            raise IoFailure(f"reading {path}: {exc}") from exc
        expected = manifest.file_checksums.get(name)
        if expected != sha256_hex(payload):
            raise ChecksumMismatch(f"{name}: checksum mismatch, snapshot corrupted")
        payloads[name] = payload

    result = parse_records(payloads[RECORDS_FILE], default_mapping(), source=RECORDS_FILE)
    fatal = [i for i in result.issues if i.kind is not IssueKind.SUPPRESSED_CELL]
    if fatal:
        raise IoFailure(f"{RECORDS_FILE}: canonical file has defects: {fatal[0].detail}")
    sites, site_issues = load_school_sites(payloads[SITES_FILE], source=SITES_FILE)
    if site_issues:
        raise IoFailure(f"{SITES_FILE}: canonical file has defects: {site_issues[0].detail}")
    boundaries, boundary_issues = load_boundaries(payloads[BOUNDARIES_FILE], source=BOUNDARIES_FILE)
    if boundary_issues:
        raise IoFailure(
            f"{BOUNDARIES_FILE}: canonical file has defects: {boundary_issues[0].detail}"
        )

    snapshot = build_snapshot(
        result.records, sites, boundaries, source_checksums=manifest.source_checksums
    )
    if snapshot.manifest != manifest:
        raise ChecksumMismatch("manifest does not match rebuilt snapshot contents")
    return snapshot
