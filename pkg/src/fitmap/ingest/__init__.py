"""Parsing of source tables and the immutable snapshot store."""

from .boundaries import DistrictBoundary, MalformedGeoJson, load_boundaries
from .issues import IngestIssue, IssueKind, summarize
from .mapping import ColumnMapping, MappingError, default_mapping, parse_mapping
from .records import (
    HeaderMissingMappedColumn,
    ParseResult,
    ParseStats,
    UnreadableStream,
    explode_by_assessment,
    parse_records,
)
from .sites import HeaderMissingSiteColumn, SchoolSite, clean_text, load_school_sites
from .snapshot import (
    BOUNDARIES_FILE,
    MANIFEST_FILE,
    RECORDS_FILE,
    SITES_FILE,
    ChecksumMismatch,
    IoFailure,
    Manifest,
    Snapshot,
    SnapshotMissing,
    build_snapshot,
    read_snapshot,
    sha256_hex,
    write_snapshot,
)

__all__ = [
    "BOUNDARIES_FILE",
    "MANIFEST_FILE",
    "RECORDS_FILE",
    "SITES_FILE",
    "ChecksumMismatch",
    "ColumnMapping",
    "DistrictBoundary",
    "HeaderMissingMappedColumn",
    "HeaderMissingSiteColumn",
    "IngestIssue",
    "IoFailure",
    "IssueKind",
    "MalformedGeoJson",
    "Manifest",
    "MappingError",
    "ParseResult",
    "ParseStats",
    "SchoolSite",
    "Snapshot",
    "SnapshotMissing",
    "UnreadableStream",
    "build_snapshot",
    "clean_text",
    "default_mapping",
    "explode_by_assessment",
    "load_boundaries",
    "load_school_sites",
    "parse_mapping",
    "parse_records",
    "read_snapshot",
    "sha256_hex",
    "summarize",
    "write_snapshot",
]
