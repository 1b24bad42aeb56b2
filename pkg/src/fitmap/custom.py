"""User-uploaded district layers: validation, parsing, joining, registry.

The upload contract: one CSV at a time, at most 10 MiB, with a "data" value
column and either a "cdscode" or "leaid" code column (cdscode preferred when
both are present). LEAID codes are converted through a crosswalk table.
Joined layers live in a directory-backed registry that survives restarts.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .errors import FitmapError
from .model import CdsCode, district_of, parse_cdscode, parse_leaid

MAX_UPLOAD_BYTES = 10 * 2**20
CSV_EXTENSIONS = (".csv",)
EXCEL_EXTENSIONS = (".xlsx", ".xls")

TOO_LARGE = "TooLarge"
BAD_EXTENSION = "BadExtension"
MISSING_DATA_COLUMN = "MissingDataColumn"
MISSING_CODE_COLUMN = "MissingCodeColumn"
EMPTY_FILE = "EmptyFile"
DUPLICATE_LAYER_NAME = "DuplicateLayerName"

KIND_CDS = "cds"
KIND_LEAID = "leaid"


class UploadError(FitmapError):
    """Rejected upload; ``kind`` is the machine code the API returns."""

    def __init__(self, kind: str, detail: str):
        super().__init__(detail)
        self.kind = kind
        self.detail = detail

    @property
    def code(self) -> str:
        return self.kind


class BadConversionTable(FitmapError):
    pass


def validate_upload(
    filename: str, size_bytes: int, layer_name: str, existing_names
) -> None:
    """Gate an upload before its body is parsed; raises UploadError."""
    if not layer_name or not layer_name.strip():
        raise UploadError(EMPTY_FILE, "layer name must not be empty")
    if layer_name in set(existing_names):
        raise UploadError(
            DUPLICATE_LAYER_NAME, f"a layer named {layer_name!r} already exists"
        )
    suffix = Path(filename).suffix.lower()
    if suffix in EXCEL_EXTENSIONS:
        raise UploadError(
            BAD_EXTENSION,
            f"{suffix} is not supported in this build; convert the file to CSV",
        )
    if suffix not in CSV_EXTENSIONS:
        raise UploadError(BAD_EXTENSION, f"expected a .csv file, got {filename!r}")
    if size_bytes > MAX_UPLOAD_BYTES:
        raise UploadError(
            TOO_LARGE,
            f"file is {size_bytes} bytes; the maximum allowed is {MAX_UPLOAD_BYTES}",
        )
    if size_bytes == 0:
        raise UploadError(EMPTY_FILE, "uploaded file is empty")


@dataclass(frozen=True)
class ParsedTable:
    code_kind: str  # KIND_CDS or KIND_LEAID
    rows: tuple[tuple[str, float], ...]  # (code text, value)
    skipped_non_numeric: int


def parse_custom_table(data: bytes) -> ParsedTable:
    """Extract (code, value) rows from an uploaded CSV.

    The value column is "data" and the code column is "cdscode", falling
    back to "leaid", all matched case-insensitively. Extra columns are
    ignored; rows whose value cell is not a finite number are skipped and
    counted.
    """
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise UploadError(EMPTY_FILE, f"file is not UTF-8 text: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    header = next((row for row in reader if any(cell.strip() for cell in row)), None)
    if header is None:
        raise UploadError(EMPTY_FILE, "uploaded file has no header row")
    lowered = [cell.strip().lower() for cell in header]
    if "data" not in lowered:
        raise UploadError(MISSING_DATA_COLUMN, 'no "data" column in the header')
    value_at = lowered.index("data")
    if "cdscode" in lowered:
        code_kind, code_at = KIND_CDS, lowered.index("cdscode")
    elif "leaid" in lowered:
        code_kind, code_at = KIND_LEAID, lowered.index("leaid")
    else:
        raise UploadError(
            MISSING_CODE_COLUMN, 'no "cdscode" or "leaid" column in the header'
        )

    rows: list[tuple[str, float]] = []
    skipped = 0
    for row in reader:
        if not any(cell.strip() for cell in row):
            continue
        code = row[code_at].strip() if code_at < len(row) else ""
        cell = row[value_at].strip() if value_at < len(row) else ""
        try:
            value = float(cell)
        except (FitmapError, ValueError):
            skipped += 1
            continue
        if not math.isfinite(value):
            skipped += 1
            continue
        rows.append((code, value))
    return ParsedTable(code_kind=code_kind, rows=tuple(rows), skipped_non_numeric=skipped)


class ConversionTable:
    """Bidirectional LEAID <-> district CDS code crosswalk."""

    def __init__(self, pairs: list[tuple[str, CdsCode]]):
        self.cds_by_leaid: dict[str, CdsCode] = {}
        self.leaid_by_cds: dict[str, str] = {}
        for leaid, cds in pairs:
            cds = district_of(cds)
            seen = self.cds_by_leaid.get(leaid)
            if seen is not None and seen != cds:
                raise BadConversionTable(f"leaid {leaid} maps to both {seen} and {cds}")
            back = self.leaid_by_cds.get(str(cds))
            if back is not None and back != leaid:
                raise BadConversionTable(f"cds {cds} maps to both {back} and {leaid}")
            self.cds_by_leaid[leaid] = cds
            self.leaid_by_cds[str(cds)] = leaid

    def __len__(self) -> int:
        return len(self.cds_by_leaid)

    def to_cds(self, leaid: str) -> CdsCode | None:
        return self.cds_by_leaid.get(leaid)

    def to_leaid(self, cds: str | CdsCode) -> str | None:
        try:
            key = str(district_of(parse_cdscode(str(cds))))
        except (FitmapError, ValueError):
            return None
        return self.leaid_by_cds.get(key)


def load_conversion_table(data: bytes, source: str = "<table>") -> ConversionTable:
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise BadConversionTable(f"{source} is not UTF-8 text: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    header = next((row for row in reader if any(cell.strip() for cell in row)), None)
    if header is None:
        raise BadConversionTable(f"{source}: no header row")
    lowered = [cell.strip().lower() for cell in header]
    if "leaid" not in lowered or "cdscode" not in lowered:
        raise BadConversionTable(f"{source}: header must have leaid and cdscode columns")
    leaid_at, cds_at = lowered.index("leaid"), lowered.index("cdscode")
    pairs: list[tuple[str, CdsCode]] = []
    for line, row in enumerate(reader, start=2):
        if not any(cell.strip() for cell in row):
            continue
        try:
            leaid = parse_leaid(row[leaid_at].strip())
            cds = parse_cdscode(row[cds_at].strip())
        except (FitmapError, ValueError, IndexError) as exc:
            raise BadConversionTable(f"{source} line {line}: {exc}") from exc
        pairs.append((str(leaid), cds))
    return ConversionTable(pairs)


def to_cds(table: ConversionTable | None, code_kind: str, code_text: str) -> CdsCode | None:
    """Resolve one uploaded row's code to a district CDS code, or None.

    CDS rows never consult the table; LEAID rows are looked up. Malformed
    or unknown codes come back as None and land in unmatched_codes.
    """
    if code_kind == KIND_CDS:
        try:
            return district_of(parse_cdscode(code_text))
        except (FitmapError, ValueError):
            return None
    if table is None:
        return None
    try:
        leaid = parse_leaid(code_text)
    except (FitmapError, ValueError):
        return None
    return table.to_cds(str(leaid))


@dataclass(frozen=True)
class JoinStats:
    matched: int
    unmatched_codes: tuple[str, ...]
    duplicate_rows: int

    def to_json(self) -> dict:
        return {
            "matched": self.matched,
            "unmatched_codes": list(self.unmatched_codes),
            "duplicate_rows": self.duplicate_rows,
        }


@dataclass(frozen=True)
class CustomLayer:
    name: str
    values: dict[str, float]  # district code text -> value
    created_at: str  # ISO-8601 UTC
    join_stats: JoinStats
    skipped_non_numeric: int = 0


def build_layer(
    name: str,
    table: ParsedTable,
    conversion: ConversionTable | None,
    boundaries: dict,
) -> CustomLayer:
    """Join parsed rows onto the known district boundaries.

    Every usable row is accounted exactly once: first occurrence of a
    boundary-matched code counts as matched (later repeats overwrite the
    value and count as duplicates), codes with no boundary collect in
    unmatched_codes (repeats there count as duplicates too).
    """
    if not table.rows:
        raise UploadError(EMPTY_FILE, "no usable data rows in the upload")
    values: dict[str, float] = {}
    unmatched: dict[str, None] = {}
    duplicates = 0
    for code_text, value in table.rows:
        cds = to_cds(conversion, table.code_kind, code_text)
        if cds is not None and str(cds) in boundaries:
            key = str(cds)
            if key in values:
                duplicates += 1
            values[key] = value  # last row wins
        else:
            if code_text in unmatched:
                duplicates += 1
            unmatched[code_text] = None
    if not values:
        raise UploadError(
            EMPTY_FILE,
            f"no rows matched a known district ({len(unmatched)} unmatched codes)",
        )
    stats = JoinStats(
        matched=len(values),
        unmatched_codes=tuple(sorted(unmatched)),
        duplicate_rows=duplicates,
    )
    return CustomLayer(
        name=name,
        values=values,
        created_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        join_stats=stats,
        skipped_non_numeric=table.skipped_non_numeric,
    )


INDEX_FILE = "index.json"


def _layer_csv_bytes(layer: CustomLayer) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["cdscode", "value"])
    for code in sorted(layer.values):
        writer.writerow([code, repr(layer.values[code])])
    return buf.getvalue().encode("utf-8")


class LayerRegistry:
    """Named custom layers, persisted one CSV per layer plus an index.

    Mutations hold a single writer lock and replace the layer map wholesale,
    so concurrent readers always observe a complete registry; a layer being
    built is invisible until committed.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._layers: dict[str, CustomLayer] = {}
        self._load()

    @staticmethod
    def _file_of(name: str) -> str:
        return hashlib.sha256(name.encode("utf-8")).hexdigest()[:16] + ".csv"

    def _load(self) -> None:
        index_path = self.directory / INDEX_FILE
        if not index_path.is_file():
            self._write_index({})
            return
        index = json.loads(index_path.read_text(encoding="utf-8"))
        layers: dict[str, CustomLayer] = {}
        for name, meta in index.items():
            path = self.directory / meta["file"]
            values: dict[str, float] = {}
            with path.open(newline="", encoding="utf-8") as handle:
                for row in csv.DictReader(handle):
                    values[row["cdscode"]] = float(row["value"])
            stats = JoinStats(
                matched=meta["join_stats"]["matched"],
                unmatched_codes=tuple(meta["join_stats"]["unmatched_codes"]),
                duplicate_rows=meta["join_stats"]["duplicate_rows"],
            )
            layers[name] = CustomLayer(
                name=name,
                values=values,
                created_at=meta["created_at"],
                join_stats=stats,
                skipped_non_numeric=meta.get("skipped_non_numeric", 0),
            )
        self._layers = layers

    def _write_index(self, layers: dict[str, CustomLayer]) -> None:
        index = {
            name: {
                "file": self._file_of(name),
                "created_at": layer.created_at,
                "join_stats": layer.join_stats.to_json(),
                "skipped_non_numeric": layer.skipped_non_numeric,
            }
            for name, layer in sorted(layers.items())
        }
        payload = json.dumps(index, indent=2, sort_keys=True) + "\n"
        tmp = self.directory / (INDEX_FILE + ".tmp")
        tmp.write_text(payload, encoding="utf-8")
        tmp.replace(self.directory / INDEX_FILE)

    @property
    def digest(self) -> str:
        layers = self._layers
        raw = json.dumps(
            {name: layer.created_at for name, layer in sorted(layers.items())},
            sort_keys=True,
        )
        return hashlib.sha256(raw.encode("utf-8")).hexdigest()

    def names(self) -> list[str]:
        return sorted(self._layers)

    def get(self, name: str) -> CustomLayer | None:
        return self._layers.get(name)

    def add(self, layer: CustomLayer) -> None:
        with self._lock:
            if layer.name in self._layers:
                raise UploadError(
                    DUPLICATE_LAYER_NAME, f"a layer named {layer.name!r} already exists"
                )
            (self.directory / self._file_of(layer.name)).write_bytes(_layer_csv_bytes(layer))
            updated = dict(self._layers)
            updated[layer.name] = layer
            self._write_index(updated)
            self._layers = updated  # atomic swap: readers see old or new, never partial

    def delete(self, name: str) -> bool:
        with self._lock:
            if name not in self._layers:
                return False
            updated = dict(self._layers)
            del updated[name]
            self._write_index(updated)
            path = self.directory / self._file_of(name)
            if path.exists():
                path.unlink()
            self._layers = updated
            return True
