"""Operator command line: ingest, serve, regress, convert-codes.

Exit codes are stable for scripting:
    0   success (ingest may still report data issues)
    2   unreadable or malformed inputs (files, snapshot, tables)
    3   ingest accepted zero usable records
    4   requested port is already in use
    5   regression cannot run (no overlap, rank deficient, too few rows)
    64  command line usage errors
"""

from __future__ import annotations

import argparse
import csv
import glob
import io
import logging
import socket
import sys
from pathlib import Path

from .custom import BadConversionTable, ConversionTable, LayerRegistry, load_conversion_table
from .ingest import (
    HeaderMissingMappedColumn,
    HeaderMissingSiteColumn,
    IngestIssue,
    MalformedGeoJson,
    MappingError,
    UnreadableStream,
    build_snapshot,
    default_mapping,
    load_boundaries,
    load_school_sites,
    parse_mapping,
    parse_records,
    read_snapshot,
    sha256_hex,
    summarize,
    write_snapshot,
)
from .ingest.snapshot import ChecksumMismatch, IoFailure, SnapshotMissing
from .model import FitnessRecord, parse_assessment, parse_grade
from .stats import (
    BadCovariates,
    NoOverlap,
    RankDeficient,
    TooFewRows,
    load_covariates,
    report_text,
    run_case_study,
    write_report_files,
)

USAGE_EXIT = 64
DEFAULT_PORT = 3000


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fitmap", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ingest = commands.add_parser("ingest", help="parse sources and write a snapshot")
    ingest.add_argument("--records", required=True, help="glob of fitness record CSVs")
    ingest.add_argument("--mapping", help="column mapping file (default: canonical long form)")
    ingest.add_argument("--sites", required=True, help="school site CSV")
    ingest.add_argument("--boundaries", required=True, help="district boundary GeoJSON")
    ingest.add_argument("--out", required=True, help="snapshot directory to create")

    serve = commands.add_parser("serve", help="serve the HTTP API from a snapshot")
    serve.add_argument("--snapshot", required=True, help="snapshot directory")
    serve.add_argument("--port", type=int, default=DEFAULT_PORT)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--uploads", default="uploads", help="custom layer directory")
    serve.add_argument("--crosswalk", help="LEAID/CDS conversion CSV")
    serve.add_argument("--static-dir", help="directory of web UI files to serve at /")
    serve.add_argument("--cors-origin", action="append", default=[],
                       help="origin to allow via CORS (repeatable)")

    regress = commands.add_parser("regress", help="run the district regression")
    regress.add_argument("--snapshot", required=True)
    regress.add_argument("--covariates", required=True, help="district covariate CSV")
    regress.add_argument("--dep", required=True, help="dependent assessment name")
    regress.add_argument("--year", required=True, type=int)
    regress.add_argument("--grade", required=True)
    regress.add_argument("--out", required=True, help="output path prefix")
    regress.add_argument("--crosswalk", help="LEAID/CDS conversion CSV")

    convert = commands.add_parser("convert-codes", help="rewrite a code column via the crosswalk")
    convert.add_argument("--table", required=True, help="conversion CSV (leaid, cdscode)")
    convert.add_argument("--input", required=True, help="CSV whose code column to rewrite")
    convert.add_argument("--from", dest="from_kind", required=True,
                         choices=["leaid", "cdscode"])
    convert.add_argument("--to", dest="to_kind", required=True,
                         choices=["leaid", "cdscode"])
    convert.add_argument("--out", help="output CSV path (default: stdout)")
    return parser


def _fail(code: int, message: str) -> int:
    print(f"fitmap: {message}", file=sys.stderr)
    return code


def _read_bytes(path: str) -> bytes:
    return Path(path).read_bytes()


def _load_crosswalk(path: str | None) -> ConversionTable | None:
    if path is None:
        return None
    return load_conversion_table(_read_bytes(path), source=path)


def run_ingest(args: argparse.Namespace) -> int:
    paths = sorted(glob.glob(args.records))
    if not paths:
        return _fail(2, f"no files match --records {args.records!r}")
    try:
        mapping = (
            parse_mapping(Path(args.mapping).read_text(encoding="utf-8"))
            if args.mapping
            else default_mapping()
        )
        checksums: dict[str, str] = {}
        merged: dict[tuple, FitnessRecord] = {}
        issues: list[IngestIssue] = []
        cross_file_dupes = 0
        rows_total = 0
        for path in paths:
            data = _read_bytes(path)
            checksums[Path(path).name] = sha256_hex(data)
            result = parse_records(data, mapping, source=Path(path).name)
            rows_total += result.stats.rows_total
            issues.extend(result.issues)
            for record in result.records:
                if record.key in merged:
                    cross_file_dupes += 1
                merged[record.key] = record

        sites_data = _read_bytes(args.sites)
        checksums[Path(args.sites).name] = sha256_hex(sites_data)
        sites, site_issues = load_school_sites(sites_data, source=Path(args.sites).name)
        issues.extend(site_issues)

        boundary_data = _read_bytes(args.boundaries)
        checksums[Path(args.boundaries).name] = sha256_hex(boundary_data)
        boundaries, boundary_issues = load_boundaries(
            boundary_data, source=Path(args.boundaries).name
        )
        issues.extend(boundary_issues)
    except OSError as exc:
        return _fail(2, f"cannot read input: {exc}")
    except (MappingError, UnreadableStream, HeaderMissingMappedColumn,
            HeaderMissingSiteColumn, MalformedGeoJson) as exc:
        return _fail(2, str(exc))

    records = list(merged.values())
    usable = [r for r in records if r.pct_hfz is not None]
    if not usable:
        detail = "no records parsed" if not records else "every record is fully suppressed"
        return _fail(3, f"zero accepted records: {detail}")

    snapshot = build_snapshot(records, sites, boundaries, source_checksums=checksums)
    try:
        write_snapshot(snapshot, args.out)
    except (IoFailure, ChecksumMismatch) as exc:
        return _fail(2, str(exc))

    counts = summarize(issues)
    if cross_file_dupes:
        counts["DuplicateKey"] = counts.get("DuplicateKey", 0) + cross_file_dupes
    print(f"rows read: {rows_total} from {len(paths)} file(s)")
    print(f"records accepted: {len(records)} ({len(usable)} with a reportable percentage)")
    print(f"sites: {len(sites)}, boundaries: {len(boundaries)}")
    summary = " ".join(f"{kind}={n}" for kind, n in sorted(counts.items())) or "none"
    print(f"issues: {summary}")
    if snapshot.manifest.unmatched:
        print(f"district codes without a boundary: {len(snapshot.manifest.unmatched)}")
    print(f"snapshot written to {args.out}")
    return 0


def run_serve(args: argparse.Namespace) -> int:
    from .server import create_app  # deferred: keeps --help fast

    try:
        snapshot = read_snapshot(args.snapshot)
    except (SnapshotMissing, ChecksumMismatch, IoFailure) as exc:
        return _fail(2, str(exc))
    try:
        conversion = _load_crosswalk(args.crosswalk)
    except OSError as exc:
        return _fail(2, f"cannot read crosswalk: {exc}")
    except BadConversionTable as exc:
        return _fail(2, str(exc))

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((args.host, args.port))
    except OSError as exc:
        return _fail(4, f"cannot bind {args.host}:{args.port}: {exc}")
    finally:
        probe.close()

    logging.basicConfig(
        level=logging.INFO, stream=sys.stderr, format="%(asctime)s %(name)s %(message)s"
    )
    registry = LayerRegistry(args.uploads)
    app = create_app(
        snapshot,
        registry,
        conversion=conversion,
        static_dir=args.static_dir,
        cors_origins=args.cors_origin or None,
    )
    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_config=None, access_log=False)
    return 0


def run_regress(args: argparse.Namespace) -> int:
    try:
        snapshot = read_snapshot(args.snapshot)
    except (SnapshotMissing, ChecksumMismatch, IoFailure) as exc:
        return _fail(2, str(exc))
    try:
        dep = parse_assessment(args.dep)
        grade = parse_grade(args.grade)
    except ValueError as exc:
        return _fail(USAGE_EXIT, str(exc))
    try:
        conversion = _load_crosswalk(args.crosswalk)
        covariates = load_covariates(
            _read_bytes(args.covariates), conversion=conversion, source=args.covariates
        )
    except OSError as exc:
        return _fail(2, f"cannot read covariates: {exc}")
    except (BadConversionTable, BadCovariates) as exc:
        return _fail(2, str(exc))

    try:
        report = run_case_study(snapshot, covariates, dep, args.year, grade)
    except (NoOverlap, RankDeficient, TooFewRows) as exc:
        return _fail(5, str(exc))

    written = write_report_files(report, args.out)
    print(report_text(report))
    for path in written:
        print(f"wrote {path}")
    return 0


def run_convert(args: argparse.Namespace) -> int:
    if args.from_kind == args.to_kind:
        return _fail(USAGE_EXIT, "--from and --to must differ")
    try:
        table = load_conversion_table(_read_bytes(args.table), source=args.table)
        text = _read_bytes(args.input).decode("utf-8-sig")
    except OSError as exc:
        return _fail(2, f"cannot read input: {exc}")
    except (BadConversionTable, UnicodeDecodeError) as exc:
        return _fail(2, str(exc))

    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader]
    if not rows:
        return _fail(2, f"{args.input}: empty file")
    header = [cell.strip().lower() for cell in rows[0]]
    if args.from_kind not in header:
        return _fail(2, f"{args.input}: no {args.from_kind!r} column in the header")
    at = header.index(args.from_kind)

    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    new_header = list(rows[0])
    new_header[at] = args.to_kind
    writer.writerow(new_header)
    unmatched = 0
    for row in rows[1:]:
        if not any(cell.strip() for cell in row):
            continue
        code = row[at].strip() if at < len(row) else ""
        if args.to_kind == "cdscode":
            mapped = table.to_cds(code)
        else:
            mapped = table.to_leaid(code)
        if mapped is None:
            unmatched += 1
            replacement = ""
        else:
            replacement = str(mapped)
        new_row = list(row)
        while len(new_row) <= at:
            new_row.append("")
        new_row[at] = replacement
        writer.writerow(new_row)

    if args.out:
        Path(args.out).write_text(out.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(out.getvalue())
    if unmatched:
        print(f"warning: {unmatched} row(s) had no match and got an empty code",
              file=sys.stderr)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    runners = {
        "ingest": run_ingest,
        "serve": run_serve,
        "regress": run_regress,
        "convert-codes": run_convert,
    }
    return runners[args.command](args)


def entrypoint() -> None:
    sys.exit(main())
