"""Command-line behavior, exit codes, and one real served process."""

import socket
import subprocess
import sys
import time

import httpx
import numpy as np
import pytest

from conftest import (
    DISTRICT_A,
    LEAID_A,
    SCHOOL_A1,
    WIDE_HEADER,
    WIDE_MAPPING_TEXT,
    boundaries_geojson_bytes,
    crosswalk_csv_bytes,
    sites_csv_bytes,
    wide_row,
)
from fitmap.cli import DEFAULT_PORT, USAGE_EXIT, main
from fitmap.ingest import read_snapshot, write_snapshot, build_snapshot
from fitmap.model import (
    Assessment,
    FitnessRecord,
    Grade,
    ZoneCounts,
    level_of,
    parse_cdscode,
)
from fitmap.stats import DEFAULT_PREDICTORS


def exit_code(argv):
    """Run main, folding argparse SystemExit into the return code."""
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code


def write_sources(tmp_path, rows=None):
    rows = rows if rows is not None else [
        wide_row(SCHOOL_A1), wide_row(DISTRICT_A),
    ]
    records = tmp_path / "records.csv"
    records.write_text("\n".join([WIDE_HEADER, *rows]) + "\n")
    mapping = tmp_path / "mapping.txt"
    mapping.write_text(WIDE_MAPPING_TEXT)
    sites = tmp_path / "sites.csv"
    sites.write_bytes(sites_csv_bytes())
    boundaries = tmp_path / "boundaries.geojson"
    boundaries.write_bytes(boundaries_geojson_bytes())
    return records, mapping, sites, boundaries


def ingest_args(records, mapping, sites, boundaries, out):
    return [
        "ingest",
        "--records", str(records),
        "--mapping", str(mapping),
        "--sites", str(sites),
        "--boundaries", str(boundaries),
        "--out", str(out),
    ]


def free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def test_help_exits_zero(capsys):
    assert exit_code(["--help"]) == 0
    assert "ingest" in capsys.readouterr().out


def test_usage_errors_exit_64(capsys):
    assert exit_code([]) == USAGE_EXIT
    assert exit_code(["frobnicate"]) == USAGE_EXIT
    assert exit_code(["ingest", "--bogus-flag", "x"]) == USAGE_EXIT
    assert exit_code(["regress", "--snapshot", "s"]) == USAGE_EXIT  # missing args
    assert exit_code(["convert-codes", "--table", "t", "--input", "i",
                      "--from", "leaid", "--to", "street"]) == USAGE_EXIT


def test_default_port_is_3000():
    assert DEFAULT_PORT == 3000


class TestIngest:
    def test_end_to_end(self, tmp_path, capsys):
        out = tmp_path / "snap"
        rc = main(ingest_args(*write_sources(tmp_path), out))
        assert rc == 0
        printed = capsys.readouterr().out
        assert "rows read: 2 from 1 file(s)" in printed
        assert "records accepted: 12" in printed
        assert "sites: 4, boundaries: 3" in printed
        assert "issues: none" in printed
        assert f"snapshot written to {out}" in printed

        snapshot = read_snapshot(out)
        assert len(snapshot.records) == 12
        assert "records.csv" in snapshot.manifest.source_checksums

    def test_glob_merges_files_last_wins(self, tmp_path, capsys):
        records, mapping, sites, boundaries = write_sources(tmp_path)
        second = tmp_path / "records2.csv"
        second.write_text(
            "\n".join([WIDE_HEADER,
                       wide_row(SCHOOL_A1, counts=[("10", "1")] * 6)]) + "\n"
        )
        out = tmp_path / "snap"
        rc = main(ingest_args(tmp_path / "records*.csv", mapping, sites,
                              boundaries, out))
        assert rc == 0
        printed = capsys.readouterr().out
        assert "rows read: 3 from 2 file(s)" in printed
        assert "DuplicateKey=6" in printed
        snapshot = read_snapshot(out)
        key = (SCHOOL_A1, 2019, 5, Assessment.AEROBIC_CAPACITY.value)
        assert snapshot.records[key].counts.tested == 10

    def test_no_matching_files_is_2(self, tmp_path, capsys):
        records, mapping, sites, boundaries = write_sources(tmp_path)
        rc = main(ingest_args(tmp_path / "absent*.csv", mapping, sites,
                              boundaries, tmp_path / "snap"))
        assert rc == 2
        assert "no files match" in capsys.readouterr().err

    def test_bad_mapping_is_2(self, tmp_path, capsys):
        records, mapping, sites, boundaries = write_sources(tmp_path)
        mapping.write_text("layout = sideways\n")
        rc = main(ingest_args(records, mapping, sites, boundaries,
                              tmp_path / "snap"))
        assert rc == 2

    def test_malformed_boundaries_is_2(self, tmp_path):
        records, mapping, sites, boundaries = write_sources(tmp_path)
        boundaries.write_text("{")
        rc = main(ingest_args(records, mapping, sites, boundaries,
                              tmp_path / "snap"))
        assert rc == 2

    def test_all_suppressed_is_3(self, tmp_path, capsys):
        rows = [wide_row(SCHOOL_A1, counts=[("*", "*")] * 6)]
        rc = main(ingest_args(*write_sources(tmp_path, rows=rows),
                              tmp_path / "snap"))
        assert rc == 3
        assert "fully suppressed" in capsys.readouterr().err

    def test_nothing_parsed_is_3(self, tmp_path, capsys):
        bad = wide_row(SCHOOL_A1).split(",")
        bad[2] = "junk"
        rc = main(ingest_args(*write_sources(tmp_path, rows=[",".join(bad)]),
                              tmp_path / "snap"))
        assert rc == 3
        assert "no records parsed" in capsys.readouterr().err


def regression_world(tmp_path, n=40, seed=11):
    """Snapshot plus covariate CSV with a planted linear relationship."""
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1.0, 1.0, size=(n, len(DEFAULT_PREDICTORS)))
    pcts = 55.0 + X @ np.array([4.0, -2.0, 1.0, 0.5, 3.0])
    records = []
    lines = ["cdscode," + ",".join(DEFAULT_PREDICTORS)]
    for i in range(n):
        code = f"10{i:05d}0000000"
        entity = parse_cdscode(code)
        records.append(FitnessRecord(
            entity=entity,
            level=level_of(entity),
            school_year=2019,
            grade=Grade.FIFTH,
            assessment=Assessment.AEROBIC_CAPACITY,
            counts=ZoneCounts(tested=1_000_000, hfz=round(pcts[i] * 10_000)),
        ))
        cells = ",".join(repr(float(v)) for v in X[i])
        lines.append(f"{code},{cells}")
    snap_dir = tmp_path / "rsnap"
    write_snapshot(build_snapshot(records, {}, {}), snap_dir)
    covariates = tmp_path / "covariates.csv"
    covariates.write_text("\n".join(lines) + "\n")
    return snap_dir, covariates


class TestRegress:
    def args(self, snap, cov, out, dep="aerobic_capacity", year="2019",
             grade="5"):
        return ["regress", "--snapshot", str(snap), "--covariates", str(cov),
                "--dep", dep, "--year", year, "--grade", grade,
                "--out", str(out)]

    def test_end_to_end_writes_tables_and_figures(self, tmp_path, capsys):
        snap, cov = regression_world(tmp_path)
        out = tmp_path / "reports" / "model"
        rc = main(self.args(snap, cov, out))
        assert rc == 0
        printed = capsys.readouterr().out
        assert "R^2 = " in printed
        assert "income_10k" in printed
        for suffix in (".csv", ".txt", "-residuals.csv", "-residuals.png",
                       "-coefficients.png"):
            path = out.parent / ("model" + suffix)
            assert path.is_file(), suffix
            assert f"wrote {path}" in printed

    def test_no_overlap_is_5(self, tmp_path, capsys):
        snap, cov = regression_world(tmp_path)
        rc = main(self.args(snap, cov, tmp_path / "m", year="2001"))
        assert rc == 5
        assert "2001" in capsys.readouterr().err

    def test_bad_dep_or_grade_is_64(self, tmp_path):
        snap, cov = regression_world(tmp_path)
        assert main(self.args(snap, cov, tmp_path / "m",
                              dep="situps")) == USAGE_EXIT
        assert main(self.args(snap, cov, tmp_path / "m",
                              grade="6")) == USAGE_EXIT

    def test_missing_snapshot_is_2(self, tmp_path):
        snap, cov = regression_world(tmp_path)
        assert main(self.args(tmp_path / "nowhere", cov, tmp_path / "m")) == 2

    def test_corrupt_snapshot_is_2(self, tmp_path):
        snap, cov = regression_world(tmp_path)
        records = snap / "records.csv"
        records.write_bytes(records.read_bytes() + b"tamper\n")
        assert main(self.args(snap, cov, tmp_path / "m")) == 2

    def test_bad_covariates_is_2(self, tmp_path, capsys):
        snap, cov = regression_world(tmp_path)
        cov.write_text("cdscode,unrelated\nx,1\n")
        assert main(self.args(snap, cov, tmp_path / "m")) == 2


class TestConvertCodes:
    def setup_files(self, tmp_path, body):
        table = tmp_path / "crosswalk.csv"
        table.write_bytes(crosswalk_csv_bytes())
        source = tmp_path / "input.csv"
        source.write_text(body)
        return table, source

    def test_leaid_to_cdscode(self, tmp_path, capsys):
        table, source = self.setup_files(
            tmp_path, f"leaid,score\n{LEAID_A},12\n"
        )
        rc = main(["convert-codes", "--table", str(table), "--input",
                   str(source), "--from", "leaid", "--to", "cdscode"])
        assert rc == 0
        out = capsys.readouterr().out
        assert out.splitlines() == ["cdscode,score", f"{DISTRICT_A},12"]

    def test_cdscode_to_leaid_with_school_folding(self, tmp_path, capsys):
        table, source = self.setup_files(
            tmp_path, f"cdscode,score\n{SCHOOL_A1},9\n"
        )
        out_path = tmp_path / "converted.csv"
        rc = main(["convert-codes", "--table", str(table), "--input",
                   str(source), "--from", "cdscode", "--to", "leaid",
                   "--out", str(out_path)])
        assert rc == 0
        assert out_path.read_text().splitlines() == [
            "leaid,score", f"{LEAID_A},9",
        ]

    def test_unmatched_rows_warn_and_blank(self, tmp_path, capsys):
        table, source = self.setup_files(
            tmp_path, f"leaid,score\n9999999,1\n{LEAID_A},2\n"
        )
        rc = main(["convert-codes", "--table", str(table), "--input",
                   str(source), "--from", "leaid", "--to", "cdscode"])
        assert rc == 0
        captured = capsys.readouterr()
        assert captured.out.splitlines()[1] == ",1"
        assert "1 row(s) had no match" in captured.err

    def test_same_direction_is_64(self, tmp_path):
        table, source = self.setup_files(tmp_path, "leaid,score\n")
        rc = main(["convert-codes", "--table", str(table), "--input",
                   str(source), "--from", "leaid", "--to", "leaid"])
        assert rc == USAGE_EXIT

    def test_unreadable_table_is_2(self, tmp_path):
        source = tmp_path / "input.csv"
        source.write_text("leaid\n")
        rc = main(["convert-codes", "--table", str(tmp_path / "nope.csv"),
                   "--input", str(source), "--from", "leaid",
                   "--to", "cdscode"])
        assert rc == 2

    def test_missing_code_column_is_2(self, tmp_path, capsys):
        table, source = self.setup_files(tmp_path, "name,score\nx,1\n")
        rc = main(["convert-codes", "--table", str(table), "--input",
                   str(source), "--from", "leaid", "--to", "cdscode"])
        assert rc == 2
        assert "no 'leaid' column" in capsys.readouterr().err


class TestServe:
    def test_missing_snapshot_is_2(self, tmp_path):
        rc = main(["serve", "--snapshot", str(tmp_path / "absent"),
                   "--uploads", str(tmp_path / "up")])
        assert rc == 2

    def test_corrupt_snapshot_is_2(self, tmp_path, sample_snapshot):
        target = tmp_path / "snap"
        write_snapshot(sample_snapshot, target)
        sites = target / "sites.csv"
        sites.write_bytes(sites.read_bytes().replace(b"Bay View", b"Altered"))
        rc = main(["serve", "--snapshot", str(target),
                   "--uploads", str(tmp_path / "up")])
        assert rc == 2

    def test_bad_crosswalk_is_2(self, tmp_path, snapshot_dir):
        crosswalk = tmp_path / "cross.csv"
        crosswalk.write_text("nope\n")
        rc = main(["serve", "--snapshot", str(snapshot_dir),
                   "--uploads", str(tmp_path / "up"),
                   "--crosswalk", str(crosswalk)])
        assert rc == 2

    def test_busy_port_is_4(self, tmp_path, snapshot_dir, capsys):
        blocker = socket.socket()
        try:
            blocker.bind(("127.0.0.1", 0))
            blocker.listen(1)
            port = blocker.getsockname()[1]
            rc = main(["serve", "--snapshot", str(snapshot_dir),
                       "--port", str(port),
                       "--uploads", str(tmp_path / "up")])
        finally:
            blocker.close()
        assert rc == 4
        assert "cannot bind" in capsys.readouterr().err

    def test_serves_real_http(self, tmp_path, snapshot_dir):
        port = free_port()
        proc = subprocess.Popen(
            [sys.executable, "-m", "fitmap", "serve",
             "--snapshot", str(snapshot_dir),
             "--port", str(port),
             "--uploads", str(tmp_path / "uploads")],
            stdout=subprocess.DEVNULL,
            stderr=subprocess.DEVNULL,
        )
        base = f"http://127.0.0.1:{port}"
        try:
            body = None
            deadline = time.monotonic() + 20.0
            while time.monotonic() < deadline:
                try:
                    got = httpx.get(f"{base}/api/meta", timeout=1.0)
                    if got.status_code == 200:
                        body = got.json()
                        break
                except httpx.HTTPError:
                    time.sleep(0.2)
            assert body is not None, "server never came up"
            assert body["years"] == [2018, 2019]
            districts = httpx.get(
                f"{base}/api/districts",
                params={"year": "2019", "grade": "5",
                        "assessment": "aerobic_capacity"},
                timeout=5.0,
            )
            assert districts.status_code == 200
            assert len(districts.json()["features"]) == 3
        finally:
            proc.terminate()
            proc.wait(timeout=10)
