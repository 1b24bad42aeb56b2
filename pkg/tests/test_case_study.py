"""Covariate loading and the district-level regression join."""

import numpy as np
import pytest

from conftest import DISTRICT_A, DISTRICT_B, DISTRICT_C, LEAID_A, crosswalk_csv_bytes
from fitmap.custom import load_conversion_table
from fitmap.ingest import build_snapshot
from fitmap.model import (
    Assessment,
    FitnessRecord,
    Grade,
    ZoneCounts,
    level_of,
    parse_cdscode,
)
from fitmap.stats import (
    DEFAULT_PREDICTORS,
    INTERCEPT,
    BadCovariates,
    NoOverlap,
    TooFewRows,
    load_covariates,
    run_case_study,
)

TWO = ("alpha", "beta")


def covariate_csv(rows, header="cdscode,alpha,beta"):
    return ("\n".join([header, *rows]) + "\n").encode()


def district_code(i):
    return f"10{i:05d}0000000"


def synthetic_snapshot(pcts, year=2019):
    """Districts with aerobic percentages quantized to 1/10000 of a point."""
    records = []
    for i, pct in enumerate(pcts):
        entity = parse_cdscode(district_code(i))
        counts = (
            ZoneCounts(tested=None, hfz=None)
            if pct is None
            else ZoneCounts(tested=1_000_000, hfz=round(pct * 10_000))
        )
        records.append(
            FitnessRecord(
                entity=entity,
                level=level_of(entity),
                school_year=year,
                grade=Grade.FIFTH,
                assessment=Assessment.AEROBIC_CAPACITY,
                counts=counts,
            )
        )
    return build_snapshot(records, {}, {})


class TestLoadCovariates:
    def test_cdscode_keyed(self):
        data = covariate_csv([f"{DISTRICT_A},1.5,2.5", f"{DISTRICT_B},3,4"])
        got = load_covariates(data, TWO)
        assert got == {DISTRICT_A: (1.5, 2.5), DISTRICT_B: (3.0, 4.0)}

    def test_header_matching_is_case_insensitive(self):
        data = covariate_csv([f"{DISTRICT_A},1,2"], header="CDSCode,Alpha,BETA")
        assert DISTRICT_A in load_covariates(data, TWO)

    def test_leaid_keyed_through_conversion(self):
        conversion = load_conversion_table(crosswalk_csv_bytes())
        data = covariate_csv([f"{LEAID_A},1,2"], header="leaid,alpha,beta")
        got = load_covariates(data, TWO, conversion=conversion)
        assert got == {DISTRICT_A: (1.0, 2.0)}

    def test_leaid_without_conversion_rejected(self):
        data = covariate_csv([f"{LEAID_A},1,2"], header="leaid,alpha,beta")
        with pytest.raises(BadCovariates):
            load_covariates(data, TWO)

    def test_missing_predictor_column_rejected(self):
        data = covariate_csv([f"{DISTRICT_A},1"], header="cdscode,alpha")
        with pytest.raises(BadCovariates) as err:
            load_covariates(data, TWO)
        assert "beta" in str(err.value)

    def test_missing_code_column_rejected(self):
        with pytest.raises(BadCovariates):
            load_covariates(covariate_csv(["1,2,3"], header="id,alpha,beta"), TWO)

    def test_unusable_cells_become_none(self):
        data = covariate_csv([f"{DISTRICT_A},not-a-number,2"])
        assert load_covariates(data, TWO) == {DISTRICT_A: (None, 2.0)}

    def test_unresolvable_codes_skipped(self):
        data = covariate_csv(["garbage,1,2", f"{DISTRICT_A},1,2"])
        assert set(load_covariates(data, TWO)) == {DISTRICT_A}

    def test_duplicate_codes_keep_last_row(self):
        data = covariate_csv([f"{DISTRICT_A},1,1", f"{DISTRICT_A},9,9"])
        assert load_covariates(data, TWO)[DISTRICT_A] == (9.0, 9.0)

    def test_school_codes_fold_to_their_district(self):
        school = DISTRICT_A[:7] + "0130419"
        data = covariate_csv([f"{school},1,2"])
        assert set(load_covariates(data, TWO)) == {DISTRICT_A}

    def test_default_predictor_labels(self):
        assert DEFAULT_PREDICTORS == (
            "pct_lang_not_english",
            "pct_public_insurance",
            "pct_computer",
            "pct_no_vehicle",
            "income_10k",
        )


class TestRunCaseStudy:
    def planted(self, n=120, seed=17):
        rng = np.random.default_rng(seed)
        X = rng.uniform(-1.0, 1.0, size=(n, 2))
        beta = np.array([5.0, -3.0])
        pcts = 60.0 + X @ beta  # stays far inside [0, 100]
        snapshot = synthetic_snapshot(list(pcts))
        covariates = {
            district_code(i): (float(X[i, 0]), float(X[i, 1]))
            for i in range(n)
        }
        return snapshot, covariates, beta

    def test_recovers_planted_coefficients(self):
        snapshot, covariates, beta = self.planted()
        report = run_case_study(
            snapshot, covariates, Assessment.AEROBIC_CAPACITY, 2019,
            Grade.FIFTH, predictors=TWO,
        )
        assert report.n_used == 120
        assert report.dropped_rows == 0
        assert report.term(INTERCEPT).estimate == pytest.approx(60.0, abs=1e-3)
        assert report.term("alpha").estimate == pytest.approx(5.0, abs=1e-3)
        assert report.term("beta").estimate == pytest.approx(-3.0, abs=1e-3)
        assert report.r_squared > 0.999999
        assert report.row_ids == tuple(sorted(covariates))

    def test_listwise_deletion_counts_dropped_rows(self):
        snapshot, covariates, _ = self.planted(n=40, seed=3)
        # a suppressed outcome and a missing covariate cell each drop a row
        suppressed = synthetic_snapshot(
            [60.0 if i else None for i in range(40)]
        )
        covariates[district_code(1)] = (None, 0.5)
        report = run_case_study(
            suppressed, covariates, Assessment.AEROBIC_CAPACITY, 2019,
            Grade.FIFTH, predictors=TWO,
        )
        assert report.dropped_rows == 2
        assert report.n_used == 38
        assert district_code(0) not in report.row_ids
        assert district_code(1) not in report.row_ids

    def test_no_overlap_reported(self):
        snapshot, covariates, _ = self.planted(n=10)
        with pytest.raises(NoOverlap):
            run_case_study(snapshot, covariates, Assessment.AEROBIC_CAPACITY,
                           2018, Grade.FIFTH, predictors=TWO)
        with pytest.raises(NoOverlap):
            run_case_study(snapshot, covariates, Assessment.FLEXIBILITY,
                           2019, Grade.FIFTH, predictors=TWO)
        with pytest.raises(NoOverlap):
            run_case_study(snapshot, {"99999990000000": (1.0, 2.0)},
                           Assessment.AEROBIC_CAPACITY, 2019, Grade.FIFTH,
                           predictors=TWO)

    def test_too_few_complete_rows(self, sample_snapshot):
        covariates = {
            DISTRICT_A: (1.0, 2.0),
            DISTRICT_B: (2.0, 1.0),
            DISTRICT_C: (3.0, 3.0),  # suppressed outcome: dropped
        }
        with pytest.raises(TooFewRows):
            run_case_study(sample_snapshot, covariates,
                           Assessment.AEROBIC_CAPACITY, 2019, Grade.FIFTH,
                           predictors=TWO)

    def test_quantization_error_is_bounded(self):
        # percentages reconstructed from counts sit within half a unit of
        # the last stored decimal, so the join introduces no visible bias
        snapshot = synthetic_snapshot([12.3456])
        record = snapshot.records[
            (district_code(0), 2019, 5, Assessment.AEROBIC_CAPACITY.value)
        ]
        assert record.pct_hfz == pytest.approx(12.3456, abs=5e-5)
