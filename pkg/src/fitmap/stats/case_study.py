"""District-level regression of fitness outcomes on social covariates.

Joins a snapshot's district percentages for one (year, grade, assessment)
with an external covariate CSV keyed by district code, drops incomplete
rows, and fits the five-predictor model. The income column is consumed in
units of 10000 dollars, as reflected by its default label.
"""

from __future__ import annotations

import csv
import io

import numpy as np

from ..custom import KIND_CDS, KIND_LEAID, ConversionTable, to_cds
from ..errors import FitmapError
from ..model import Assessment, Grade, Level
from .ols import RegressionReport, ols_fit

DEFAULT_PREDICTORS = (
    "pct_lang_not_english",
    "pct_public_insurance",
    "pct_computer",
    "pct_no_vehicle",
    "income_10k",
)


class NoOverlap(FitmapError):
    pass


class BadCovariates(FitmapError):
    pass


def load_covariates(
    data: bytes,
    predictors: tuple[str, ...] = DEFAULT_PREDICTORS,
    conversion: ConversionTable | None = None,
    source: str = "<covariates>",
) -> dict[str, tuple[float | None, ...]]:
    """District code -> predictor values (None where a cell is unusable).

    The code column follows the upload contract: "cdscode" preferred,
    "leaid" otherwise (requiring a conversion table); predictor columns are
    matched case-insensitively. Duplicate codes keep the last row.
    """
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise BadCovariates(f"{source} is not UTF-8 text: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    header = next((row for row in reader if any(cell.strip() for cell in row)), None)
    if header is None:
        raise BadCovariates(f"{source}: no header row")
    lowered = [cell.strip().lower() for cell in header]
    if "cdscode" in lowered:
        code_kind, code_at = KIND_CDS, lowered.index("cdscode")
    elif "leaid" in lowered:
        code_kind, code_at = KIND_LEAID, lowered.index("leaid")
    else:
        raise BadCovariates(f"{source}: no cdscode or leaid column")
    if code_kind == KIND_LEAID and conversion is None:
        raise BadCovariates(f"{source} is keyed by leaid but no conversion table was given")
    columns = []
    for label in predictors:
        if label.lower() not in lowered:
            raise BadCovariates(f"{source}: missing predictor column {label!r}")
        columns.append(lowered.index(label.lower()))

    out: dict[str, tuple[float | None, ...]] = {}
    for row in reader:
        if not any(cell.strip() for cell in row):
            continue
        code_text = row[code_at].strip() if code_at < len(row) else ""
        cds = to_cds(conversion, code_kind, code_text)
        if cds is None:
            continue
        values = []
        for at in columns:
            cell = row[at].strip() if at < len(row) else ""
            try:
                value = float(cell)
            except ValueError:
                value = None
            values.append(value)
        out[str(cds)] = tuple(values)
    return out


def run_case_study(
    snapshot,
    covariates: dict[str, tuple[float | None, ...]],
    dep: Assessment,
    year: int,
    grade: Grade,
    predictors: tuple[str, ...] = DEFAULT_PREDICTORS,
) -> RegressionReport:
    """Inner-join outcomes with covariates and fit; listwise deletion."""
    joined: list[tuple[str, float | None, tuple[float | None, ...]]] = []
    for code in sorted(covariates):
        record = snapshot.records.get((code, year, int(grade), dep.value))
        if record is None or record.level is not Level.DISTRICT:
            continue
        joined.append((code, record.pct_hfz, covariates[code]))
    if not joined:
        raise NoOverlap(
            f"no district in the covariate file has a {dep.value} record "
            f"for year {year}, grade {int(grade)}"
        )

    rows = []
    ids = []
    dropped = 0
    for code, pct, values in joined:
        if pct is None or any(v is None for v in values):
            dropped += 1
            continue
        ids.append(code)
        rows.append((pct, values))
    y = np.array([pct for pct, _ in rows], dtype=float)
    X = np.array([values for _, values in rows], dtype=float).reshape(len(rows), len(predictors))
    return ols_fit(X, y, predictors, dropped_rows=dropped, row_ids=ids)
