"""OLS with classical inference, VIF diagnostics, and the case study."""

from .case_study import (
    DEFAULT_PREDICTORS,
    BadCovariates,
    NoOverlap,
    load_covariates,
    run_case_study,
)
from .ols import (
    INTERCEPT,
    RankDeficient,
    RegressionReport,
    TermEstimate,
    TooFewRows,
    ols_fit,
    vif,
)
from .report import report_csv, report_text, residuals_csv, write_report_files
from .special import reg_inc_beta, stars_for, t_two_sided_p

__all__ = [
    "BadCovariates",
    "DEFAULT_PREDICTORS",
    "INTERCEPT",
    "NoOverlap",
    "RankDeficient",
    "RegressionReport",
    "TermEstimate",
    "TooFewRows",
    "load_covariates",
    "ols_fit",
    "reg_inc_beta",
    "report_csv",
    "report_text",
    "residuals_csv",
    "run_case_study",
    "stars_for",
    "t_two_sided_p",
    "vif",
    "write_report_files",
]
