"""Covariance and correlation estimation directly from incomplete data.

Every array-facing function codes a missing cell as NaN, in both directions.
Estimates come back as dicts with ``sigma`` (the covariance matrix),
``means`` (one row per class; a single row when classless), and
``class_codes`` (parallel to the rows of ``means``).
"""

from dperc._core import (
    __version__,
    apply_mcar,
    cov_to_corr,
    decomposition_terms,
    dper,
    dper_multi,
    dperc,
    dperc_multi,
    error_e,
    error_r,
    improvement_p,
    knn_impute,
    mean_impute,
    realized_missing_rate,
    render_heatmap,
    rng_id,
    sample_cov,
)

__all__ = [
    "__version__",
    "apply_mcar",
    "cov_to_corr",
    "decomposition_terms",
    "dper",
    "dper_multi",
    "dperc",
    "dperc_multi",
    "error_e",
    "error_r",
    "improvement_p",
    "knn_impute",
    "mean_impute",
    "realized_missing_rate",
    "render_heatmap",
    "rng_id",
    "sample_cov",
]
