#pragma once

#include "dperc/dataset.hpp"
#include "dperc/pairwise_mle.hpp"

#include <optional>
#include <vector>

namespace dperc {

/// Record of how one off-diagonal entry was estimated.
struct PairProvenance {
  Eigen::Index f1 = 0;
  Eigen::Index f2 = 0;
  double value = 0.0;
  RootChoice choice = RootChoice::kZero;
  int root_count = 0;
  std::optional<double> case_deletion;
  std::optional<Eigen::Index> categorical;  // set by the DPERC path only
};

/// Covariance estimate with per-class means and per-pair provenance.
///
/// means has one row per class (a single row for the classless case) and may
/// contain NaN where a class has no observed values in a column. class_codes
/// is parallel to the rows of means.
struct CovarianceEstimate {
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd means;
  std::vector<int> class_codes;
  std::vector<PairProvenance> pairs;
};

/// Uncorrected variance of one column pooled within groups: deviations about
/// each group's case-available mean, divided by the pooled observed count.
/// Throws std::invalid_argument when the column has no observed values.
double pooled_within_variance(const MaskedMatrix& m, Eigen::Index col,
                              const GroupingView& grouping);

/// Direct covariance estimation from an incomplete matrix. Diagonal entries
/// are the columns' uncorrected variances; each off-diagonal maximizes the
/// pairwise likelihood with both variances held fixed, taking the admissible
/// stationary point nearest the case-deletion covariance.
CovarianceEstimate dper_single(const MaskedMatrix& m);

/// Multi-class variant under a shared covariance across classes: statistics
/// pool within classes, diagonals are pooled within-class variances, and the
/// means matrix holds one row per class.
CovarianceEstimate dper_multi(const MaskedMatrix& m, std::span<const int> labels,
                              int class_count);

/// Dataset conveniences (continuous block; labels when present).
CovarianceEstimate dper_single(const MixedDataset& ds);
CovarianceEstimate dper_multi(const MixedDataset& ds);

/// Nearest positive semidefinite matrix by symmetric eigenvalue clipping.
/// Post-processing for downstream consumers that require PSD inputs; not
/// part of the estimators.
Eigen::MatrixXd project_psd(const Eigen::MatrixXd& sigma, double floor = 0.0);

}  // namespace dperc
