#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace dperc {

using BoolGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Dense real matrix with an explicit observation mask.
///
/// The mask is the single source of truth for missingness; unobserved cells
/// hold 0.0 so stray reads stay finite, and observed cells are always finite
/// (enforced on construction). No sentinel values are stored.
struct MaskedMatrix {
  Eigen::MatrixXd values;
  BoolGrid observed;

  MaskedMatrix() = default;
  MaskedMatrix(Eigen::MatrixXd v, BoolGrid mask);

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  bool is_observed(Eigen::Index i, Eigen::Index j) const { return observed(i, j); }

  std::int64_t observed_count(Eigen::Index col) const;
  std::int64_t missing_count() const;

  /// Fully observed matrix (throws if any entry is not finite).
  static MaskedMatrix complete(Eigen::MatrixXd v);
  /// From a NaN-coded matrix: non-finite entries become missing.
  static MaskedMatrix from_nan(const Eigen::MatrixXd& v);
  /// NaN-coded copy (the Python-facing representation).
  Eigen::MatrixXd to_nan() const;
};

struct ColumnSummary {
  std::int64_t observed = 0;
  double mean = 0.0;
  double variance = 0.0;  // uncorrected: divides by the observed count
};

/// Mean and uncorrected variance over one column's observed entries.
/// Throws std::invalid_argument when the column has no observed values.
ColumnSummary column_summary(const MaskedMatrix& m, Eigen::Index col);

}  // namespace dperc
