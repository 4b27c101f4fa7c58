#pragma once

#include "dperc/dper.hpp"
#include "dperc/masked_matrix.hpp"

#include <string>

namespace dperc {

struct ImputedMatrix {
  Eigen::MatrixXd values;
  std::string method;
};

/// Fills every missing cell with its column's observed mean.
ImputedMatrix mean_impute(const MaskedMatrix& m);

/// Fills each missing cell with the mean of that column over the k nearest
/// candidate rows. Distances are Euclidean over co-observed coordinates,
/// scaled by sqrt(p / #co-observed); a candidate must observe the target
/// column. Fewer than k candidates means all of them; none at all falls back
/// to the column mean. Distance ties break on the lower row index.
ImputedMatrix knn_impute(const MaskedMatrix& m, int k);

/// Uncorrected sample covariance and column means of a complete matrix.
CovarianceEstimate sample_cov(const Eigen::MatrixXd& values);

}  // namespace dperc
