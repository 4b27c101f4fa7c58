#pragma once

#include "dperc/dper.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace dperc {

/// Exact decomposition behind the categorical selection score. For points
/// u_1..u_n with reference mean mu and inverse dispersion L:
///
///   delta      = sum_i (u_i - mu)' L (u_i - mu)
///   pairwise d = (1/n) sum_{i<j} (u_i - u_j)' L (u_i - u_j)
///   mean_shift = (ubar - mu)' L (ubar - mu)
///
/// and delta == d + n * mean_shift holds identically.
struct DecompositionTerms {
  double delta = 0.0;
  double pairwise = 0.0;
  double mean_shift = 0.0;
};

DecompositionTerms decomposition_terms(const Eigen::MatrixXd& points,
                                       const Eigen::VectorXd& mean,
                                       const Eigen::MatrixXd& inv_dispersion);

/// Treatment of a category whose mean cannot be estimated in one component
/// of a pair (no observed values in that column within the category).
enum class MissingMeanPolicy {
  kGlobalMean,   // substitute the global mean: zero deviation in that slot
  kLiteralZero,  // write literal zero into the class mean (legacy behaviour)
};

/// Case-available means of one feature pair inside one category.
struct GroupPairMean {
  std::int64_t size = 0;         // rows carrying the category
  std::optional<double> m1, m2;  // empty when nothing is observed in a column
};

struct DispersionScore {
  Eigen::Index categorical = 0;
  double score = 0.0;
  std::vector<std::int64_t> group_sizes;  // weights applied; 0 marks a skipped category
};

/// Size-weighted squared mean shifts of the categories in the metric of
/// inv_block (a 2x2 submatrix of the full inverse of the first-stage
/// estimate). Categories with no observed values in either column are
/// skipped under kGlobalMean.
DispersionScore dispersion_score(Eigen::Index categorical,
                                 const std::vector<GroupPairMean>& groups,
                                 const Eigen::Vector2d& global_mean,
                                 const Eigen::Matrix2d& inv_block,
                                 MissingMeanPolicy policy);

/// Smallest score wins; ties go to the lowest categorical index.
Eigen::Index select_categorical(const std::vector<DispersionScore>& scores);

struct DpercOptions {
  MissingMeanPolicy missing_mean = MissingMeanPolicy::kGlobalMean;
};

/// Covariance estimation that recruits one categorical feature per pair.
///
/// Stage one estimates the covariance directly (dper_single) and inverts it
/// once, with a small ridge when ill-conditioned. For every pair the
/// categorical with the smallest dispersion score is selected, and the
/// off-diagonal is re-estimated pooling within that categorical's groups.
/// The diagonal stays the columns' uncorrected variances.
CovarianceEstimate dperc_single(const MaskedMatrix& continuous,
                                const Eigen::MatrixXi& categoricals,
                                const std::vector<int>& category_counts,
                                const DpercOptions& opts = {});

/// Per-class application of dperc_single (no shared-covariance assumption).
/// Returns (class code, estimate) in ascending code order.
std::vector<std::pair<int, CovarianceEstimate>> dperc_multi(
    const MaskedMatrix& continuous, const Eigen::MatrixXi& categoricals,
    const std::vector<int>& category_counts, std::span<const int> labels, int class_count,
    const DpercOptions& opts = {});

/// Dataset conveniences.
CovarianceEstimate dperc_single(const MixedDataset& ds, const DpercOptions& opts = {});
std::vector<std::pair<int, CovarianceEstimate>> dperc_multi(const MixedDataset& ds,
                                                            const DpercOptions& opts = {});

}  // namespace dperc
