#include "dperc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace dperc {

ImputedMatrix mean_impute(const MaskedMatrix& m) {
  ImputedMatrix out{m.values, "mean"};
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const ColumnSummary s = column_summary(m, j);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!m.observed(i, j)) out.values(i, j) = s.mean;
    }
  }
  return out;
}

ImputedMatrix knn_impute(const MaskedMatrix& m, int k) {
  if (k < 1) throw std::invalid_argument("knn_impute: k must be positive");
  const Eigen::Index n = m.rows();
  const Eigen::Index p = m.cols();

  std::vector<double> col_mean(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    col_mean[static_cast<std::size_t>(j)] = column_summary(m, j).mean;
  }

  ImputedMatrix out{m.values, "knn"};
  std::vector<std::pair<double, Eigen::Index>> dist;  // (distance, row)
  for (Eigen::Index r = 0; r < n; ++r) {
    bool any_missing = false;
    for (Eigen::Index j = 0; j < p && !any_missing; ++j) any_missing = !m.observed(r, j);
    if (!any_missing) continue;

    dist.clear();
    for (Eigen::Index r2 = 0; r2 < n; ++r2) {
      if (r2 == r) continue;
      double ss = 0.0;
      int co = 0;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (m.observed(r, j) && m.observed(r2, j)) {
          const double d = m.values(r, j) - m.values(r2, j);
          ss += d * d;
          ++co;
        }
      }
      if (co == 0) continue;  // incomparable row
      dist.emplace_back(std::sqrt(ss * static_cast<double>(p) / static_cast<double>(co)), r2);
    }
    std::sort(dist.begin(), dist.end());

    for (Eigen::Index j = 0; j < p; ++j) {
      if (m.observed(r, j)) continue;
      double sum = 0.0;
      int used = 0;
      for (const auto& [d, r2] : dist) {
        if (!m.observed(r2, j)) continue;
        sum += m.values(r2, j);
        if (++used == k) break;
      }
      out.values(r, j) = used > 0 ? sum / static_cast<double>(used)
                                  : col_mean[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

CovarianceEstimate sample_cov(const Eigen::MatrixXd& values) {
  const Eigen::Index n = values.rows();
  const Eigen::Index p = values.cols();
  if (n < 1 || p < 1) throw std::invalid_argument("sample_cov: empty matrix");
  if (!values.allFinite()) throw std::invalid_argument("sample_cov: matrix has non-finite entries");

  CovarianceEstimate est;
  est.means = values.colwise().mean();
  const Eigen::MatrixXd centered = values.rowwise() - est.means.row(0);
  est.sigma = centered.transpose() * centered / static_cast<double>(n);
  est.class_codes = {0};
  return est;
}

}  // namespace dperc
