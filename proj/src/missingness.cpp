#include "dperc/missingness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dperc {

namespace {

constexpr int kMaxRedraws = 1000;

}  // namespace

MaskedMatrix apply_mcar(const MaskedMatrix& m, const MaskPlan& plan) {
  if (!(plan.rate >= 0.0 && plan.rate < 1.0)) {
    throw std::invalid_argument("apply_mcar: rate must lie in [0, 1)");
  }
  std::vector<Eigen::Index> targets = plan.columns;
  if (targets.empty()) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) targets.push_back(j);
  }
  std::sort(targets.begin(), targets.end());
  if (std::adjacent_find(targets.begin(), targets.end()) != targets.end()) {
    throw std::invalid_argument("apply_mcar: duplicate target column");
  }
  for (const Eigen::Index j : targets) {
    if (j < 0 || j >= m.cols()) throw std::invalid_argument("apply_mcar: target column out of range");
  }

  const std::int64_t n = m.rows();
  const std::int64_t t = static_cast<std::int64_t>(targets.size());
  const std::int64_t cells = n * t;
  const std::int64_t k = std::llround(plan.rate * static_cast<double>(cells));
  if (k > t * (n - 1)) {
    throw std::invalid_argument("apply_mcar: rate would necessarily empty a column");
  }

  std::mt19937_64 rng(plan.seed);
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    // Cell c maps to (row = c % n, column = targets[c / n]); the mapping is
    // part of the reproducibility contract.
    const auto draw = sample_without_replacement(rng, cells, k);
    MaskedMatrix out = m;
    for (const std::int64_t c : draw) {
      const Eigen::Index row = static_cast<Eigen::Index>(c % n);
      const Eigen::Index col = targets[static_cast<std::size_t>(c / n)];
      out.observed(row, col) = false;
      out.values(row, col) = 0.0;
    }
    const bool ok = std::all_of(targets.begin(), targets.end(), [&](Eigen::Index j) {
      return out.observed_count(j) > 0;
    });
    if (ok) return out;
  }
  throw std::runtime_error("apply_mcar: could not avoid emptying a column (pre-existing "
                           "missingness leaves too few cells)");
}

MixedDataset apply_mcar(const MixedDataset& ds, const MaskPlan& plan) {
  MixedDataset out = ds;
  out.continuous = apply_mcar(ds.continuous, plan);
  return out;
}

double realized_missing_rate(const MaskedMatrix& m) {
  const auto cells = static_cast<double>(m.rows()) * static_cast<double>(m.cols());
  if (cells == 0.0) throw std::invalid_argument("realized_missing_rate: empty matrix");
  return static_cast<double>(m.missing_count()) / cells;
}

double realized_missing_rate(const MixedDataset& ds) {
  return realized_missing_rate(ds.continuous);
}

}  // namespace dperc
