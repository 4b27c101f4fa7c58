#include "dperc/dper.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dperc {

namespace {

// Shared by the single- and multi-class paths so their results agree bit for
// bit when the grouping collapses to one group.
CovarianceEstimate estimate_with_grouping(const MaskedMatrix& m, const GroupingView& grouping) {
  const Eigen::Index p = m.cols();
  if (m.rows() < 1 || p < 1) throw std::invalid_argument("estimation needs a non-empty matrix");

  CovarianceEstimate est;
  est.sigma = Eigen::MatrixXd::Zero(p, p);
  est.means = Eigen::MatrixXd::Constant(grouping.groups, p,
                                        std::numeric_limits<double>::quiet_NaN());
  est.class_codes.resize(static_cast<std::size_t>(grouping.groups));
  for (int g = 0; g < grouping.groups; ++g) est.class_codes[static_cast<std::size_t>(g)] = g;

  // Per-class case-available means; a class with nothing observed in a
  // column keeps NaN there and contributes empty sums downstream.
  std::vector<std::vector<double>> sums(static_cast<std::size_t>(grouping.groups),
                                        std::vector<double>(static_cast<std::size_t>(p), 0.0));
  std::vector<std::vector<std::int64_t>> counts(
      static_cast<std::size_t>(grouping.groups),
      std::vector<std::int64_t>(static_cast<std::size_t>(p), 0));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const auto g = static_cast<std::size_t>(grouping.group_of(r));
    for (Eigen::Index j = 0; j < p; ++j) {
      if (m.observed(r, j)) {
        sums[g][static_cast<std::size_t>(j)] += m.values(r, j);
        ++counts[g][static_cast<std::size_t>(j)];
      }
    }
  }
  for (int g = 0; g < grouping.groups; ++g) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const auto c = counts[static_cast<std::size_t>(g)][static_cast<std::size_t>(j)];
      if (c > 0) {
        est.means(g, j) =
            sums[static_cast<std::size_t>(g)][static_cast<std::size_t>(j)] / static_cast<double>(c);
      }
    }
  }

  for (Eigen::Index j = 0; j < p; ++j) {
    est.sigma(j, j) = pooled_within_variance(m, j, grouping);
  }

  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const RootSelection sel =
          estimate_offdiag(m, i, j, grouping, est.sigma(i, i), est.sigma(j, j));
      est.sigma(i, j) = sel.chosen;
      est.sigma(j, i) = sel.chosen;
      PairProvenance prov;
      prov.f1 = i;
      prov.f2 = j;
      prov.value = sel.chosen;
      prov.choice = sel.choice;
      prov.root_count = static_cast<int>(sel.candidates.size());
      prov.case_deletion = sel.case_deletion;
      est.pairs.push_back(prov);
    }
  }
  return est;
}

}  // namespace

double pooled_within_variance(const MaskedMatrix& m, Eigen::Index col,
                              const GroupingView& grouping) {
  if (grouping.n != m.rows()) {
    throw std::invalid_argument("pooled_within_variance: grouping length mismatch");
  }
  const auto groups = static_cast<std::size_t>(grouping.groups);
  std::vector<double> sum(groups, 0.0);
  std::vector<std::int64_t> count(groups, 0);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (m.observed(r, col)) {
      const auto g = static_cast<std::size_t>(grouping.group_of(r));
      sum[g] += m.values(r, col);
      ++count[g];
    }
  }
  std::int64_t total = 0;
  for (const auto c : count) total += c;
  if (total == 0) {
    throw std::invalid_argument("column " + std::to_string(col) + " has no observed values");
  }
  std::vector<double> mean(groups, 0.0);
  for (std::size_t g = 0; g < groups; ++g) {
    if (count[g] > 0) mean[g] = sum[g] / static_cast<double>(count[g]);
  }
  double ss = 0.0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (m.observed(r, col)) {
      const double d = m.values(r, col) - mean[static_cast<std::size_t>(grouping.group_of(r))];
      ss += d * d;
    }
  }
  return ss / static_cast<double>(total);
}

CovarianceEstimate dper_single(const MaskedMatrix& m) {
  return estimate_with_grouping(m, GroupingView::single(m.rows()));
}

CovarianceEstimate dper_multi(const MaskedMatrix& m, std::span<const int> labels,
                              int class_count) {
  if (static_cast<Eigen::Index>(labels.size()) != m.rows()) {
    throw std::invalid_argument("dper_multi: label length mismatch");
  }
  return estimate_with_grouping(m, GroupingView::of(labels, class_count));
}

CovarianceEstimate dper_single(const MixedDataset& ds) { return dper_single(ds.continuous); }

CovarianceEstimate dper_multi(const MixedDataset& ds) {
  if (!ds.labels) throw std::invalid_argument("dper_multi: dataset has no class labels");
  return dper_multi(ds.continuous,
                    std::span<const int>(ds.labels->data(), static_cast<std::size_t>(ds.labels->size())),
                    ds.class_count());
}

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& sigma, double floor) {
  if (sigma.rows() != sigma.cols()) throw std::invalid_argument("project_psd: matrix not square");
  if (floor < 0.0) throw std::invalid_argument("project_psd: floor must be non-negative");
  const Eigen::MatrixXd sym = 0.5 * (sigma + sigma.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  Eigen::VectorXd vals = eig.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) vals(i) = std::max(vals(i), floor);
  Eigen::MatrixXd out = eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace dperc
