#include "dperc/dperc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dperc {

namespace {

constexpr double kConditionLimit = 1e12;
constexpr double kRidge = 1e-8;

// Inverse of the first-stage estimate with a ridge fallback. A matrix that
// stays singular even after the ridge (all-constant data) degrades to the
// identity metric, which leaves every dispersion score at zero.
Eigen::MatrixXd regularized_inverse(const Eigen::MatrixXd& sigma) {
  const Eigen::Index p = sigma.rows();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sigma);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(p - 1);
  Eigen::MatrixXd base = sigma;
  if (!(smin > 0.0) || smax / smin > kConditionLimit) {
    base += kRidge * (sigma.diagonal().mean()) * Eigen::MatrixXd::Identity(p, p);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(base);
  if (!lu.isInvertible()) return Eigen::MatrixXd::Identity(p, p);
  Eigen::MatrixXd inv = lu.inverse();
  if (!inv.allFinite()) return Eigen::MatrixXd::Identity(p, p);
  return inv;
}

// Case-available means and sizes of every (category, column) cell, computed
// once per categorical column.
struct CatProfile {
  std::vector<std::int64_t> sizes;          // rows per category
  Eigen::MatrixXd mean;                     // G x p, NaN when nothing observed
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> count;  // G x p
};

CatProfile profile_categorical(const MaskedMatrix& m, const Eigen::MatrixXi& cats,
                               Eigen::Index k, int categories) {
  const Eigen::Index p = m.cols();
  CatProfile prof;
  prof.sizes.assign(static_cast<std::size_t>(categories), 0);
  prof.mean = Eigen::MatrixXd::Zero(categories, p);
  prof.count = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(categories, p);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const int g = cats(r, k);
    ++prof.sizes[static_cast<std::size_t>(g)];
    for (Eigen::Index j = 0; j < p; ++j) {
      if (m.observed(r, j)) {
        prof.mean(g, j) += m.values(r, j);
        ++prof.count(g, j);
      }
    }
  }
  for (int g = 0; g < categories; ++g) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (prof.count(g, j) > 0) {
        prof.mean(g, j) /= static_cast<double>(prof.count(g, j));
      } else {
        prof.mean(g, j) = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  return prof;
}

std::vector<GroupPairMean> pair_means(const CatProfile& prof, Eigen::Index i, Eigen::Index j) {
  std::vector<GroupPairMean> out(prof.sizes.size());
  for (std::size_t g = 0; g < prof.sizes.size(); ++g) {
    GroupPairMean& gm = out[g];
    gm.size = prof.sizes[g];
    const auto gi = static_cast<Eigen::Index>(g);
    if (prof.count(gi, i) > 0) gm.m1 = prof.mean(gi, i);
    if (prof.count(gi, j) > 0) gm.m2 = prof.mean(gi, j);
  }
  return out;
}

}  // namespace

DecompositionTerms decomposition_terms(const Eigen::MatrixXd& points,
                                       const Eigen::VectorXd& mean,
                                       const Eigen::MatrixXd& inv_dispersion) {
  const Eigen::Index n = points.rows();
  const Eigen::Index k = points.cols();
  if (n < 1) throw std::invalid_argument("decomposition_terms: no points");
  if (mean.size() != k || inv_dispersion.rows() != k || inv_dispersion.cols() != k) {
    throw std::invalid_argument("decomposition_terms: dimension mismatch");
  }
  const auto quad = [&](const Eigen::VectorXd& v) { return v.dot(inv_dispersion * v); };

  DecompositionTerms t;
  for (Eigen::Index i = 0; i < n; ++i) {
    t.delta += quad(points.row(i).transpose() - mean);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      t.pairwise += quad((points.row(i) - points.row(j)).transpose());
    }
  }
  t.pairwise /= static_cast<double>(n);
  const Eigen::VectorXd centroid = points.colwise().mean().transpose();
  t.mean_shift = quad(centroid - mean);
  return t;
}

DispersionScore dispersion_score(Eigen::Index categorical,
                                 const std::vector<GroupPairMean>& groups,
                                 const Eigen::Vector2d& global_mean,
                                 const Eigen::Matrix2d& inv_block,
                                 MissingMeanPolicy policy) {
  DispersionScore score;
  score.categorical = categorical;
  score.group_sizes.reserve(groups.size());
  for (const GroupPairMean& g : groups) {
    Eigen::Vector2d dev = Eigen::Vector2d::Zero();
    bool usable = g.size > 0;
    if (policy == MissingMeanPolicy::kGlobalMean) {
      if (!g.m1 && !g.m2) usable = false;  // nothing observed for this pair
      if (g.m1) dev(0) = *g.m1 - global_mean(0);
      if (g.m2) dev(1) = *g.m2 - global_mean(1);
    } else {
      dev(0) = (g.m1 ? *g.m1 : 0.0) - global_mean(0);
      dev(1) = (g.m2 ? *g.m2 : 0.0) - global_mean(1);
    }
    if (!usable) {
      score.group_sizes.push_back(0);
      continue;
    }
    score.group_sizes.push_back(g.size);
    score.score += static_cast<double>(g.size) * dev.dot(inv_block * dev);
  }
  return score;
}

Eigen::Index select_categorical(const std::vector<DispersionScore>& scores) {
  if (scores.empty()) throw std::invalid_argument("select_categorical: no scores");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i].score < scores[best].score) best = i;
  }
  return scores[best].categorical;
}

CovarianceEstimate dperc_single(const MaskedMatrix& continuous,
                                const Eigen::MatrixXi& categoricals,
                                const std::vector<int>& category_counts,
                                const DpercOptions& opts) {
  const Eigen::Index p = continuous.cols();
  const Eigen::Index q = categoricals.cols();
  if (q < 1) throw std::invalid_argument("dperc_single: needs at least one categorical feature");
  if (categoricals.rows() != continuous.rows()) {
    throw std::invalid_argument("dperc_single: categorical block row count mismatch");
  }
  if (static_cast<Eigen::Index>(category_counts.size()) != q) {
    throw std::invalid_argument("dperc_single: category count list mismatch");
  }

  // Stage one: direct estimate, its means, and its inverse metric.
  CovarianceEstimate est = dper_single(continuous);
  const Eigen::MatrixXd inv_full = regularized_inverse(est.sigma);

  std::vector<CatProfile> profiles;
  profiles.reserve(static_cast<std::size_t>(q));
  for (Eigen::Index k = 0; k < q; ++k) {
    const int g = category_counts[static_cast<std::size_t>(k)];
    if (g < 1) throw std::invalid_argument("dperc_single: empty categorical dictionary");
    profiles.push_back(profile_categorical(continuous, categoricals, k, g));
  }

  // Pooled within-category variances, filled on first use per (k, column).
  Eigen::MatrixXd within(q, p);
  within.setConstant(std::numeric_limits<double>::quiet_NaN());
  const auto within_var = [&](Eigen::Index k, Eigen::Index col, const GroupingView& grouping) {
    if (std::isnan(within(k, col))) {
      within(k, col) = pooled_within_variance(continuous, col, grouping);
    }
    return within(k, col);
  };

  for (auto& prov : est.pairs) {
    const Eigen::Index i = prov.f1;
    const Eigen::Index j = prov.f2;
    Eigen::Matrix2d inv_block;
    inv_block << inv_full(i, i), inv_full(i, j), inv_full(j, i), inv_full(j, j);
    const Eigen::Vector2d global_mean(est.means(0, i), est.means(0, j));

    std::vector<DispersionScore> scores;
    scores.reserve(static_cast<std::size_t>(q));
    for (Eigen::Index k = 0; k < q; ++k) {
      scores.push_back(dispersion_score(k, pair_means(profiles[static_cast<std::size_t>(k)], i, j),
                                        global_mean, inv_block, opts.missing_mean));
    }
    const Eigen::Index chosen_cat = select_categorical(scores);

    const GroupingView grouping = GroupingView::of(
        std::span<const int>(categoricals.col(chosen_cat).data(),
                             static_cast<std::size_t>(categoricals.rows())),
        category_counts[static_cast<std::size_t>(chosen_cat)]);
    const RootSelection sel = estimate_offdiag(continuous, i, j, grouping,
                                               within_var(chosen_cat, i, grouping),
                                               within_var(chosen_cat, j, grouping));
    est.sigma(i, j) = sel.chosen;
    est.sigma(j, i) = sel.chosen;
    prov.value = sel.chosen;
    prov.choice = sel.choice;
    prov.root_count = static_cast<int>(sel.candidates.size());
    prov.case_deletion = sel.case_deletion;
    prov.categorical = chosen_cat;
  }
  return est;
}

std::vector<std::pair<int, CovarianceEstimate>> dperc_multi(
    const MaskedMatrix& continuous, const Eigen::MatrixXi& categoricals,
    const std::vector<int>& category_counts, std::span<const int> labels, int class_count,
    const DpercOptions& opts) {
  if (static_cast<Eigen::Index>(labels.size()) != continuous.rows()) {
    throw std::invalid_argument("dperc_multi: label length mismatch");
  }
  if (class_count < 1) throw std::invalid_argument("dperc_multi: class count must be positive");

  std::vector<std::pair<int, CovarianceEstimate>> out;
  for (int cls = 0; cls < class_count; ++cls) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index r = 0; r < continuous.rows(); ++r) {
      if (labels[static_cast<std::size_t>(r)] == cls) idx.push_back(r);
    }
    if (idx.empty()) continue;
    const Eigen::Index n = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd values(n, continuous.cols());
    BoolGrid mask(n, continuous.cols());
    Eigen::MatrixXi cats(n, categoricals.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
      values.row(i) = continuous.values.row(idx[static_cast<std::size_t>(i)]);
      mask.row(i) = continuous.observed.row(idx[static_cast<std::size_t>(i)]);
      cats.row(i) = categoricals.row(idx[static_cast<std::size_t>(i)]);
    }
    CovarianceEstimate est =
        dperc_single(MaskedMatrix(std::move(values), std::move(mask)), cats, category_counts, opts);
    est.class_codes = {cls};
    out.emplace_back(cls, std::move(est));
  }
  return out;
}

CovarianceEstimate dperc_single(const MixedDataset& ds, const DpercOptions& opts) {
  return dperc_single(ds.continuous, ds.categoricals, ds.category_counts(), opts);
}

std::vector<std::pair<int, CovarianceEstimate>> dperc_multi(const MixedDataset& ds,
                                                            const DpercOptions& opts) {
  if (!ds.labels) throw std::invalid_argument("dperc_multi: dataset has no class labels");
  return dperc_multi(ds.continuous, ds.categoricals, ds.category_counts(),
                     std::span<const int>(ds.labels->data(), static_cast<std::size_t>(ds.labels->size())),
                     ds.class_count(), opts);
}

}  // namespace dperc
