#include "dperc/dper.hpp"

#include "doctest.h"
#include "support/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

using namespace dperc;
namespace ts = dperc::testsupport;

namespace {

MaskedMatrix random_masked(std::uint64_t seed, Eigen::Index n = 80, Eigen::Index p = 4,
                           double rate = 0.25) {
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd x =
      ts::mvn(n, Eigen::VectorXd::Constant(p, 0.7), ts::ar1_cov(p, 0.5, 2.0), rng);
  return ts::mask_bernoulli(x, rate, rng);
}

// Pooled within-class uncorrected variance by direct summation.
double pooled_variance_oracle(const Eigen::MatrixXd& x, const std::vector<int>& labels,
                              int classes, Eigen::Index col) {
  double total = 0.0;
  std::int64_t count = 0;
  for (int g = 0; g < classes; ++g) {
    double sum = 0.0;
    std::int64_t n_g = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (labels[static_cast<std::size_t>(i)] == g) {
        sum += x(i, col);
        ++n_g;
      }
    }
    if (n_g == 0) continue;
    const double mean = sum / static_cast<double>(n_g);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (labels[static_cast<std::size_t>(i)] == g) {
        total += (x(i, col) - mean) * (x(i, col) - mean);
        ++count;
      }
    }
  }
  return total / static_cast<double>(count);
}

}  // namespace

TEST_SUITE("dper") {

TEST_CASE("fully observed data reduces to the sample covariance") {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd x =
      ts::mvn(60, Eigen::Vector3d(1.0, -2.0, 0.0), ts::ar1_cov(3, 0.6, 1.2), rng);
  const CovarianceEstimate est = dper_single(MaskedMatrix::complete(x));
  const Eigen::MatrixXd oracle = ts::sample_cov_oracle(x);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      CHECK(est.sigma(i, j) == doctest::Approx(oracle(i, j)).epsilon(1e-10));
    }
    CHECK(est.means(0, i) == doctest::Approx(x.col(i).mean()).epsilon(1e-12));
  }
  CHECK(est.pairs.size() == 3);
}

TEST_CASE("a single column yields its uncorrected variance") {
  Eigen::MatrixXd x(4, 1);
  x << 1.0, 2.0, 3.0, 4.0;
  const CovarianceEstimate est = dper_single(MaskedMatrix::complete(x));
  CHECK(est.sigma.rows() == 1);
  CHECK(est.sigma(0, 0) == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(est.pairs.empty());
}

TEST_CASE("masked pair matches a dense likelihood grid") {
  std::mt19937_64 rng(31);
  Eigen::MatrixXd sigma(2, 2);
  sigma << 1.0, 0.55, 0.55, 1.0;
  const Eigen::MatrixXd x = ts::mvn(50, Eigen::Vector2d(0.0, 0.0), sigma, rng);
  BoolGrid obs = BoolGrid::Constant(50, 2, true);
  for (Eigen::Index i = 1; i < 50; i += 2) obs(i, 1) = false;
  const MaskedMatrix m(x, obs);

  const CovarianceEstimate est = dper_single(m);
  const double s11v = est.sigma(0, 0);
  const double s22v = est.sigma(1, 1);
  const PairStats st = compute_pair_stats(m, 0, 1, GroupingView::single(50));
  const double bound = std::sqrt(s11v * s22v);
  double best_x = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  const int grid_n = 4001;
  for (int i = 0; i < grid_n; ++i) {
    const double v = -bound + (i + 0.5) * (2.0 * bound / grid_n);
    const double value = eta(v, st, s11v, s22v);
    if (value > best) {
      best = value;
      best_x = v;
    }
  }
  CHECK(std::abs(est.sigma(0, 1) - best_x) <= 2.0 * (2.0 * bound / grid_n));
}

TEST_CASE("output is exactly symmetric with full provenance") {
  const MaskedMatrix m = random_masked(9);
  const CovarianceEstimate est = dper_single(m);
  CHECK((est.sigma.array() == est.sigma.transpose().array()).all());
  CHECK(est.pairs.size() == 6);
  for (const auto& pr : est.pairs) {
    CHECK(pr.f1 < pr.f2);
    CHECK(est.sigma(pr.f1, pr.f2) == pr.value);
    CHECK_FALSE(pr.categorical.has_value());
  }
}

TEST_CASE("row permutation leaves the estimate unchanged") {
  const MaskedMatrix m = random_masked(13);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(m.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(14);
  for (std::size_t i = perm.size(); i > 1; --i) {
    std::swap(perm[i - 1], perm[uniform_below(rng, i)]);
  }
  Eigen::MatrixXd values(m.rows(), m.cols());
  BoolGrid mask(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    values.row(i) = m.values.row(perm[static_cast<std::size_t>(i)]);
    mask.row(i) = m.observed.row(perm[static_cast<std::size_t>(i)]);
  }
  const CovarianceEstimate a = dper_single(m);
  const CovarianceEstimate b = dper_single(MaskedMatrix(values, mask));
  for (Eigen::Index i = 0; i < m.cols(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      CHECK(b.sigma(i, j) == doctest::Approx(a.sigma(i, j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("column scaling transforms the estimate covariantly") {
  const double c = -3.25;
  const MaskedMatrix m = random_masked(17);
  Eigen::MatrixXd scaled = m.values;
  scaled.col(0) *= c;
  const CovarianceEstimate base = dper_single(m);
  const CovarianceEstimate big = dper_single(MaskedMatrix(scaled, m.observed));
  CHECK(big.sigma(0, 0) == doctest::Approx(c * c * base.sigma(0, 0)).epsilon(1e-10));
  for (Eigen::Index j = 1; j < m.cols(); ++j) {
    CHECK(big.sigma(0, j) == doctest::Approx(c * base.sigma(0, j)).epsilon(1e-8));
    CHECK(big.sigma(1, j) == doctest::Approx(base.sigma(1, j)).epsilon(1e-12));
  }
}

TEST_CASE("one class collapses to the single-class path") {
  const MaskedMatrix m = random_masked(21);
  const std::vector<int> labels(static_cast<std::size_t>(m.rows()), 0);
  const CovarianceEstimate multi = dper_multi(m, labels, 1);
  const CovarianceEstimate single = dper_single(m);
  CHECK((multi.sigma.array() == single.sigma.array()).all());
  CHECK((multi.means.array() == single.means.array()).all());
}

TEST_CASE("duplicated classes estimate the same matrix as one copy") {
  const MaskedMatrix m = random_masked(25, 50);
  Eigen::MatrixXd values(100, m.cols());
  BoolGrid mask(100, m.cols());
  values << m.values, m.values;
  mask << m.observed, m.observed;
  std::vector<int> labels(100, 0);
  std::fill(labels.begin() + 50, labels.end(), 1);

  const CovarianceEstimate doubled = dper_multi(MaskedMatrix(values, mask), labels, 2);
  const CovarianceEstimate single = dper_single(m);
  for (Eigen::Index i = 0; i < m.cols(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      CHECK(doubled.sigma(i, j) == doctest::Approx(single.sigma(i, j)).epsilon(1e-13));
    }
  }
  CHECK(doubled.means.rows() == 2);
}

TEST_CASE("multi-class diagonal is the pooled within-class variance") {
  std::mt19937_64 rng(29);
  const Eigen::Index n = 60;
  Eigen::MatrixXd x = ts::mvn(n, Eigen::Vector2d(0.0, 0.0), ts::ar1_cov(2, 0.4), rng);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    labels[static_cast<std::size_t>(i)] = i < n / 3 ? 0 : 1;
    // Shift class 1 so the pooled and global variances differ clearly.
    if (i >= n / 3) x.row(i).array() += 5.0;
  }
  const CovarianceEstimate est = dper_multi(MaskedMatrix::complete(x), labels, 2);
  for (Eigen::Index col = 0; col < 2; ++col) {
    const double oracle = pooled_variance_oracle(x, labels, 2, col);
    CHECK(est.sigma(col, col) == doctest::Approx(oracle).epsilon(1e-12));
  }
  // Per-class means match direct averages.
  CHECK(est.means(0, 0) ==
        doctest::Approx(x.topRows(n / 3).col(0).mean()).epsilon(1e-12));
  CHECK(est.means(1, 0) ==
        doctest::Approx(x.bottomRows(n - n / 3).col(0).mean()).epsilon(1e-12));
}

TEST_CASE("a class with no observations in a column gets a NaN mean") {
  Eigen::MatrixXd values(4, 2);
  values << 1.0, 10.0, 2.0, 20.0, 0.0, 30.0, 0.0, 40.0;
  BoolGrid mask(4, 2);
  mask << true, true, true, true, false, true, false, true;
  const std::vector<int> labels{0, 0, 1, 1};
  const CovarianceEstimate est = dper_multi(MaskedMatrix(values, mask), labels, 2);
  CHECK(std::isfinite(est.means(0, 0)));
  CHECK(std::isnan(est.means(1, 0)));
  CHECK(std::isfinite(est.sigma(0, 0)));
}

TEST_CASE("pooled_within_variance validates its inputs") {
  const MaskedMatrix m = random_masked(33);
  const GroupingView g = GroupingView::single(m.rows());
  CHECK(pooled_within_variance(m, 0, g) > 0.0);
  Eigen::MatrixXd empty_col = Eigen::MatrixXd::Zero(3, 1);
  BoolGrid no_obs = BoolGrid::Constant(3, 1, false);
  CHECK_THROWS_AS(pooled_within_variance(MaskedMatrix(empty_col, no_obs), 0,
                                         GroupingView::single(3)),
                  std::invalid_argument);
}

TEST_CASE("project_psd clips eigenvalues and keeps PSD inputs") {
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
  const Eigen::MatrixXd proj = project_psd(indefinite);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(proj);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
  CHECK((proj - proj.transpose()).norm() == 0.0);

  const Eigen::MatrixXd spd = ts::ar1_cov(3, 0.5);
  const Eigen::MatrixXd same = project_psd(spd);
  CHECK((same - spd).norm() < 1e-12);

  const Eigen::MatrixXd floored = project_psd(indefinite, 0.5);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig2(floored);
  CHECK(eig2.eigenvalues().minCoeff() >= 0.5 - 1e-12);
}

}  // TEST_SUITE
