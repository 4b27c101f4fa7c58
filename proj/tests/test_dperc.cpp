#include "dperc/dperc.hpp"

#include "dperc/missingness.hpp"
#include "doctest.h"
#include "support/synthetic.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace dperc;
namespace ts = dperc::testsupport;

namespace {

// Mixture fixture: two equal-covariance Gaussian components keyed to a
// categorical column, so the shared within-component covariance is known.
struct Mixture {
  MaskedMatrix data;
  Eigen::MatrixXi cats;
  Eigen::MatrixXd sigma_within;
};

Mixture make_mixture(std::uint64_t seed, Eigen::Index n, double shift) {
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd sigma(2, 2);
  sigma << 1.0, 0.3, 0.3, 1.0;
  Eigen::MatrixXd values(n, 2);
  Eigen::MatrixXi cats(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int g = uniform_below(rng, 2) == 0 ? 0 : 1;
    cats(i, 0) = g;
    Eigen::MatrixXd row = ts::mvn(1, Eigen::Vector2d(0.0, 0.0), sigma, rng);
    values.row(i) = row.row(0);
    if (g == 1) {
      values(i, 0) += shift;
      values(i, 1) -= shift;
    }
  }
  return Mixture{MaskedMatrix::complete(values), cats, sigma};
}

double offdiag_error(const Eigen::MatrixXd& est, const Eigen::MatrixXd& truth) {
  Eigen::MatrixXd diff = est - truth;
  diff.diagonal().setZero();
  return diff.norm();
}

}  // namespace

TEST_SUITE("dperc") {

TEST_CASE("decomposition terms cover the degenerate layouts") {
  Eigen::MatrixXd one(1, 2);
  one << 3.0, -1.0;
  const Eigen::VectorXd mu = Eigen::Vector2d(1.0, 1.0);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  const DecompositionTerms single = decomposition_terms(one, mu, id);
  CHECK(single.pairwise == 0.0);
  CHECK(single.delta == doctest::Approx(single.mean_shift).epsilon(1e-14));

  Eigen::MatrixXd equal(4, 2);
  equal << 2.0, 5.0, 2.0, 5.0, 2.0, 5.0, 2.0, 5.0;
  const DecompositionTerms flat = decomposition_terms(equal, mu, id);
  CHECK(flat.pairwise == 0.0);
  CHECK(flat.delta == doctest::Approx(4.0 * flat.mean_shift).epsilon(1e-14));
}

TEST_CASE("decomposition terms match a brute-force double loop") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd pts = ts::normal_matrix(5, 3, rng);
  const Eigen::VectorXd mu = Eigen::Vector3d(0.2, -0.4, 1.0);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  const DecompositionTerms t = decomposition_terms(pts, mu, id);

  double delta = 0.0;
  double pairwise = 0.0;
  for (Eigen::Index i = 0; i < 5; ++i) {
    delta += (pts.row(i).transpose() - mu).squaredNorm();
    for (Eigen::Index j = i + 1; j < 5; ++j) {
      pairwise += (pts.row(i) - pts.row(j)).squaredNorm();
    }
  }
  pairwise /= 5.0;
  CHECK(t.delta == doctest::Approx(delta).epsilon(1e-12));
  CHECK(t.pairwise == doctest::Approx(pairwise).epsilon(1e-12));
}

TEST_CASE("delta always splits into pairwise plus shift terms") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(uniform_below(rng, 9));
    const Eigen::MatrixXd pts = ts::normal_matrix(n, 2, rng);
    const Eigen::VectorXd mu = Eigen::Vector2d(uniform_unit(rng), uniform_unit(rng));
    Eigen::MatrixXd base = ts::normal_matrix(2, 2, rng);
    const Eigen::MatrixXd metric =
        base * base.transpose() + 0.5 * Eigen::MatrixXd::Identity(2, 2);
    const DecompositionTerms t = decomposition_terms(pts, mu, metric);
    const double rebuilt = t.pairwise + static_cast<double>(n) * t.mean_shift;
    CHECK(t.delta == doctest::Approx(rebuilt).epsilon(1e-9));
  }
}

TEST_CASE("dispersion score reproduces the hand-expanded example") {
  std::vector<GroupPairMean> groups(2);
  groups[0] = GroupPairMean{2, 0.0, 0.0};
  groups[1] = GroupPairMean{3, 1.0, 1.0};
  const Eigen::Vector2d global(0.6, 0.6);
  const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
  const DispersionScore s =
      dispersion_score(0, groups, global, id, MissingMeanPolicy::kGlobalMean);
  CHECK(s.score == doctest::Approx(2.40).epsilon(1e-12));
  CHECK(s.group_sizes == std::vector<std::int64_t>{2, 3});
}

TEST_CASE("categories aligned with the global mean score zero") {
  std::vector<GroupPairMean> groups(1);
  groups[0] = GroupPairMean{10, 0.6, -0.2};
  const Eigen::Vector2d global(0.6, -0.2);
  const DispersionScore s = dispersion_score(0, groups, global, Eigen::Matrix2d::Identity(),
                                             MissingMeanPolicy::kGlobalMean);
  CHECK(s.score == 0.0);
}

TEST_CASE("missing mean policies treat unestimable components differently") {
  std::vector<GroupPairMean> groups(2);
  groups[0] = GroupPairMean{5, 2.0, std::nullopt};
  groups[1] = GroupPairMean{3, std::nullopt, std::nullopt};
  const Eigen::Vector2d global(1.0, 4.0);
  const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();

  const DispersionScore soft =
      dispersion_score(0, groups, global, id, MissingMeanPolicy::kGlobalMean);
  // Group 0 contributes only its observed component; group 1 is skipped.
  CHECK(soft.score == doctest::Approx(5.0 * 1.0).epsilon(1e-14));
  CHECK(soft.group_sizes == std::vector<std::int64_t>{5, 0});

  const DispersionScore hard =
      dispersion_score(0, groups, global, id, MissingMeanPolicy::kLiteralZero);
  // Literal zeros stand in for the missing means.
  const double expect = 5.0 * (1.0 + 16.0) + 3.0 * (1.0 + 16.0);
  CHECK(hard.score == doctest::Approx(expect).epsilon(1e-14));
  CHECK(hard.group_sizes == std::vector<std::int64_t>{5, 3});
}

TEST_CASE("relabeling categories does not change the score") {
  std::vector<GroupPairMean> groups(2);
  groups[0] = GroupPairMean{2, 0.0, 0.0};
  groups[1] = GroupPairMean{3, 1.0, 1.0};
  std::vector<GroupPairMean> swapped{groups[1], groups[0]};
  const Eigen::Vector2d global(0.6, 0.6);
  const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
  const DispersionScore a =
      dispersion_score(0, groups, global, id, MissingMeanPolicy::kGlobalMean);
  const DispersionScore b =
      dispersion_score(0, swapped, global, id, MissingMeanPolicy::kGlobalMean);
  CHECK(a.score == b.score);
}

TEST_CASE("selection takes the smallest score and breaks ties low") {
  std::vector<DispersionScore> scores(3);
  scores[0] = DispersionScore{0, 2.4, {}};
  scores[1] = DispersionScore{1, 0.7, {}};
  scores[2] = DispersionScore{2, 0.7, {}};
  CHECK(select_categorical(scores) == 1);

  for (auto& s : scores) s.score *= 17.5;
  CHECK(select_categorical(scores) == 1);

  CHECK(select_categorical({scores[2]}) == 2);
  CHECK_THROWS_AS(select_categorical({}), std::invalid_argument);
}

TEST_CASE("complete data with a constant categorical gives the sample covariance") {
  std::mt19937_64 rng(11);
  const Eigen::Index n = 70;
  const Eigen::MatrixXd x =
      ts::mvn(n, Eigen::Vector3d(0.5, -1.0, 2.0), ts::ar1_cov(3, 0.55, 1.5), rng);
  Eigen::MatrixXi cats(n, 2);
  cats.col(0).setZero();
  for (Eigen::Index i = 0; i < n; ++i) cats(i, 1) = static_cast<int>(uniform_below(rng, 3));

  const CovarianceEstimate est =
      dperc_single(MaskedMatrix::complete(x), cats, {1, 3});
  const Eigen::MatrixXd oracle = ts::sample_cov_oracle(x);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      CHECK(est.sigma(i, j) == doctest::Approx(oracle(i, j)).epsilon(1e-10));
    }
  }
  for (const auto& pr : est.pairs) {
    REQUIRE(pr.categorical.has_value());
    CHECK(*pr.categorical == 0);  // zero dispersion beats the random column
  }
}

TEST_CASE("all-constant categoricals reproduce the direct estimate bitwise") {
  std::mt19937_64 rng(15);
  const Eigen::MatrixXd x = ts::mvn(60, Eigen::Vector4d::Zero().eval(),
                                    ts::ar1_cov(4, 0.5, 2.0), rng);
  const MaskedMatrix m = ts::mask_bernoulli(x, 0.3, rng);
  Eigen::MatrixXi cats = Eigen::MatrixXi::Zero(60, 1);

  const CovarianceEstimate viaC = dperc_single(m, cats, {1});
  const CovarianceEstimate direct = dper_single(m);
  CHECK((viaC.sigma.array() == direct.sigma.array()).all());
  CHECK((viaC.means.array() == direct.means.array()).all());
}

TEST_CASE("diagonal always equals the direct estimate diagonal") {
  const Mixture mix = make_mixture(19, 150, 2.0);
  MaskPlan plan;
  plan.rate = 0.4;
  plan.seed = 19;
  const MaskedMatrix masked = apply_mcar(mix.data, plan);
  const CovarianceEstimate c = dperc_single(masked, mix.cats, {2});
  const CovarianceEstimate d = dper_single(masked);
  CHECK(c.sigma(0, 0) == d.sigma(0, 0));
  CHECK(c.sigma(1, 1) == d.sigma(1, 1));
}

TEST_CASE("swapping the two category codes leaves the estimate unchanged") {
  const Mixture mix = make_mixture(23, 120, 1.5);
  MaskPlan plan;
  plan.rate = 0.3;
  plan.seed = 23;
  const MaskedMatrix masked = apply_mcar(mix.data, plan);
  Eigen::MatrixXi flipped = mix.cats;
  for (Eigen::Index i = 0; i < flipped.rows(); ++i) flipped(i, 0) = 1 - flipped(i, 0);

  const CovarianceEstimate a = dperc_single(masked, mix.cats, {2});
  const CovarianceEstimate b = dperc_single(masked, flipped, {2});
  CHECK((a.sigma.array() == b.sigma.array()).all());
}

TEST_CASE("pooling within the mixture key beats the direct estimate") {
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Mixture mix = make_mixture(100 + seed, 400, 3.0);
    MaskPlan plan;
    plan.rate = 0.5;
    plan.seed = seed;
    const MaskedMatrix masked = apply_mcar(mix.data, plan);
    const CovarianceEstimate viaC = dperc_single(masked, mix.cats, {2});
    const CovarianceEstimate direct = dper_single(masked);
    const double rc = offdiag_error(viaC.sigma, mix.sigma_within);
    const double rd = offdiag_error(direct.sigma, mix.sigma_within);
    if (rc <= rd) ++wins;
  }
  CHECK(wins >= 7);
}

TEST_CASE("per-class estimation treats classes independently") {
  std::mt19937_64 rng(27);
  const Eigen::Index n = 50;
  Eigen::MatrixXd x(2 * n, 2);
  x.topRows(n) = ts::mvn(n, Eigen::Vector2d(0.0, 0.0), ts::ar1_cov(2, 0.7), rng);
  x.bottomRows(n) = ts::mvn(n, Eigen::Vector2d(4.0, -4.0), ts::ar1_cov(2, -0.3, 2.0), rng);
  Eigen::MatrixXi cats = Eigen::MatrixXi::Zero(2 * n, 1);
  std::vector<int> labels(2 * static_cast<std::size_t>(n), 0);
  std::fill(labels.begin() + n, labels.end(), 1);

  const auto parts = dperc_multi(MaskedMatrix::complete(x), cats, {1},
                                 std::span<const int>(labels), 2);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].first == 0);
  CHECK(parts[1].first == 1);
  const Eigen::MatrixXd top = ts::sample_cov_oracle(x.topRows(n));
  const Eigen::MatrixXd bottom = ts::sample_cov_oracle(x.bottomRows(n));
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) {
      CHECK(parts[0].second.sigma(i, j) == doctest::Approx(top(i, j)).epsilon(1e-10));
      CHECK(parts[1].second.sigma(i, j) == doctest::Approx(bottom(i, j)).epsilon(1e-10));
    }
  }
}

TEST_CASE("one class reduces to the single-class result") {
  const Mixture mix = make_mixture(31, 80, 1.0);
  const std::vector<int> labels(80, 0);
  const auto parts =
      dperc_multi(mix.data, mix.cats, {2}, std::span<const int>(labels), 1);
  REQUIRE(parts.size() == 1);
  const CovarianceEstimate single = dperc_single(mix.data, mix.cats, {2});
  CHECK((parts[0].second.sigma.array() == single.sigma.array()).all());
}

TEST_CASE("input validation rejects malformed categorical blocks") {
  const Mixture mix = make_mixture(35, 20, 1.0);
  const Eigen::MatrixXi none(20, 0);
  CHECK_THROWS_AS(dperc_single(mix.data, none, {}), std::invalid_argument);
  CHECK_THROWS_AS(dperc_single(mix.data, mix.cats, {2, 2}), std::invalid_argument);
  const Eigen::MatrixXi short_cats = mix.cats.topRows(10);
  CHECK_THROWS_AS(dperc_single(mix.data, short_cats, {2}), std::invalid_argument);
}

}  // TEST_SUITE
