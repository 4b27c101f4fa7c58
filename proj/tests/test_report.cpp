#include "dperc/report.hpp"

#include "dperc/csv.hpp"
#include "doctest.h"
#include "support/synthetic.hpp"
#include "support/tempdir.hpp"

#include <random>
#include <string>

using namespace dperc;
namespace ts = dperc::testsupport;

namespace {

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("difference matrices match their elementwise definitions") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd truth = ts::normal_matrix(4, 4, rng);
  const Eigen::MatrixXd est = ts::normal_matrix(4, 4, rng);

  const Eigen::MatrixXd mse = local_mse_matrix(truth, est);
  const Eigen::MatrixXd diff = signed_diff_matrix(truth, est);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      const double d = truth(i, j) - est(i, j);
      CHECK(std::abs(diff(i, j) - d) <= 1e-15);
      CHECK(std::abs(mse(i, j) - d * d) <= 1e-14);
    }
  }

  CHECK(local_mse_matrix(truth, truth).norm() == 0.0);
  CHECK(signed_diff_matrix(truth, truth).norm() == 0.0);

  const Eigen::MatrixXd uniform = local_mse_matrix(
      Eigen::MatrixXd::Constant(2, 2, 0.5), Eigen::MatrixXd::Constant(2, 2, 0.3));
  CHECK(uniform.minCoeff() == doctest::Approx(0.04).epsilon(1e-14));
  CHECK(uniform.maxCoeff() == doctest::Approx(0.04).epsilon(1e-14));

  const Eigen::MatrixXd mirrored = signed_diff_matrix(truth, (-truth).eval());
  CHECK((mirrored - 2.0 * truth).norm() == 0.0);

  CHECK_THROWS_AS(local_mse_matrix(truth, Eigen::MatrixXd::Zero(3, 3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(signed_diff_matrix(truth, Eigen::MatrixXd::Zero(3, 3)),
                  std::invalid_argument);
}

TEST_CASE("rendering is byte deterministic") {
  std::mt19937_64 rng(7);
  Eigen::MatrixXd base = ts::normal_matrix(3, 3, rng);
  const Eigen::MatrixXd m = 0.5 * (base + base.transpose());
  HeatmapSpec spec;
  spec.kind = HeatmapKind::kSignedDiff;
  spec.title = "difference";
  const HeatmapArtifact a = render_heatmap(m, spec);
  const HeatmapArtifact b = render_heatmap(m, spec);
  CHECK(a.svg == b.svg);
  CHECK(a.values_csv == b.values_csv);
}

TEST_CASE("a zero correlation cell renders at the white midpoint") {
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 1);
  HeatmapSpec spec;
  spec.kind = HeatmapKind::kCorrelation;
  spec.title = "tiny";
  const HeatmapArtifact art = render_heatmap(zero, spec);
  CHECK(count_occurrences(art.svg, "class=\"cell\"") == 1);
  CHECK(art.svg.find("class=\"cell\"") != std::string::npos);
  CHECK(art.svg.find("fill=\"#FFFFFF\"><title>(0,0): 0</title>") != std::string::npos);
  CHECK(art.svg.find("linearGradient") != std::string::npos);
  CHECK(art.svg.find("color anchors:") != std::string::npos);
  // Correlation scales are pinned to [-1, 1] regardless of the data.
  CHECK(art.svg.find(">-1.00</text>") != std::string::npos);
  CHECK(art.svg.find(">1.00</text>") != std::string::npos);
}

TEST_CASE("identity correlation puts the diagonal at the +1 anchor") {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  HeatmapSpec spec;
  spec.kind = HeatmapKind::kCorrelation;
  spec.title = "identity";
  const HeatmapArtifact art = render_heatmap(id, spec);
  CHECK(count_occurrences(art.svg, "class=\"cell\"") == 9);
  CHECK(count_occurrences(art.svg, "fill=\"#2166AC\"") == 3);
  CHECK(count_occurrences(art.svg, "fill=\"#FFFFFF\"><title>") == 6);
}

TEST_CASE("cell and tooltip counts scale with the matrix") {
  std::mt19937_64 rng(11);
  const Eigen::MatrixXd m = ts::normal_matrix(4, 4, rng);
  HeatmapSpec spec;
  spec.kind = HeatmapKind::kLocalMse;
  spec.title = "squares";
  const HeatmapArtifact art = render_heatmap(local_mse_matrix(m, (-m).eval()), spec);
  CHECK(count_occurrences(art.svg, "class=\"cell\"") == 16);
  CHECK(count_occurrences(art.svg, "<title>") == 16);
  CHECK(art.svg.rfind("</svg>\n") == art.svg.size() - 7);
  CHECK(art.svg.rfind("<svg ", 0) == 0);
}

TEST_CASE("labels show up on axes, tooltips, and the sidecar header") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 0.25, 0.25, 1.0;
  HeatmapSpec spec;
  spec.kind = HeatmapKind::kCorrelation;
  spec.title = "named";
  spec.labels = {"height", "a<b"};
  const HeatmapArtifact art = render_heatmap(m, spec);
  CHECK(art.svg.find(">height</text>") != std::string::npos);
  CHECK(art.svg.find("a&lt;b") != std::string::npos);
  CHECK(art.svg.find("<title>height, a&lt;b: 0.25</title>") != std::string::npos);
  CHECK(art.values_csv.rfind("height,a<b\n", 0) == 0);

  spec.labels = {"only-one"};
  CHECK_THROWS_AS(render_heatmap(m, spec), std::invalid_argument);
}

TEST_CASE("the sidecar round-trips the matrix at full precision") {
  std::mt19937_64 rng(13);
  Eigen::MatrixXd m = ts::normal_matrix(3, 3, rng);
  m(0, 1) = 1.0 / 3.0;
  m(2, 0) = -1e-17;
  HeatmapSpec spec;
  spec.kind = HeatmapKind::kSignedDiff;
  spec.title = "roundtrip";
  const HeatmapArtifact art = render_heatmap(m, spec);

  ts::TempDir dir;
  const auto path = dir.path() / "values.csv";
  ts::write_file(path, art.values_csv);
  const Eigen::MatrixXd back = csv::read_matrix(path);
  CHECK((back.array() == m.array()).all());
}

TEST_CASE("rendering rejects malformed input") {
  HeatmapSpec spec;
  CHECK_THROWS_AS(render_heatmap(Eigen::MatrixXd(0, 0), spec), std::invalid_argument);
  CHECK_THROWS_AS(render_heatmap(Eigen::MatrixXd::Zero(2, 3), spec), std::invalid_argument);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
  bad(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(render_heatmap(bad, spec), std::invalid_argument);
}

}  // TEST_SUITE
