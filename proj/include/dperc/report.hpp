#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace dperc {

enum class HeatmapKind {
  kCorrelation,  // fixed [-1, 1] diverging scale
  kLocalMse,     // [0, max] sequential scale
  kSignedDiff,   // symmetric [-max|v|, +max|v|] diverging scale
};

struct HeatmapSpec {
  HeatmapKind kind = HeatmapKind::kCorrelation;
  std::string title;
  std::vector<std::string> labels;  // empty, or one name per row/column
};

/// Elementwise squared difference.
Eigen::MatrixXd local_mse_matrix(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& est);

/// Elementwise signed difference truth - est: positive where the reference is
/// higher, which the diverging palette renders blue.
Eigen::MatrixXd signed_diff_matrix(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& est);

/// Rendered heatmap: a standalone SVG document plus the plotted values as a
/// CSV sidecar. Both strings are byte-deterministic for identical inputs.
struct HeatmapArtifact {
  std::string svg;
  std::string values_csv;
};

HeatmapArtifact render_heatmap(const Eigen::MatrixXd& values, const HeatmapSpec& spec);

}  // namespace dperc
