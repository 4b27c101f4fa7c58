#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>

namespace dperc {

/// Normalized whole-matrix error: ||est - truth||_F divided by the entry
/// count p*p.
double error_e(const Eigen::MatrixXd& est, const Eigen::MatrixXd& truth);

/// Off-diagonal Frobenius error: both diagonals zeroed, no normalization.
double error_r(const Eigen::MatrixXd& est, const Eigen::MatrixXd& truth);

/// Percent improvement of r_new over the reference r_ref:
/// 100 * (1 - r_new / r_ref). Empty when the reference is zero.
std::optional<double> improvement_p(double r_ref, double r_new);

/// Correlation matrix from a covariance matrix with strictly positive
/// diagonal. Entries overshooting [-1, 1] by at most 1e-12 are clamped;
/// larger overshoots are kept verbatim and flagged through `overshoot`.
Eigen::MatrixXd cov_to_corr(const Eigen::MatrixXd& sigma, bool* overshoot = nullptr);

/// One benchmark measurement.
struct MetricRecord {
  std::string dataset;
  std::string method;
  std::optional<double> rate;  // empty for externally imputed inputs
  int repeat = 0;
  std::uint64_t seed = 0;
  double e = 0.0;
  double r = 0.0;
  std::optional<double> p;     // improvement over the reference method
};

}  // namespace dperc
