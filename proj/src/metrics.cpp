#include "dperc/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace dperc {

namespace {

void check_same_square(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("metrics: matrices must be square");
  }
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("metrics: matrix shapes differ");
  }
  if (a.rows() == 0) {
    throw std::invalid_argument("metrics: matrices are empty");
  }
}

}  // namespace

double error_e(const Eigen::MatrixXd& est, const Eigen::MatrixXd& truth) {
  check_same_square(est, truth);
  const double p = static_cast<double>(est.rows());
  return (est - truth).norm() / (p * p);
}

double error_r(const Eigen::MatrixXd& est, const Eigen::MatrixXd& truth) {
  check_same_square(est, truth);
  Eigen::MatrixXd diff = est - truth;
  diff.diagonal().setZero();
  return diff.norm();
}

std::optional<double> improvement_p(double r_ref, double r_new) {
  if (r_ref == 0.0) {
    return std::nullopt;
  }
  return 100.0 * (1.0 - r_new / r_ref);
}

Eigen::MatrixXd cov_to_corr(const Eigen::MatrixXd& sigma, bool* overshoot) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) {
    throw std::invalid_argument("cov_to_corr: matrix must be square and non-empty");
  }
  const Eigen::Index p = sigma.rows();
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(sigma(i, i) > 0.0)) {
      throw std::invalid_argument("cov_to_corr: diagonal must be strictly positive");
    }
  }
  if (overshoot != nullptr) {
    *overshoot = false;
  }
  constexpr double kClampTol = 1e-12;
  Eigen::MatrixXd corr(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    corr(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      double v = sigma(i, j) / std::sqrt(sigma(i, i) * sigma(j, j));
      const double excess = std::abs(v) - 1.0;
      if (excess > 0.0) {
        if (excess <= kClampTol) {
          v = (v > 0.0) ? 1.0 : -1.0;
        } else if (overshoot != nullptr) {
          *overshoot = true;
        }
      }
      corr(i, j) = v;
      corr(j, i) = v;
    }
  }
  return corr;
}

}  // namespace dperc
