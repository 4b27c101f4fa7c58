#include "dperc/masked_matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dperc {

MaskedMatrix::MaskedMatrix(Eigen::MatrixXd v, BoolGrid mask)
    : values(std::move(v)), observed(std::move(mask)) {
  if (values.rows() != observed.rows() || values.cols() != observed.cols()) {
    throw std::invalid_argument("MaskedMatrix: value and mask shapes differ");
  }
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      if (observed(i, j)) {
        if (!std::isfinite(values(i, j))) {
          throw std::invalid_argument("MaskedMatrix: observed entry is not finite at (" +
                                      std::to_string(i) + ", " + std::to_string(j) + ")");
        }
      } else {
        values(i, j) = 0.0;
      }
    }
  }
}

std::int64_t MaskedMatrix::observed_count(Eigen::Index col) const {
  std::int64_t n = 0;
  for (Eigen::Index i = 0; i < rows(); ++i) n += observed(i, col) ? 1 : 0;
  return n;
}

std::int64_t MaskedMatrix::missing_count() const {
  return static_cast<std::int64_t>(rows()) * cols() -
         static_cast<std::int64_t>(observed.count());
}

MaskedMatrix MaskedMatrix::complete(Eigen::MatrixXd v) {
  BoolGrid mask = BoolGrid::Constant(v.rows(), v.cols(), true);
  return MaskedMatrix(std::move(v), std::move(mask));
}

MaskedMatrix MaskedMatrix::from_nan(const Eigen::MatrixXd& v) {
  BoolGrid mask(v.rows(), v.cols());
  Eigen::MatrixXd vals = v;
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      const bool ok = std::isfinite(v(i, j));
      mask(i, j) = ok;
      if (!ok) vals(i, j) = 0.0;
    }
  }
  return MaskedMatrix(std::move(vals), std::move(mask));
}

Eigen::MatrixXd MaskedMatrix::to_nan() const {
  Eigen::MatrixXd out = values;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index j = 0; j < cols(); ++j) {
    for (Eigen::Index i = 0; i < rows(); ++i) {
      if (!observed(i, j)) out(i, j) = nan;
    }
  }
  return out;
}

ColumnSummary column_summary(const MaskedMatrix& m, Eigen::Index col) {
  if (col < 0 || col >= m.cols()) throw std::invalid_argument("column_summary: column out of range");
  ColumnSummary s;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (m.observed(i, col)) {
      sum += m.values(i, col);
      ++s.observed;
    }
  }
  if (s.observed == 0) {
    throw std::invalid_argument("column_summary: column " + std::to_string(col) +
                                " has no observed values");
  }
  s.mean = sum / static_cast<double>(s.observed);
  double ss = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (m.observed(i, col)) {
      const double d = m.values(i, col) - s.mean;
      ss += d * d;
    }
  }
  s.variance = ss / static_cast<double>(s.observed);
  return s;
}

}  // namespace dperc
