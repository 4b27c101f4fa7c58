#pragma once

#include "dperc/dataset.hpp"
#include "dperc/rng.hpp"

#include <cstdint>
#include <vector>

namespace dperc {

/// Plan for one MCAR masking pass over continuous columns.
struct MaskPlan {
  double rate = 0.0;                  // in [0, 1)
  std::uint64_t seed = 0;
  std::vector<Eigen::Index> columns;  // empty = every column of the block
};

/// Masks exactly round(rate * rows * |targets|) cells, drawn uniformly
/// without replacement across the target columns. Any draw that would leave
/// a target column with no observed values is rejected and redrawn from the
/// same stream, so the outcome is still a pure function of the plan.
/// Throws std::invalid_argument when the count cannot avoid emptying a
/// column, or when the rate is outside [0, 1).
MaskedMatrix apply_mcar(const MaskedMatrix& m, const MaskPlan& plan);
MixedDataset apply_mcar(const MixedDataset& ds, const MaskPlan& plan);

/// Fraction of missing cells in the continuous block.
double realized_missing_rate(const MaskedMatrix& m);
double realized_missing_rate(const MixedDataset& ds);

}  // namespace dperc
