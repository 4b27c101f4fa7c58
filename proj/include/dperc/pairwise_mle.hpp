#pragma once

#include "dperc/masked_matrix.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace dperc {

/// Row grouping used to pool pairwise statistics within groups.
/// `codes == nullptr` means one group covering every row, with no storage.
struct GroupingView {
  const int* codes = nullptr;
  Eigen::Index n = 0;
  int groups = 1;

  static GroupingView single(Eigen::Index rows) { return {nullptr, rows, 1}; }
  static GroupingView of(std::span<const int> codes, int groups);
  int group_of(Eigen::Index row) const { return codes ? codes[row] : 0; }
};

/// Per-group counts and case-available marginal means for one feature pair.
struct GroupPairStats {
  std::int64_t complete = 0;  // rows with both features observed
  std::int64_t obs1 = 0;      // rows with feature 1 observed
  std::int64_t obs2 = 0;      // rows with feature 2 observed
  double mean1 = 0.0;         // mean over the obs1 values; 0 when obs1 == 0
  double mean2 = 0.0;         // mean over the obs2 values; 0 when obs2 == 0
};

/// Pooled sufficient statistics for one feature pair.
///
/// The s-sums run over complete rows only, with deviations taken about each
/// group's case-available marginal means, so a group whose marginal has no
/// observed values contributes empty sums. complete_total pools the
/// complete-row counts and is the leading coefficient of the score cubic.
/// |s12| <= sqrt(s11 * s22) holds by Cauchy-Schwarz.
struct PairStats {
  std::vector<GroupPairStats> groups;
  double s11 = 0.0;
  double s12 = 0.0;
  double s22 = 0.0;
  std::int64_t complete_total = 0;  // A
};

PairStats compute_pair_stats(const MaskedMatrix& m, Eigen::Index f1, Eigen::Index f2,
                             const GroupingView& grouping);

/// Profile log-likelihood of sigma12 with both variances held fixed and the
/// additive constant dropped:
///
///   eta(x) = -(A/2) log(sigma22 - x^2/sigma11)
///            - (s22 - 2 (x/sigma11) s12 + (x^2/sigma11^2) s11)
///              / (2 (sigma22 - x^2/sigma11))
///
/// with A = stats.complete_total. Finite on the open admissible interval
/// x^2 < sigma11 * sigma22; throws std::domain_error outside it and
/// std::invalid_argument for non-positive variances.
double eta(double sigma12, const PairStats& stats, double sigma11, double sigma22);

/// Stationary points of eta: the real roots of
///
///   P(x) = s12 sigma11 sigma22 + (sigma11 sigma22 A - s22 sigma11 - s11 sigma22) x
///          + s12 x^2 - A x^3
///
/// solved in closed form on a unit-variance rescaling, polished with one
/// Newton step, deduplicated, and filtered to the open interval
/// (-sqrt(sigma11 sigma22), +sqrt(sigma11 sigma22)). Ascending order; the
/// result may be empty. Throws std::invalid_argument when A == 0 or a
/// variance is not positive.
std::vector<double> solve_sigma12_cubic(const PairStats& stats, double sigma11,
                                        double sigma22);

/// Pooled covariance over complete rows, deviations about per-group
/// complete-row means. Empty when fewer than two complete rows exist.
std::optional<double> case_deletion_sigma12(const MaskedMatrix& m, Eigen::Index f1,
                                            Eigen::Index f2, const GroupingView& grouping);

/// How the off-diagonal value was decided.
enum class RootChoice {
  kNearestCaseDeletion,  // candidate closest to the case-deletion reference
  kMaxEta,               // no reference: candidate with the largest eta
  kCaseDeletionClamped,  // no admissible root: clamped case-deletion value
  kZero,                 // nothing to go on: zero
};

struct RootSelection {
  std::vector<double> candidates;
  std::vector<double> eta_values;  // parallel to candidates
  std::optional<double> case_deletion;
  double chosen = 0.0;
  RootChoice choice = RootChoice::kZero;
};

/// Selection rule over a non-empty candidate set: nearest to the reference
/// when one exists (distance ties go to the larger eta), otherwise the eta
/// argmax. eta_fn must be evaluable at every candidate.
RootSelection select_root(std::vector<double> candidates,
                          std::optional<double> case_deletion,
                          const std::function<double(double)>& eta_fn);

/// Full pipeline for one off-diagonal entry: statistics, cubic, selection,
/// fallbacks. Degenerate inputs (a zero variance, or no roots and no
/// case-deletion reference) yield zero with RootChoice::kZero.
RootSelection estimate_offdiag(const MaskedMatrix& m, Eigen::Index f1, Eigen::Index f2,
                               const GroupingView& grouping, double sigma11,
                               double sigma22);

}  // namespace dperc
