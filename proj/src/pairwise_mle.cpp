#include "dperc/pairwise_mle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dperc {

namespace {

// Case-deletion fallback values are clamped to this fraction of the
// admissible bound so the result stays strictly inside the interval.
constexpr double kClampFactor = 0.999;

void check_variances(double sigma11, double sigma22) {
  if (!(sigma11 > 0.0) || !(sigma22 > 0.0)) {
    throw std::invalid_argument("variance plug-ins must be positive");
  }
}

// One Newton step on the rescaled cubic q(y) = -A y^3 + r y^2 + c y + r.
double polish(double y, double a, double r, double c) {
  const double f = ((-a * y + r) * y + c) * y + r;
  const double df = (-3.0 * a * y + 2.0 * r) * y + c;
  if (std::abs(df) > 1e-300) {
    const double step = f / df;
    if (std::isfinite(step)) y -= step;
  }
  return y;
}

}  // namespace

GroupingView GroupingView::of(std::span<const int> codes, int groups) {
  if (groups < 1) throw std::invalid_argument("GroupingView: group count must be positive");
  for (const int c : codes) {
    if (c < 0 || c >= groups) throw std::invalid_argument("GroupingView: code out of range");
  }
  return {codes.data(), static_cast<Eigen::Index>(codes.size()), groups};
}

PairStats compute_pair_stats(const MaskedMatrix& m, Eigen::Index f1, Eigen::Index f2,
                             const GroupingView& grouping) {
  if (grouping.n != m.rows()) {
    throw std::invalid_argument("compute_pair_stats: grouping length mismatch");
  }
  PairStats st;
  st.groups.resize(static_cast<std::size_t>(grouping.groups));
  std::vector<double> sum1(st.groups.size(), 0.0), sum2(st.groups.size(), 0.0);

  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const auto g = static_cast<std::size_t>(grouping.group_of(r));
    GroupPairStats& gs = st.groups[g];
    const bool o1 = m.observed(r, f1);
    const bool o2 = m.observed(r, f2);
    if (o1) {
      ++gs.obs1;
      sum1[g] += m.values(r, f1);
    }
    if (o2) {
      ++gs.obs2;
      sum2[g] += m.values(r, f2);
    }
    if (o1 && o2) ++gs.complete;
  }
  for (std::size_t g = 0; g < st.groups.size(); ++g) {
    GroupPairStats& gs = st.groups[g];
    if (gs.obs1 > 0) gs.mean1 = sum1[g] / static_cast<double>(gs.obs1);
    if (gs.obs2 > 0) gs.mean2 = sum2[g] / static_cast<double>(gs.obs2);
    st.complete_total += gs.complete;
  }

  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (!(m.observed(r, f1) && m.observed(r, f2))) continue;
    const GroupPairStats& gs = st.groups[static_cast<std::size_t>(grouping.group_of(r))];
    const double d1 = m.values(r, f1) - gs.mean1;
    const double d2 = m.values(r, f2) - gs.mean2;
    st.s11 += d1 * d1;
    st.s12 += d1 * d2;
    st.s22 += d2 * d2;
  }
  return st;
}

double eta(double sigma12, const PairStats& stats, double sigma11, double sigma22) {
  check_variances(sigma11, sigma22);
  const double t = sigma22 - sigma12 * sigma12 / sigma11;
  if (!(t > 0.0)) {
    throw std::domain_error("eta: sigma12 outside the admissible interval");
  }
  const double a = static_cast<double>(stats.complete_total);
  const double ratio = sigma12 / sigma11;
  const double q = stats.s22 - 2.0 * ratio * stats.s12 + ratio * ratio * stats.s11;
  return -0.5 * a * std::log(t) - q / (2.0 * t);
}

std::vector<double> solve_sigma12_cubic(const PairStats& stats, double sigma11,
                                        double sigma22) {
  check_variances(sigma11, sigma22);
  if (stats.complete_total < 1) {
    throw std::invalid_argument("solve_sigma12_cubic: no complete rows (degenerate cubic)");
  }

  // Rescale x = bound * y with bound = sqrt(sigma11 sigma22). Dividing P by
  // bound * sigma11 * sigma22 gives coefficients of comparable magnitude
  // regardless of the data's units:
  //   q(y) = -A y^3 + r y^2 + (A - s11/sigma11 - s22/sigma22) y + r,
  //   r = s12 / bound.
  const double bound = std::sqrt(sigma11 * sigma22);
  const double a = static_cast<double>(stats.complete_total);
  const double r = stats.s12 / bound;
  const double c = a - stats.s11 / sigma11 - stats.s22 / sigma22;

  // Monic form y^3 + B y^2 + C y + D.
  const double big_b = -r / a;
  const double big_c = -c / a;
  const double big_d = -r / a;

  // Depressed cubic t^3 + p t + q via y = t - B/3.
  const double p = big_c - big_b * big_b / 3.0;
  const double q = 2.0 * big_b * big_b * big_b / 27.0 - big_b * big_c / 3.0 + big_d;
  const double shift = -big_b / 3.0;
  const double disc = q * q / 4.0 + p * p * p / 27.0;

  std::vector<double> roots;
  if (disc > 0.0) {
    // One real root; evaluate the dominant cube root first for stability.
    const double s = std::sqrt(disc);
    const double u = std::cbrt(-q / 2.0 + s);
    const double v = std::cbrt(-q / 2.0 - s);
    roots.push_back(u + v + shift);
  } else if (p == 0.0) {
    roots.push_back(shift);  // triple root
  } else {
    // Three real roots (Vieté's trigonometric form).
    const double mag = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * mag), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      roots.push_back(mag * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) + shift);
    }
  }

  for (double& y : roots) y = polish(y, a, r, c);
  std::sort(roots.begin(), roots.end());

  std::vector<double> out;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (const double y : roots) {
    if (!std::isfinite(y)) continue;
    if (std::isfinite(prev) && std::abs(y - prev) <= 1e-8) continue;  // numerically repeated root
    prev = y;
    if (y * y < 1.0) out.push_back(y * bound);
  }
  return out;
}

std::optional<double> case_deletion_sigma12(const MaskedMatrix& m, Eigen::Index f1,
                                            Eigen::Index f2, const GroupingView& grouping) {
  if (grouping.n != m.rows()) {
    throw std::invalid_argument("case_deletion_sigma12: grouping length mismatch");
  }
  const auto groups = static_cast<std::size_t>(grouping.groups);
  std::vector<double> sum1(groups, 0.0), sum2(groups, 0.0);
  std::vector<std::int64_t> count(groups, 0);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (!(m.observed(r, f1) && m.observed(r, f2))) continue;
    const auto g = static_cast<std::size_t>(grouping.group_of(r));
    sum1[g] += m.values(r, f1);
    sum2[g] += m.values(r, f2);
    ++count[g];
  }
  std::int64_t total = 0;
  for (const auto c : count) total += c;
  if (total < 2) return std::nullopt;

  std::vector<double> mean1(groups, 0.0), mean2(groups, 0.0);
  for (std::size_t g = 0; g < groups; ++g) {
    if (count[g] > 0) {
      mean1[g] = sum1[g] / static_cast<double>(count[g]);
      mean2[g] = sum2[g] / static_cast<double>(count[g]);
    }
  }
  double cross = 0.0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (!(m.observed(r, f1) && m.observed(r, f2))) continue;
    const auto g = static_cast<std::size_t>(grouping.group_of(r));
    cross += (m.values(r, f1) - mean1[g]) * (m.values(r, f2) - mean2[g]);
  }
  return cross / static_cast<double>(total);
}

RootSelection select_root(std::vector<double> candidates,
                          std::optional<double> case_deletion,
                          const std::function<double(double)>& eta_fn) {
  if (candidates.empty()) {
    throw std::invalid_argument("select_root: candidate set is empty");
  }
  RootSelection sel;
  sel.candidates = std::move(candidates);
  sel.case_deletion = case_deletion;
  sel.eta_values.reserve(sel.candidates.size());
  for (const double c : sel.candidates) sel.eta_values.push_back(eta_fn(c));

  std::size_t best = 0;
  if (case_deletion) {
    for (std::size_t i = 1; i < sel.candidates.size(); ++i) {
      const double di = std::abs(sel.candidates[i] - *case_deletion);
      const double db = std::abs(sel.candidates[best] - *case_deletion);
      if (di < db || (di == db && sel.eta_values[i] > sel.eta_values[best])) best = i;
    }
    sel.choice = RootChoice::kNearestCaseDeletion;
  } else {
    for (std::size_t i = 1; i < sel.candidates.size(); ++i) {
      if (sel.eta_values[i] > sel.eta_values[best]) best = i;
    }
    sel.choice = RootChoice::kMaxEta;
  }
  sel.chosen = sel.candidates[best];
  return sel;
}

RootSelection estimate_offdiag(const MaskedMatrix& m, Eigen::Index f1, Eigen::Index f2,
                               const GroupingView& grouping, double sigma11,
                               double sigma22) {
  RootSelection sel;
  sel.case_deletion = case_deletion_sigma12(m, f1, f2, grouping);

  // A constant column has zero covariance with everything; nothing to solve.
  if (!(sigma11 > 0.0) || !(sigma22 > 0.0)) return sel;

  const PairStats stats = compute_pair_stats(m, f1, f2, grouping);
  if (stats.complete_total >= 1) {
    std::vector<double> roots = solve_sigma12_cubic(stats, sigma11, sigma22);
    if (!roots.empty()) {
      const auto cd = sel.case_deletion;
      return select_root(std::move(roots), cd, [&](double x) {
        return eta(x, stats, sigma11, sigma22);
      });
    }
  }
  if (sel.case_deletion) {
    const double bound = kClampFactor * std::sqrt(sigma11 * sigma22);
    sel.chosen = std::clamp(*sel.case_deletion, -bound, bound);
    sel.choice = RootChoice::kCaseDeletionClamped;
  }
  return sel;
}

}  // namespace dperc
