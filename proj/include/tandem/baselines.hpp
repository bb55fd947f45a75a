#pragma once

// Closed-form comparison curves for binary antipodal signaling with equal
// priors: Swaszek's optimum rate-one recursion, Cover's two-state scheme,
// and the unconstrained linear detector (binary and M-ary). These are
// continuous-model formulas, deliberately not routed through any
// discretization.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace tandem {

/// Standard normal tail probability Q(x).
inline double q_tail(double x) { return 0.5 * std::erfc(x / 1.4142135623730951); }

namespace detail {
inline void check_baseline_args(int n, double a, double sigma) {
  if (n < 1) throw std::invalid_argument("baseline: need at least one DM");
  if (!(a > 0.0)) throw std::invalid_argument("baseline: amplitude must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("baseline: sigma must be positive");
}

// Shared error recursion for threshold-passing rate-one schemes:
// P(i) = Q((a+tau)/s) + P(i-1) [Q((a-tau)/s) - Q((a+tau)/s)], P(0) = 1/2.
inline double recursion_step(double prev, double tau, double a, double sigma) {
  const double hi = q_tail((a + tau) / sigma);
  const double lo = q_tail((a - tau) / sigma);
  return hi + prev * (lo - hi);
}
}  // namespace detail

/// Error probabilities P_E(1..N) of the optimum rate-one tandem chain for
/// antipodal +/-a signals in Gaussian noise with equal priors. The optimal
/// threshold at stage i is the log-likelihood-ratio point of the incoming
/// bit's error probability; the first stage tests at zero.
inline std::vector<double> swaszek_curve(int n, double a, double sigma = 1.0) {
  detail::check_baseline_args(n, a, sigma);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  double pe = 0.5;
  for (int i = 1; i <= n; ++i) {
    const double tau = (i == 1) ? 0.0 : (sigma * sigma / (2.0 * a)) * std::log((1.0 - pe) / pe);
    pe = detail::recursion_step(pe, tau, a, sigma);
    out.push_back(pe);
  }
  return out;
}

/// Cover's threshold magnitude sqrt(2 sigma^2 log10 i).
inline double cover_threshold(int i, double sigma = 1.0) {
  if (i < 1) throw std::invalid_argument("cover_threshold: index must be >= 1");
  return std::sqrt(2.0 * sigma * sigma * std::log10(static_cast<double>(i)));
}

/// Error probabilities P_E(1..N) of Cover's two-state dead-zone scheme: a
/// stage keeps the incoming bit inside [-tau, tau] and decides outside.
/// The first stage has no informative predecessor and tests at zero; stage
/// i >= 2 applies the (i+1)-indexed threshold, which is the schedule the
/// reference curves this library reproduces were computed with.
inline std::vector<double> cover_curve(int n, double a, double sigma = 1.0) {
  detail::check_baseline_args(n, a, sigma);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  double pe = 0.5;
  for (int i = 1; i <= n; ++i) {
    const double tau = (i == 1) ? 0.0 : cover_threshold(i + 1, sigma);
    pe = detail::recursion_step(pe, tau, a, sigma);
    out.push_back(pe);
  }
  return out;
}

/// Error probability of the unconstrained (infinite-rate) linear detector
/// for the equal-distance M-ary signal set spanning [-a, a]:
/// 2 (M-1)/M * Q(a sqrt(N) / (sigma (M-1))). For M = 2 this is exactly
/// Q(a sqrt(N) / sigma).
inline double linear_detector_error(int n, int m, double a, double sigma = 1.0) {
  detail::check_baseline_args(n, a, sigma);
  if (m < 2) throw std::invalid_argument("linear_detector_error: need >= 2 hypotheses");
  return (2.0 * (m - 1) / m) * q_tail(a * std::sqrt(static_cast<double>(n)) / (sigma * (m - 1)));
}

}  // namespace tandem
