#pragma once

// Discretized Gaussian observation models: equally spaced signal sets in
// additive unit-variance noise, binned over a finite interval into a
// DiscreteObservationModel. Antipodal signal pairs get bitwise-mirrored
// PMFs by construction.

#include <cmath>
#include <string>
#include <vector>

#include "tandem/core.hpp"

namespace tandem {

struct GaussianSpec {
  int hypotheses = 2;
  double amplitude = 1.0;  // signal set spans [-a, a]
  double sigma = 1.0;
  int bins = 128;
  double lo = 0.0, hi = 0.0;

  void validate() const {
    if (hypotheses < 2) throw std::invalid_argument("gaussian spec: need >= 2 hypotheses");
    if (bins < 2) throw std::invalid_argument("gaussian spec: need >= 2 bins");
    if (!(lo < hi)) throw std::invalid_argument("gaussian spec: empty interval");
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian spec: sigma must be positive");
    if (!(amplitude > 0.0)) throw std::invalid_argument("gaussian spec: amplitude must be positive");
  }
};

/// Spec over the symmetric interval [-a - pad*sigma, a + pad*sigma], which
/// covers every signal mean by at least pad standard deviations.
inline GaussianSpec make_gaussian_spec(int hypotheses, double amplitude, int bins = 128,
                                       double pad = 4.0, double sigma = 1.0) {
  GaussianSpec s;
  s.hypotheses = hypotheses;
  s.amplitude = amplitude;
  s.sigma = sigma;
  s.bins = bins;
  s.lo = -amplitude - pad * sigma;
  s.hi = amplitude + pad * sigma;
  return s;
}

/// Per-channel SNR in dB to signal amplitude: E = |a|^2 with sigma = 1.
inline double snr_to_amplitude(double e_db) { return std::pow(10.0, e_db / 20.0); }

/// Equally spaced signal means spanning [-a, a]. Built half-and-mirror so
/// antipodal pairs are exact negations in floating point.
inline std::vector<double> signal_set(int hypotheses, double amplitude) {
  if (hypotheses < 2) throw std::invalid_argument("signal_set: need >= 2 hypotheses");
  if (!(amplitude > 0.0)) throw std::invalid_argument("signal_set: amplitude must be positive");
  std::vector<double> s(static_cast<std::size_t>(hypotheses));
  for (int j = 0; j < hypotheses / 2; ++j) {
    const double v = -amplitude + (2.0 * amplitude * j) / (hypotheses - 1);
    s[static_cast<std::size_t>(j)] = v;
    s[static_cast<std::size_t>(hypotheses - 1 - j)] = -v;
  }
  if (hypotheses % 2 == 1) s[static_cast<std::size_t>(hypotheses / 2)] = 0.0;
  return s;
}

namespace detail {
inline double normal_tail(double x) { return 0.5 * std::erfc(x / 1.4142135623730951); }
}

/// Discretizes the Gaussian mixture model onto uniform bins. Each PMF is
/// renormalized to exactly 1 (the truncated tail mass is folded in
/// proportionally). For antipodal signal pairs the second PMF is the exact
/// bin reversal of the first.
inline DiscreteObservationModel discretize(const GaussianSpec& spec,
                                           std::vector<std::string>* warnings = nullptr) {
  spec.validate();
  const auto means = signal_set(spec.hypotheses, spec.amplitude);
  DiscreteObservationModel model;
  model.alphabet_size = spec.bins;
  model.pmfs.assign(static_cast<std::size_t>(spec.hypotheses),
                    std::vector<double>(static_cast<std::size_t>(spec.bins), 0.0));
  const double width = (spec.hi - spec.lo) / spec.bins;
  for (int j = 0; j < spec.hypotheses; ++j) {
    const double s = means[static_cast<std::size_t>(j)];
    if (warnings && (spec.lo > s - 3.0 * spec.sigma || spec.hi < s + 3.0 * spec.sigma))
      warnings->push_back("interval excludes signal mean " + std::to_string(s) +
                          " +/- 3 sigma; model remains valid but tails are coarse");
    // Mirror of an already-built antipodal partner: reuse it bin-reversed.
    int mirror = -1;
    for (int i = 0; i < j; ++i)
      if (means[static_cast<std::size_t>(i)] == -s) mirror = i;
    if (mirror >= 0) {
      for (int b = 0; b < spec.bins; ++b)
        model.pmfs[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)] =
            model.pmfs[static_cast<std::size_t>(mirror)][static_cast<std::size_t>(spec.bins - 1 - b)];
      continue;
    }
    auto& pmf = model.pmfs[static_cast<std::size_t>(j)];
    double total = 0.0;
    for (int b = 0; b < spec.bins; ++b) {
      const double a = (spec.lo + b * width - s) / spec.sigma;
      const double c = (spec.lo + (b + 1) * width - s) / spec.sigma;
      double mass = detail::normal_tail(a) - detail::normal_tail(c);
      if (mass < 0.0) mass = 0.0;
      pmf[static_cast<std::size_t>(b)] = mass;
      total += mass;
    }
    for (double& x : pmf) x /= total;
  }
  model.validate();
  return model;
}

}  // namespace tandem
