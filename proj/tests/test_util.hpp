#pragma once

// Shared helpers for the test suites: seeded random models and networks,
// plus naive reference implementations kept independent of the library's
// optimized paths.

#include <random>
#include <vector>

#include "tandem/core.hpp"
#include "tandem/markov.hpp"

namespace testutil {

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::vector<double> random_pmf(std::mt19937_64& rng, int size) {
  std::vector<double> p(static_cast<std::size_t>(size));
  double total = 0.0;
  for (auto& x : p) {
    x = -std::log(1.0 - uniform01(rng));  // Exp(1), Dirichlet(1,...,1) after normalizing
    total += x;
  }
  for (auto& x : p) x /= total;
  // force exact normalization so internal tolerances are exercised, not masked
  double s = 0.0;
  for (double x : p) s += x;
  p.back() += 1.0 - s;
  return p;
}

inline tandem::DiscreteObservationModel random_model(std::mt19937_64& rng, int hypotheses,
                                                     int alphabet) {
  tandem::DiscreteObservationModel m;
  m.alphabet_size = alphabet;
  for (int j = 0; j < hypotheses; ++j) m.pmfs.push_back(random_pmf(rng, alphabet));
  return m;
}

inline tandem::DecisionFunction random_gamma(std::mt19937_64& rng, int in_obs, int in_msg,
                                             int out_msg) {
  tandem::DecisionFunction g;
  g.in_obs = in_obs;
  g.in_msg = in_msg;
  g.out_msg = out_msg;
  g.table.resize(static_cast<std::size_t>(in_obs) * in_msg);
  for (auto& v : g.table) v = static_cast<int>(rng() % static_cast<std::uint64_t>(out_msg));
  return g;
}

inline tandem::Priors random_priors(std::mt19937_64& rng, int hypotheses) {
  tandem::Priors p;
  p.weights = random_pmf(rng, hypotheses);
  return p;
}

/// Random fully-specified network: per-DM alphabets in [2, max_obs], equal
/// message rate across links.
inline tandem::TandemNetwork random_network(std::mt19937_64& rng, int hypotheses, int dms,
                                            int max_obs, int msg_size) {
  tandem::TandemNetwork net;
  net.priors = random_priors(rng, hypotheses);
  for (int k = 0; k < dms; ++k) {
    const int alphabet = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_obs - 1));
    net.observation_models.push_back(random_model(rng, hypotheses, alphabet));
  }
  for (int k = 0; k + 1 < dms; ++k)
    net.gammas.push_back(random_gamma(rng, net.observation_models[k].alphabet_size,
                                      k == 0 ? 1 : msg_size, msg_size));
  return net;
}

/// Left-to-right product of the per-DM transition matrices of DMs l+2..N-1
/// (1-based), i.e. the chain seen by the output of DM l+1. Deliberately a
/// direct dense evaluation, not the backward recursion.
inline tandem::HypothesisMatrix naive_suffix_product(const tandem::TandemNetwork& net, int l) {
  const int n = net.dm_count();
  tandem::HypothesisMatrix prod =
      tandem::HypothesisMatrix::identity(net.message_size(l), net.hypothesis_count());
  for (int k = l + 1; k <= n - 2; ++k) {
    const auto t = tandem::dm_transition_matrix(net.gammas[k], net.observation_models[k]);
    // prod := t * prod, accumulated left to right
    tandem::HypothesisMatrix next;
    next.rows = t.rows;
    next.cols = prod.cols;
    next.mats.assign(static_cast<std::size_t>(net.hypothesis_count()),
                     std::vector<double>(static_cast<std::size_t>(t.rows) * prod.cols, 0.0));
    for (int j = 0; j < net.hypothesis_count(); ++j)
      for (int c = 0; c < prod.cols; ++c)
        for (int m = 0; m < t.cols; ++m)
          for (int r = 0; r < t.rows; ++r)
            next.at(j, r, c) += t.at(j, r, m) * prod.at(j, m, c);
    prod = next;
  }
  return prod;
}

inline double max_abs_diff(const tandem::HypothesisMatrix& a, const tandem::HypothesisMatrix& b) {
  double worst = 0.0;
  for (int j = 0; j < a.hypothesis_count(); ++j)
    for (std::size_t i = 0; i < a.mats[static_cast<std::size_t>(j)].size(); ++i)
      worst = std::max(worst, std::abs(a.mats[static_cast<std::size_t>(j)][i] -
                                       b.mats[static_cast<std::size_t>(j)][i]));
  return worst;
}

}  // namespace testutil
