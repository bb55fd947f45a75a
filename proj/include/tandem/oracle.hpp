#pragma once

// Ground-truth generators: exhaustive design search on tiny instances and
// seeded Monte Carlo evaluation of a designed network. Both exist to check
// the analytic pipeline, so the Monte Carlo sampler draws from the same
// discretized PMFs the analytic path computes with.

#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "tandem/core.hpp"
#include "tandem/markov.hpp"

namespace tandem {

/// Raised when an exhaustive search would exceed its enumeration budget.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BruteForceResult {
  double error = 0.0;
  std::vector<DecisionFunction> gammas;  // one globally optimal assignment
  long double cardinality = 0.0L;        // decision-function tuples searched
};

/// Exhaustive search over every decision-function tuple of the chain,
/// fusion rule included; returns the global minimum error and the first
/// DM tuple attaining it (in odometer order). The inner minimum over
/// fusion tables is taken in closed form: for fixed DM tables the MAP rule
/// dominates every fusion assignment, so it contributes a factor to the
/// searched cardinality but costs one evaluation. Instances whose tuple
/// count exceeds the budget are refused.
inline BruteForceResult brute_force_design(const std::vector<DiscreteObservationModel>& obs_models,
                                           const Priors& priors, const std::vector<int>& rates,
                                           std::uint64_t budget = 10'000'000) {
  priors.validate();
  const int n = static_cast<int>(obs_models.size());
  if (n < 1) throw std::invalid_argument("brute_force_design: no observation models");
  if (n >= 2 && static_cast<int>(rates.size()) != n - 1)
    throw std::invalid_argument("brute_force_design: need one rate per link");

  TandemNetwork net;
  net.priors = priors;
  net.observation_models = obs_models;
  BruteForceResult res;
  res.cardinality = 1.0L;
  if (n == 1) {
    res.error = bayes_error(obs_models[0].pmfs, priors);
    return res;
  }
  for (int l = 0; l < n - 1; ++l) {
    const int in_msg = (l == 0) ? 1 : (1 << rates[l - 1]);
    const int out = 1 << rates[l];
    DecisionFunction g;
    g.in_obs = obs_models[l].alphabet_size;
    g.in_msg = in_msg;
    g.out_msg = out;
    g.table.assign(static_cast<std::size_t>(g.in_obs) * in_msg, 0);
    res.cardinality *= std::pow(static_cast<long double>(out),
                                static_cast<long double>(g.table.size()));
    net.gammas.push_back(std::move(g));
  }
  // fusion tables: M choices per (x_N, u_{N-1}) input
  res.cardinality *= std::pow(static_cast<long double>(priors.hypothesis_count()),
                              static_cast<long double>(obs_models[static_cast<std::size_t>(n - 1)].alphabet_size) *
                                  (1 << rates[static_cast<std::size_t>(n - 2)]));
  if (res.cardinality > static_cast<long double>(budget)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3Le", res.cardinality);
    throw InfeasibleError(std::string("brute_force_design: search space of ") + buf +
                          " decision-function tuples exceeds budget of " + std::to_string(budget));
  }

  res.error = 2.0;  // above any probability
  bool done = false;
  while (!done) {
    const double err = network_error(net);
    if (err < res.error) {
      res.error = err;
      res.gammas = net.gammas;
    }
    // odometer over all table entries of all decision functions
    done = true;
    for (auto& g : net.gammas) {
      bool carried = false;
      for (auto& cell : g.table) {
        if (++cell < g.out_msg) {
          done = false;
          carried = true;
          break;
        }
        cell = 0;
      }
      if (carried) break;
    }
  }
  return res;
}

struct MonteCarloResult {
  double empirical = 0.0;
  double ci_low = 0.0, ci_high = 0.0;  // 99% normal-approximation binomial interval
  std::uint64_t error_count = 0;
  std::uint64_t trials = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int sample_cdf(const std::vector<double>& cdf, double u) {
  int lo = 0, hi = static_cast<int>(cdf.size()) - 1;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (u < cdf[static_cast<std::size_t>(mid)]) hi = mid;
    else lo = mid + 1;
  }
  return lo;
}

}  // namespace detail

/// Empirical error probability by simulation: sample a hypothesis from the
/// priors, draw each DM's observation from its discretized PMF, run the
/// quantize-forward chain and the MAP fusion rule, and count mistakes.
/// Trials are split over a fixed set of 8 shards with seeds derived by
/// splitmix64(seed + shard), so the result is reproducible regardless of
/// how many threads execute the shards.
inline MonteCarloResult monte_carlo_error(const TandemNetwork& net, std::uint64_t trials,
                                          std::uint64_t seed) {
  net.validate();
  if (trials < 10'000)
    throw std::invalid_argument("monte_carlo_error: need at least 1e4 trials");
  const int n = net.dm_count();
  const int m = net.hypothesis_count();

  std::vector<double> prior_cdf(net.priors.weights.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < prior_cdf.size(); ++j) {
    acc += net.priors.weights[j];
    prior_cdf[j] = acc;
  }
  prior_cdf.back() = 1.0;
  std::vector<std::vector<std::vector<double>>> obs_cdf(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    obs_cdf[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
      auto& cdf = obs_cdf[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
      cdf.resize(static_cast<std::size_t>(net.observation_models[k].alphabet_size));
      double s = 0.0;
      for (std::size_t x = 0; x < cdf.size(); ++x) {
        s += net.observation_models[k].pmfs[j][x];
        cdf[x] = s;
      }
      cdf.back() = 1.0;
    }
  }

  // MAP fusion precomputed as a lookup table over the fusion center input.
  const int fc_obs = net.observation_models[n - 1].alphabet_size;
  const int fc_msg = (n >= 2) ? net.message_size(n - 2) : 1;
  std::vector<int> decide(static_cast<std::size_t>(fc_obs) * fc_msg);
  {
    MessageDistribution q;
    if (n >= 2) q = forward_q(net, n - 2);
    std::vector<double> scores(static_cast<std::size_t>(m));
    for (int x = 0; x < fc_obs; ++x)
      for (int u = 0; u < fc_msg; ++u) {
        for (int j = 0; j < m; ++j)
          scores[static_cast<std::size_t>(j)] =
              net.observation_models[n - 1].pmfs[j][x] * (n >= 2 ? q.q[j][u] : 1.0);
        decide[static_cast<std::size_t>(x) * fc_msg + u] = map_decision(scores, net.priors);
      }
  }

  constexpr int kShards = 8;
  std::uint64_t shard_errors[kShards] = {};
  auto run_shard = [&](int shard) {
    std::mt19937_64 rng(detail::splitmix64(seed + static_cast<std::uint64_t>(shard)));
    const std::uint64_t count = trials / kShards + (shard == 0 ? trials % kShards : 0);
    std::uint64_t errors = 0;
    for (std::uint64_t t = 0; t < count; ++t) {
      const int h = detail::sample_cdf(prior_cdf, detail::uniform01(rng));
      int u = 0;
      for (int k = 0; k < n - 1; ++k) {
        const int x =
            detail::sample_cdf(obs_cdf[static_cast<std::size_t>(k)][static_cast<std::size_t>(h)],
                               detail::uniform01(rng));
        u = net.gammas[k](x, u);
      }
      const int xn =
          detail::sample_cdf(obs_cdf[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(h)],
                             detail::uniform01(rng));
      if (decide[static_cast<std::size_t>(xn) * fc_msg + u] != h) ++errors;
    }
    shard_errors[shard] = errors;
  };
  {
    std::vector<std::thread> pool;
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (hw >= 2 && trials >= 100'000) {
      for (int s = 0; s < kShards; ++s) pool.emplace_back(run_shard, s);
      for (auto& th : pool) th.join();
    } else {
      for (int s = 0; s < kShards; ++s) run_shard(s);
    }
  }

  MonteCarloResult out;
  out.trials = trials;
  for (int s = 0; s < kShards; ++s) out.error_count += shard_errors[s];
  out.empirical = static_cast<double>(out.error_count) / static_cast<double>(trials);
  const double z = 2.5758293035489004;  // 99.5th percentile of the standard normal
  const double half =
      z * std::sqrt(out.empirical * (1.0 - out.empirical) / static_cast<double>(trials));
  out.ci_low = std::max(0.0, out.empirical - half);
  out.ci_high = std::min(1.0, out.empirical + half);
  return out;
}

}  // namespace tandem
