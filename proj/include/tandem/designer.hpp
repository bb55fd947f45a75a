#pragma once

// Cyclic person-by-person design of the whole tandem network: suffix
// products are refreshed once per outer iteration, then DMs 1..N-1 are
// redesigned in order against their restricted models, with the message
// distribution propagated forward after each update.

#include <cstdint>
#include <random>
#include <vector>

#include "tandem/core.hpp"
#include "tandem/markov.hpp"
#include "tandem/restricted.hpp"

namespace tandem {

struct DesignConfig {
  int dm_count = 2;            // N
  int hypothesis_count = 2;    // M
  std::vector<int> rates;      // bits per link; a single entry is broadcast to all N-1 links
  int iterations = 3;          // outer design cycles (K)
  double eta = 1e-6;           // per-sweep improvement threshold inside each DM
  std::uint64_t seed = 1;      // drives the DM-1 initialization
  bool early_stop = true;      // stop when a full cycle improves by less than 1e-12
  int max_sweeps = 10000;

  std::vector<int> link_rates() const {
    if (dm_count < 2) return {};
    std::vector<int> r = rates;
    if (r.size() == 1) r.assign(static_cast<std::size_t>(dm_count - 1), rates[0]);
    if (static_cast<int>(r.size()) != dm_count - 1)
      throw std::invalid_argument("design config: need one rate per link");
    return r;
  }

  void validate() const {
    if (dm_count < 1) throw std::invalid_argument("design config: need at least one DM");
    if (hypothesis_count < 2) throw std::invalid_argument("design config: need >= 2 hypotheses");
    if (iterations < 1) throw std::invalid_argument("design config: iterations must be >= 1");
    if (!(eta > 0.0)) throw std::invalid_argument("design config: eta must be positive");
    for (int r : link_rates())
      if (r < 1) throw std::invalid_argument("design config: rates must be >= 1 bit");
  }
};

/// Pass-through initialization: every intermediate DM forwards its incoming
/// message unchanged; DM 1 assigns each observation bin a uniformly random
/// output index drawn from mt19937_64(seed) (value % alphabet size), so a
/// given seed reproduces the same network bit for bit.
inline TandemNetwork initialize_network(const DesignConfig& config,
                                        const std::vector<DiscreteObservationModel>& obs_models,
                                        const Priors& priors) {
  config.validate();
  priors.validate();
  if (static_cast<int>(obs_models.size()) != config.dm_count)
    throw std::invalid_argument("initialize_network: need one observation model per DM");
  if (priors.hypothesis_count() != config.hypothesis_count)
    throw std::invalid_argument("initialize_network: hypothesis count mismatch");
  TandemNetwork net;
  net.priors = priors;
  net.observation_models = obs_models;
  if (config.dm_count >= 2) {
    const auto rates = config.link_rates();
    std::mt19937_64 rng(config.seed);
    DecisionFunction g0;
    g0.in_obs = obs_models[0].alphabet_size;
    g0.in_msg = 1;
    g0.out_msg = 1 << rates[0];
    g0.table.resize(static_cast<std::size_t>(g0.in_obs));
    for (int x = 0; x < g0.in_obs; ++x)
      g0.table[static_cast<std::size_t>(x)] = static_cast<int>(rng() % g0.out_msg);
    net.gammas.push_back(std::move(g0));
    for (int k = 1; k < config.dm_count - 1; ++k)
      net.gammas.push_back(
          pass_through(obs_models[k].alphabet_size, 1 << rates[k - 1], 1 << rates[k]));
  }
  net.validate();
  return net;
}

struct NetworkDesignResult {
  TandemNetwork network;
  double initial_error = 0.0;
  std::vector<double> outer_errors;              // network error after each outer iteration
  std::vector<std::vector<double>> per_dm_errors;  // per iteration, error after each DM update
  std::vector<std::vector<int>> sweep_counts;      // per iteration, sweeps spent on each DM
  double max_q_deviation = 0.0;
  int iterations_run = 0;

  double final_error() const {
    return outer_errors.empty() ? initial_error : outer_errors.back();
  }
};

/// Runs K full design cycles. Within a cycle the suffix products are the
/// ones computed at its start; because DMs are updated in ascending order,
/// each DM still sees the exact current state of its successors.
inline NetworkDesignResult design_network(const DesignConfig& config,
                                          const std::vector<DiscreteObservationModel>& obs_models,
                                          const Priors& priors) {
  NetworkDesignResult res;
  res.network = initialize_network(config, obs_models, priors);
  res.initial_error = network_error(res.network);
  const int n = config.dm_count;
  if (n == 1) {
    res.outer_errors.assign(static_cast<std::size_t>(config.iterations), res.initial_error);
    res.iterations_run = config.iterations;
    return res;
  }
  DmDesignOptions opts;
  opts.eta = config.eta;
  opts.max_sweeps = config.max_sweeps;
  double prev = res.initial_error;
  for (int k = 0; k < config.iterations; ++k) {
    const auto suffix = backward_products(res.network);
    MessageDistribution q_prev;
    std::vector<double> dm_errors;
    std::vector<int> sweeps;
    for (int l = 0; l < n - 1; ++l) {
      const RestrictedModel model =
          make_restricted_model(res.network, l, suffix, l > 0 ? &q_prev : nullptr);
      DmDesignResult dm = design_dm(model, res.network.gammas[l], opts);
      res.network.gammas[l] = std::move(dm.gamma);
      res.max_q_deviation = std::max(res.max_q_deviation, dm.max_q_deviation);
      sweeps.push_back(dm.sweeps);
      const HypothesisMatrix t =
          dm_transition_matrix(res.network.gammas[l], res.network.observation_models[l]);
      if (l == 0) {
        q_prev.q.assign(static_cast<std::size_t>(config.hypothesis_count), {1.0});
        q_prev = apply(t, q_prev);
      } else {
        q_prev = apply(t, q_prev);
      }
      dm_errors.push_back(network_error(res.network));
    }
    res.per_dm_errors.push_back(std::move(dm_errors));
    res.sweep_counts.push_back(std::move(sweeps));
    const double err = network_error(res.network);
    res.outer_errors.push_back(err);
    res.iterations_run = k + 1;
    if (config.early_stop && prev - err < 1e-12 && k + 1 < config.iterations) break;
    prev = err;
  }
  return res;
}

struct MultiplicationCount {
  unsigned long long exact = 0;     // full per-iteration count of the design cycle
  unsigned long long dominant = 0;  // leading term N * M * T * ||X||^2 * ||M||^4
};

/// Multiplication count for one outer design cycle under equal rates and
/// equal observation alphabets; T is the sweep count of the inner design.
inline MultiplicationCount multiplication_count(const DesignConfig& config, int obs_size,
                                                int msg_size, int sweeps) {
  config.validate();
  if (obs_size < 1 || msg_size < 1 || sweeps < 1)
    throw std::invalid_argument("multiplication_count: sizes must be positive");
  for (int r : config.link_rates())
    if ((1 << r) != msg_size)
      throw std::invalid_argument("multiplication_count: assumes equal rates matching msg_size");
  const unsigned long long n = static_cast<unsigned long long>(config.dm_count);
  const unsigned long long m = static_cast<unsigned long long>(config.hypothesis_count);
  const unsigned long long x = static_cast<unsigned long long>(obs_size);
  const unsigned long long v = static_cast<unsigned long long>(msg_size);
  const unsigned long long t = static_cast<unsigned long long>(sweeps);
  const unsigned long long suffix_loop = (n >= 2 ? n - 2 : 0) * m * v * v * v;
  const unsigned long long q_updates = (n >= 2 ? n - 2 : 0) * m * v * v;
  // One DM design: 2(1+T) M X V error evaluations, plus per-sweep candidate
  // scoring 3 M T X^2 V^3 + M T X^2 V^4.
  const unsigned long long c2 =
      2 * (1 + t) * m * x * v + 3 * m * t * x * x * v * v * v + m * t * x * x * v * v * v * v;
  MultiplicationCount out;
  out.exact = suffix_loop + q_updates + (n >= 1 ? n - 1 : 0) * c2;
  out.dominant = n * m * t * x * x * v * v * v * v;
  return out;
}

}  // namespace tandem
