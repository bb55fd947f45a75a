#pragma once

// Person-by-person design of a single DM inside its restricted model: the
// DM under design sees a composite observation, everything between it and
// the fusion center is collapsed into one hypothesis-dependent discrete
// channel, and the fusion center applies the MAP rule. Candidate index
// reassignments are scored through a rank-1 update of the message PMF, so
// one candidate costs a scan over the fusion center's alphabet instead of
// a full network rebuild.

#include <cstdint>
#include <limits>
#include <vector>

#include "tandem/core.hpp"
#include "tandem/markov.hpp"

namespace tandem {

/// Equivalent two-node problem for designing one DM.
struct RestrictedModel {
  int hypotheses = 0;
  int input_size = 0;   // composite input alphabet ||Y_l||
  int in_obs = 0;       // factorization: input y = x * in_msg + u
  int in_msg = 1;
  int out_size = 0;     // output alphabet ||M_l||
  int fc_obs = 0;       // fusion center observation alphabet ||X_N||
  int fc_msg = 0;       // fusion center incoming message alphabet ||M_{N-1}||

  std::vector<double> priors;
  std::vector<std::vector<double>> input_pmf;  // [j][y], normalized per hypothesis
  std::vector<std::vector<double>> fc_pmf;     // [j][x_N]
  std::vector<std::vector<double>> channel;    // [j][u * out_size + n] = P_j(u_fc = u | u_l = n)

  // Scoring caches, built by finalize().
  std::vector<double> fc_weighted;       // [x * M + j] = prior_j * P_j(x_N)
  std::vector<std::uint8_t> rows_equal;  // [(nu * out_size + nu2) * fc_msg + u]
  // Two-hypothesis fast path: fusion observations sorted by decreasing
  // likelihood ratio w0/w1, with prefix sums of both weights.
  bool sorted_path = false;
  std::vector<double> lr_sorted;
  std::vector<double> prefix_w0, prefix_w1;

  double channel_row(int j, int u, int n) const {
    return channel[j][static_cast<std::size_t>(u) * out_size + n];
  }

  void finalize() {
    const int m = hypotheses;
    fc_weighted.resize(static_cast<std::size_t>(fc_obs) * m);
    for (int x = 0; x < fc_obs; ++x)
      for (int j = 0; j < m; ++j)
        fc_weighted[static_cast<std::size_t>(x) * m + j] = priors[j] * fc_pmf[j][x];

    rows_equal.assign(static_cast<std::size_t>(out_size) * out_size * fc_msg, 0);
    for (int nu = 0; nu < out_size; ++nu)
      for (int nu2 = 0; nu2 < out_size; ++nu2)
        for (int u = 0; u < fc_msg; ++u) {
          bool eq = true;
          for (int j = 0; j < m && eq; ++j)
            eq = channel_row(j, u, nu) == channel_row(j, u, nu2);
          rows_equal[(static_cast<std::size_t>(nu) * out_size + nu2) * fc_msg + u] = eq ? 1 : 0;
        }

    sorted_path = false;
    if (m == 2) {
      // For two hypotheses, sum_x max(w0 v0, w1 v1) splits at the ratio
      // threshold v1/v0; with the ratios sorted once, each evaluation is a
      // binary search plus two prefix-sum lookups.
      std::vector<int> order;
      order.reserve(static_cast<std::size_t>(fc_obs));
      for (int x = 0; x < fc_obs; ++x) {
        const double w0 = fc_weighted[2 * static_cast<std::size_t>(x)];
        const double w1 = fc_weighted[2 * static_cast<std::size_t>(x) + 1];
        if (w0 > 0.0 || w1 > 0.0) order.push_back(x);
      }
      auto ratio = [&](int x) {
        const double w0 = fc_weighted[2 * static_cast<std::size_t>(x)];
        const double w1 = fc_weighted[2 * static_cast<std::size_t>(x) + 1];
        return w1 == 0.0 ? std::numeric_limits<double>::infinity() : w0 / w1;
      };
      std::sort(order.begin(), order.end(), [&](int a, int b) { return ratio(a) > ratio(b); });
      lr_sorted.resize(order.size());
      prefix_w0.assign(order.size() + 1, 0.0);
      prefix_w1.assign(order.size() + 1, 0.0);
      for (std::size_t i = 0; i < order.size(); ++i) {
        lr_sorted[i] = ratio(order[i]);
        prefix_w0[i + 1] = prefix_w0[i] + fc_weighted[2 * static_cast<std::size_t>(order[i])];
        prefix_w1[i + 1] = prefix_w1[i] + fc_weighted[2 * static_cast<std::size_t>(order[i]) + 1];
      }
      sorted_path = true;
    }
  }

  void validate() const {
    if (hypotheses < 2) throw std::invalid_argument("restricted model: need >= 2 hypotheses");
    if (input_size != in_obs * in_msg)
      throw std::invalid_argument("restricted model: input factorization mismatch");
    if (out_size < 1 || fc_obs < 1 || fc_msg < 1)
      throw std::invalid_argument("restricted model: empty alphabet");
    for (int j = 0; j < hypotheses; ++j) {
      detail::check_pmf(input_pmf[j], kIngestTol, "restricted input pmf");
      detail::check_pmf(fc_pmf[j], kIngestTol, "restricted fc pmf");
      for (int n = 0; n < out_size; ++n) {
        double s = 0.0;
        for (int u = 0; u < fc_msg; ++u) s += channel_row(j, u, n);
        if (std::abs(s - 1.0) > kInternalTol)
          throw std::invalid_argument("restricted model: channel not column-stochastic");
      }
    }
  }
};

namespace detail {

template <int M>
inline double mix_kernel(const double* w, int n, const double* v) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double* wi = w + static_cast<std::size_t>(i) * M;
    double best = wi[0] * v[0];
    for (int j = 1; j < M; ++j) best = std::max(best, wi[j] * v[j]);
    acc += best;
  }
  return acc;
}

inline double mix_kernel_dyn(const double* w, int n, int m, const double* v) {
  switch (m) {
    case 2: return mix_kernel<2>(w, n, v);
    case 3: return mix_kernel<3>(w, n, v);
    case 4: return mix_kernel<4>(w, n, v);
    default: {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        const double* wi = w + static_cast<std::size_t>(i) * m;
        double best = 0.0;
        for (int j = 0; j < m; ++j) best = std::max(best, wi[j] * v[j]);
        acc += best;
      }
      return acc;
    }
  }
}

// sum_x max_j fc_weighted_j(x) * v_j for one fusion-center message value.
inline double fc_scan(const RestrictedModel& m, const double* v) {
  if (m.sorted_path) {
    double v0 = v[0] > 0.0 ? v[0] : 0.0;  // rank-1 updates can leave tiny negative dust
    double v1 = v[1] > 0.0 ? v[1] : 0.0;
    const std::size_t total = m.lr_sorted.size();
    if (v0 == 0.0) return v1 * m.prefix_w1[total];
    if (v1 == 0.0) return v0 * m.prefix_w0[total];
    const double t = v1 / v0;
    // First index with ratio < t; everything before it takes the w0 side.
    const std::size_t k = static_cast<std::size_t>(
        std::lower_bound(m.lr_sorted.begin(), m.lr_sorted.end(), t,
                         [](double r, double thr) { return r >= thr; }) -
        m.lr_sorted.begin());
    return v0 * m.prefix_w0[k] + v1 * (m.prefix_w1[total] - m.prefix_w1[k]);
  }
  return mix_kernel_dyn(m.fc_weighted.data(), m.fc_obs, m.hypotheses, v);
}

}  // namespace detail

/// Mutable state while designing one DM: its decision function, the message
/// PMF over its output alphabet (maintained by rank-1 updates), the induced
/// PMF at the fusion center, and the current error probability.
struct DesignState {
  DecisionFunction gamma;
  std::vector<std::vector<double>> q;    // [j][out]
  std::vector<std::vector<double>> fcq;  // [j][fc_msg] = channel * q
  double error = 0.0;

  // scratch buffers for the sweep, not part of the logical state
  std::vector<double> scratch_v;
  std::vector<double> scratch_bc;
  std::vector<double> scratch_p;
};

/// Rebuilds q from scratch from the decision function.
inline std::vector<std::vector<double>> rebuild_q(const RestrictedModel& model,
                                                  const DecisionFunction& gamma) {
  std::vector<std::vector<double>> q(
      model.hypotheses, std::vector<double>(static_cast<std::size_t>(model.out_size), 0.0));
  for (int y = 0; y < model.input_size; ++y) {
    const int v = gamma.table[y];
    for (int j = 0; j < model.hypotheses; ++j) q[j][v] += model.input_pmf[j][y];
  }
  return q;
}

inline std::vector<std::vector<double>> channel_apply(const RestrictedModel& model,
                                                      const std::vector<std::vector<double>>& q) {
  std::vector<std::vector<double>> fcq(
      model.hypotheses, std::vector<double>(static_cast<std::size_t>(model.fc_msg), 0.0));
  for (int j = 0; j < model.hypotheses; ++j)
    for (int u = 0; u < model.fc_msg; ++u) {
      double s = 0.0;
      for (int n = 0; n < model.out_size; ++n) s += model.channel_row(j, u, n) * q[j][n];
      fcq[j][u] = s;
    }
  return fcq;
}

/// Probability of a correct MAP decision at the fusion center for the
/// current state; the error probability is 1 minus this.
inline double current_score(const RestrictedModel& model, const DesignState& state) {
  std::vector<double> v(static_cast<std::size_t>(model.hypotheses));
  double score = 0.0;
  for (int u = 0; u < model.fc_msg; ++u) {
    for (int j = 0; j < model.hypotheses; ++j) v[static_cast<std::size_t>(j)] = state.fcq[j][u];
    score += detail::fc_scan(model, v.data());
  }
  return score;
}

inline DesignState make_design_state(const RestrictedModel& model, DecisionFunction gamma) {
  if (static_cast<int>(gamma.table.size()) != model.input_size || gamma.out_msg != model.out_size)
    throw std::invalid_argument("design state: decision function shape mismatch");
  DesignState s;
  s.gamma = std::move(gamma);
  s.q = rebuild_q(model, s.gamma);
  s.fcq = channel_apply(model, s.q);
  s.error = 1.0 - current_score(model, s);
  s.scratch_v.resize(static_cast<std::size_t>(model.hypotheses));
  s.scratch_bc.resize(static_cast<std::size_t>(model.fc_msg));
  s.scratch_p.resize(static_cast<std::size_t>(model.hypotheses));
  return s;
}

/// Score of assigning candidate index nu2 to input y while every other
/// assignment stays fixed: the probability of a correct final decision if
/// the change were applied. For nu2 equal to the incumbent this is exactly
/// 1 - current error.
inline double candidate_score(const RestrictedModel& model, const DesignState& state, int y,
                              int nu2) {
  const int nu = state.gamma.table[y];
  const int m = model.hypotheses;
  double score = current_score(model, state);
  if (nu2 == nu) return score;
  std::vector<double> v(static_cast<std::size_t>(m)), base(static_cast<std::size_t>(m));
  const std::uint8_t* eq =
      &model.rows_equal[(static_cast<std::size_t>(nu) * model.out_size + nu2) * model.fc_msg];
  for (int u = 0; u < model.fc_msg; ++u) {
    if (eq[u]) continue;
    for (int j = 0; j < m; ++j) {
      const double p = model.input_pmf[j][y];
      base[static_cast<std::size_t>(j)] = state.fcq[j][u];
      v[static_cast<std::size_t>(j)] =
          state.fcq[j][u] + p * (model.channel_row(j, u, nu2) - model.channel_row(j, u, nu));
    }
    score += detail::fc_scan(model, v.data()) - detail::fc_scan(model, base.data());
  }
  return score;
}

/// Reassigns input y to its best index (incumbent kept on ties, lowest
/// index among strictly-better candidates otherwise) and applies the rank-1
/// PMF updates. Returns true when the assignment changed. Inputs with zero
/// mass under every hypothesis keep their incumbent index.
inline bool reassign_input(const RestrictedModel& model, DesignState& state, int y) {
  const int m = model.hypotheses;
  const int v_out = model.out_size;
  double* p = state.scratch_p.data();
  double* v = state.scratch_v.data();
  double* bc = state.scratch_bc.data();
  bool any = false;
  for (int j = 0; j < m; ++j) {
    p[j] = model.input_pmf[j][y];
    any = any || p[j] != 0.0;
  }
  const int nu = state.gamma.table[y];
  // Base contribution per fusion-center message, reused by every candidate
  // whose channel rows coincide with the incumbent's.
  double base_total = 0.0;
  for (int u = 0; u < model.fc_msg; ++u) {
    for (int j = 0; j < m; ++j) v[j] = state.fcq[j][u];
    bc[u] = detail::fc_scan(model, v);
    base_total += bc[u];
  }
  state.error = 1.0 - base_total;
  if (!any) return false;
  double best_score = base_total;
  int best = nu;
  for (int nu2 = 0; nu2 < v_out; ++nu2) {
    if (nu2 == nu) continue;
    const std::uint8_t* eq =
        &model.rows_equal[(static_cast<std::size_t>(nu) * v_out + nu2) * model.fc_msg];
    double score = base_total;
    for (int u = 0; u < model.fc_msg; ++u) {
      if (eq[u]) continue;
      for (int j = 0; j < m; ++j)
        v[j] = state.fcq[j][u] + p[j] * (model.channel_row(j, u, nu2) - model.channel_row(j, u, nu));
      score += detail::fc_scan(model, v) - bc[u];
    }
    if (score > best_score) {
      best_score = score;
      best = nu2;
    }
  }
  if (best == nu) return false;
  state.error = 1.0 - best_score;
  state.gamma.table[y] = best;
  for (int j = 0; j < m; ++j) {
    state.q[j][nu] -= p[j];
    state.q[j][best] += p[j];
    for (int u = 0; u < model.fc_msg; ++u)
      state.fcq[j][u] += p[j] * (model.channel_row(j, u, best) - model.channel_row(j, u, nu));
  }
  return true;
}

struct DmDesignOptions {
  double eta = 1e-6;
  int max_sweeps = 10000;  // safety net; descent over a finite space terminates on its own
};

struct DmDesignResult {
  DecisionFunction gamma;
  int sweeps = 0;
  std::vector<double> error_trace;  // error before the first sweep, then after each sweep
  double max_q_deviation = 0.0;     // worst gap between incremental and rebuilt q
};

/// Full person-by-person design of one DM: sweeps over all composite inputs
/// in lexicographic order (observation-major) until one sweep improves the
/// error by at most eta.
inline DmDesignResult design_dm(const RestrictedModel& model, const DecisionFunction& gamma_init,
                                const DmDesignOptions& opts = {}) {
  if (!(opts.eta > 0.0)) throw std::invalid_argument("design_dm: eta must be positive");
  DesignState state = make_design_state(model, gamma_init);
  DmDesignResult res;
  res.error_trace.push_back(state.error);
  double pe = state.error;
  while (res.sweeps < opts.max_sweeps) {
    // Keep the fusion-center PMF in sync with q at sweep granularity so
    // rank-1 drift cannot accumulate across long designs.
    state.fcq = channel_apply(model, state.q);
    for (int y = 0; y < model.input_size; ++y) reassign_input(model, state, y);
    ++res.sweeps;
    const double pe_new = 1.0 - current_score(model, state);
    const auto fresh = rebuild_q(model, state.gamma);
    for (int j = 0; j < model.hypotheses; ++j)
      for (int n = 0; n < model.out_size; ++n)
        res.max_q_deviation = std::max(res.max_q_deviation, std::abs(fresh[j][n] - state.q[j][n]));
    res.error_trace.push_back(pe_new);
    const double improvement = pe - pe_new;
    pe = pe_new;
    if (!(improvement > opts.eta)) break;
  }
  res.gamma = std::move(state.gamma);
  return res;
}

/// Builds the restricted model for DM l (0-based, l < N-1) from precomputed
/// suffix products and the message distribution entering DM l.
inline RestrictedModel make_restricted_model(const TandemNetwork& net, int l,
                                             const std::vector<HypothesisMatrix>& suffix,
                                             const MessageDistribution* q_prev) {
  const int n = net.dm_count();
  const int m = net.hypothesis_count();
  RestrictedModel rm;
  rm.hypotheses = m;
  rm.priors = net.priors.weights;
  rm.in_obs = net.observation_models[l].alphabet_size;
  rm.in_msg = (l == 0) ? 1 : net.message_size(l - 1);
  rm.input_size = rm.in_obs * rm.in_msg;
  rm.out_size = net.message_size(l);
  rm.fc_obs = net.observation_models[n - 1].alphabet_size;
  rm.fc_msg = net.message_size(n - 2);
  rm.fc_pmf = net.observation_models[n - 1].pmfs;
  rm.input_pmf.assign(m, std::vector<double>(static_cast<std::size_t>(rm.input_size), 0.0));
  for (int j = 0; j < m; ++j) {
    if (l == 0) {
      rm.input_pmf[j] = net.observation_models[0].pmfs[j];
    } else {
      for (int x = 0; x < rm.in_obs; ++x)
        for (int u = 0; u < rm.in_msg; ++u)
          rm.input_pmf[j][static_cast<std::size_t>(x) * rm.in_msg + u] =
              net.observation_models[l].pmfs[j][x] * q_prev->q[j][u];
    }
  }
  const HypothesisMatrix& ch = suffix[l];
  rm.channel.assign(m, std::vector<double>(static_cast<std::size_t>(rm.fc_msg) * rm.out_size));
  for (int j = 0; j < m; ++j)
    for (int u = 0; u < rm.fc_msg; ++u)
      for (int c = 0; c < rm.out_size; ++c)
        rm.channel[j][static_cast<std::size_t>(u) * rm.out_size + c] = ch.at(j, u, c);
  rm.finalize();
  return rm;
}

/// Convenience overload that computes the suffix products and incoming
/// message distribution itself. The fusion center (l = N-1) has no designed
/// table; asking for its restricted model is invalid.
inline RestrictedModel build_restricted_model(const TandemNetwork& net, int l) {
  net.validate();
  if (l < 0 || l >= net.dm_count() - 1)
    throw std::invalid_argument(
        "build_restricted_model: the fusion center is the MAP rule, not a designed table");
  const auto suffix = backward_products(net);
  MessageDistribution q_prev;
  if (l > 0) q_prev = forward_q(net, l - 1);
  return make_restricted_model(net, l, suffix, l > 0 ? &q_prev : nullptr);
}

}  // namespace tandem
