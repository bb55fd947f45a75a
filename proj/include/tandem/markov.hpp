#pragma once

// Markov-chain machinery for tandem networks: per-DM transition matrices
// built from decision functions, the backward product recursion over the
// chain suffix, forward propagation of message distributions, and the
// end-to-end network error under MAP fusion.

#include <vector>

#include "tandem/core.hpp"

namespace tandem {

/// Per-hypothesis transition matrix of one DM: entry (m, n) of matrix j is
/// the total observation mass mapped to output m when the incoming message
/// is n. Columns sum to 1 because the decision function is total.
inline HypothesisMatrix dm_transition_matrix(const DecisionFunction& gamma,
                                             const DiscreteObservationModel& obs) {
  gamma.validate();
  obs.validate();
  if (gamma.in_obs != obs.alphabet_size)
    throw std::invalid_argument("dm_transition_matrix: observation alphabet mismatch");
  HypothesisMatrix t;
  t.rows = gamma.out_msg;
  t.cols = gamma.in_msg;
  const int m = obs.hypothesis_count();
  t.mats.assign(m, std::vector<double>(static_cast<std::size_t>(t.rows) * t.cols, 0.0));
  for (int u = 0; u < gamma.in_msg; ++u)
    for (int x = 0; x < gamma.in_obs; ++x) {
      const int out = gamma(x, u);
      for (int j = 0; j < m; ++j) t.at(j, out, u) += obs.pmfs[j][x];
    }
  t.check_column_stochastic();
  return t;
}

/// Per-hypothesis matrix product A*B; preserves column-stochasticity.
inline HypothesisMatrix multiply(const HypothesisMatrix& a, const HypothesisMatrix& b) {
  if (a.cols != b.rows || a.hypothesis_count() != b.hypothesis_count())
    throw std::invalid_argument("multiply: shape mismatch");
  HypothesisMatrix c;
  c.rows = a.rows;
  c.cols = b.cols;
  c.mats.assign(a.hypothesis_count(),
                std::vector<double>(static_cast<std::size_t>(c.rows) * c.cols, 0.0));
  for (int j = 0; j < a.hypothesis_count(); ++j)
    for (int col = 0; col < b.cols; ++col)
      for (int k = 0; k < a.cols; ++k) {
        const double bkc = b.at(j, k, col);
        if (bkc == 0.0) continue;
        for (int r = 0; r < a.rows; ++r) c.at(j, r, col) += a.at(j, r, k) * bkc;
      }
  c.check_column_stochastic();
  return c;
}

/// Suffix transition products: result[l] maps the output message of DM l+1
/// (1-based) to the message arriving at the fusion center, for
/// l = 0..N-2 (0-based). result[N-2] is the identity; the recursion runs
/// with decreasing l so the whole set costs one multiply per DM.
inline std::vector<HypothesisMatrix> backward_products(const TandemNetwork& net) {
  net.validate();
  const int n = net.dm_count();
  std::vector<HypothesisMatrix> prods;
  if (n < 2) return prods;
  prods.resize(static_cast<std::size_t>(n - 1));
  prods[n - 2] = HypothesisMatrix::identity(net.message_size(n - 2), net.hypothesis_count());
  for (int l = n - 3; l >= 0; --l)
    prods[l] = multiply(prods[l + 1],
                        dm_transition_matrix(net.gammas[l + 1], net.observation_models[l + 1]));
  return prods;
}

/// Per-hypothesis matrix-vector product q_out = T q_in.
inline MessageDistribution apply(const HypothesisMatrix& t, const MessageDistribution& q) {
  MessageDistribution out;
  out.q.assign(t.hypothesis_count(), std::vector<double>(static_cast<std::size_t>(t.rows), 0.0));
  for (int j = 0; j < t.hypothesis_count(); ++j)
    for (int c = 0; c < t.cols; ++c) {
      const double qc = q.q[j][c];
      if (qc == 0.0) continue;
      for (int r = 0; r < t.rows; ++r) out.q[j][r] += t.at(j, r, c) * qc;
    }
  return out;
}

/// Message distribution at the output of DM `up_to` (0-based, < N-1),
/// propagated from DM 1 through the chain.
inline MessageDistribution forward_q(const TandemNetwork& net, int up_to) {
  net.validate();
  if (up_to < 0 || up_to >= net.dm_count() - 1)
    throw std::invalid_argument("forward_q: DM index out of range");
  // DM 1 has a single dummy incoming message, so its transition matrix is
  // the one-column matrix whose column is the message PMF itself.
  MessageDistribution q;
  q.q.assign(net.hypothesis_count(), std::vector<double>{1.0});
  for (int k = 0; k <= up_to; ++k)
    q = apply(dm_transition_matrix(net.gammas[k], net.observation_models[k]), q);
  q.validate();
  return q;
}

/// Joint PMFs the fusion center sees over Z = X_N x M_{N-1}. Conditional
/// independence gives P(z | H_j) = P_j(x_N) * P_j(u_{N-1}).
inline std::vector<std::vector<double>> fc_joint_pmf(const MessageDistribution& q,
                                                     const DiscreteObservationModel& fc_obs) {
  fc_obs.validate();
  if (q.hypothesis_count() != fc_obs.hypothesis_count())
    throw std::invalid_argument("fc_joint_pmf: hypothesis count mismatch");
  const int nx = fc_obs.alphabet_size;
  const int nu = q.size();
  std::vector<std::vector<double>> joint(q.q.size());
  for (int j = 0; j < q.hypothesis_count(); ++j) {
    joint[j].resize(static_cast<std::size_t>(nx) * nu);
    for (int x = 0; x < nx; ++x)
      for (int u = 0; u < nu; ++u)
        joint[j][static_cast<std::size_t>(x) * nu + u] = fc_obs.pmfs[j][x] * q.q[j][u];
  }
  return joint;
}

/// End-to-end error probability of the network under MAP fusion.
inline double network_error(const TandemNetwork& net) {
  net.validate();
  if (net.dm_count() == 1) return bayes_error(net.observation_models[0].pmfs, net.priors);
  const MessageDistribution q = forward_q(net, net.dm_count() - 2);
  return bayes_error(fc_joint_pmf(q, net.observation_models.back()), net.priors);
}

}  // namespace tandem
