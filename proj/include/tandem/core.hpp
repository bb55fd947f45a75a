#pragma once

// Core domain types for tandem (serial) networks of decision makers doing
// M-ary Bayesian hypothesis testing over finite alphabets, plus the two
// elementary operations everything else reduces to: the MAP decision and
// the Bayes error of a finite joint distribution.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tandem {

// Normalization tolerances: ingested PMFs carry discretization error,
// internally generated vectors are exact up to rounding.
inline constexpr double kIngestTol = 1e-9;
inline constexpr double kInternalTol = 1e-10;
inline constexpr double kPriorTol = 1e-12;

namespace detail {

inline double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

inline void check_pmf(const std::vector<double>& p, double tol, const char* what) {
  for (double x : p) {
    if (!(x >= 0.0) || x > 1.0 + tol)
      throw std::invalid_argument(std::string(what) + ": mass outside [0,1]");
  }
  if (std::abs(sum(p) - 1.0) > tol)
    throw std::invalid_argument(std::string(what) + ": does not sum to 1");
}

}  // namespace detail

/// Prior probabilities of the M hypotheses.
struct Priors {
  std::vector<double> weights;

  int hypothesis_count() const { return static_cast<int>(weights.size()); }

  void validate() const {
    if (weights.size() < 2) throw std::invalid_argument("priors: need at least 2 hypotheses");
    detail::check_pmf(weights, kPriorTol, "priors");
  }
};

inline Priors uniform_priors(int m) {
  Priors p;
  p.weights.assign(static_cast<std::size_t>(m), 1.0 / m);
  return p;
}

/// Per-hypothesis PMFs over a finite observation alphabet.
struct DiscreteObservationModel {
  int alphabet_size = 0;
  std::vector<std::vector<double>> pmfs;  // one per hypothesis, each of length alphabet_size

  int hypothesis_count() const { return static_cast<int>(pmfs.size()); }

  void validate() const {
    if (alphabet_size < 1) throw std::invalid_argument("observation model: empty alphabet");
    if (pmfs.empty()) throw std::invalid_argument("observation model: no hypotheses");
    for (const auto& p : pmfs) {
      if (static_cast<int>(p.size()) != alphabet_size)
        throw std::invalid_argument("observation model: pmf length mismatch");
      detail::check_pmf(p, kIngestTol, "observation pmf");
    }
  }
};

/// Index assignment (observation, incoming message) -> outgoing message for
/// one decision maker. The first DM has in_msg == 1 (a single dummy input).
struct DecisionFunction {
  int in_obs = 0;
  int in_msg = 1;
  int out_msg = 1;
  std::vector<int> table;  // in_obs * in_msg entries, row-major in x

  int operator()(int x, int u) const { return table[static_cast<std::size_t>(x) * in_msg + u]; }
  int& at(int x, int u) { return table[static_cast<std::size_t>(x) * in_msg + u]; }

  void validate() const {
    if (in_obs < 1 || in_msg < 1 || out_msg < 1)
      throw std::invalid_argument("decision function: empty alphabet");
    if (table.size() != static_cast<std::size_t>(in_obs) * in_msg)
      throw std::invalid_argument("decision function: table is not a total function");
    for (int v : table)
      if (v < 0 || v >= out_msg)
        throw std::invalid_argument("decision function: output index out of range");
  }
};

/// Returns a decision function that forwards its incoming message unchanged,
/// regardless of the observation. Incoming indices beyond the output
/// alphabet are clamped (only possible with shrinking rates).
inline DecisionFunction pass_through(int in_obs, int in_msg, int out_msg) {
  DecisionFunction g;
  g.in_obs = in_obs;
  g.in_msg = in_msg;
  g.out_msg = out_msg;
  g.table.resize(static_cast<std::size_t>(in_obs) * in_msg);
  for (int x = 0; x < in_obs; ++x)
    for (int u = 0; u < in_msg; ++u) g.at(x, u) = std::min(u, out_msg - 1);
  return g;
}

/// Per-hypothesis column-stochastic transition matrix between message
/// alphabets; entry (m, n) of matrix j is P_j(u_out = m | u_in = n).
/// Stored dense, column-major.
struct HypothesisMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::vector<double>> mats;  // one per hypothesis, rows*cols each

  double at(int j, int r, int c) const {
    return mats[j][static_cast<std::size_t>(c) * rows + r];
  }
  double& at(int j, int r, int c) { return mats[j][static_cast<std::size_t>(c) * rows + r]; }

  int hypothesis_count() const { return static_cast<int>(mats.size()); }

  static HypothesisMatrix identity(int n, int hypotheses) {
    HypothesisMatrix m;
    m.rows = m.cols = n;
    m.mats.assign(hypotheses, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0));
    for (int j = 0; j < hypotheses; ++j)
      for (int i = 0; i < n; ++i) m.at(j, i, i) = 1.0;
    return m;
  }

  void check_column_stochastic(double tol = kInternalTol) const {
    for (const auto& mat : mats) {
      for (int c = 0; c < cols; ++c) {
        double s = 0.0;
        for (int r = 0; r < rows; ++r) {
          double x = mat[static_cast<std::size_t>(c) * rows + r];
          if (x < -tol || x > 1.0 + tol)
            throw std::logic_error("hypothesis matrix: entry outside [0,1]");
          s += x;
        }
        if (std::abs(s - 1.0) > tol)
          throw std::logic_error("hypothesis matrix: column not stochastic");
      }
    }
  }
};

/// Per-hypothesis probability mass vectors over one message alphabet.
struct MessageDistribution {
  std::vector<std::vector<double>> q;  // one per hypothesis

  int size() const { return q.empty() ? 0 : static_cast<int>(q.front().size()); }
  int hypothesis_count() const { return static_cast<int>(q.size()); }

  void validate(double tol = kInternalTol) const {
    for (const auto& p : q) detail::check_pmf(p, tol, "message distribution");
  }
};

/// An ordered chain of decision makers. The last DM is the fusion center;
/// its rule is always the MAP decision on (own observation, incoming
/// message) and is never stored as a table.
struct TandemNetwork {
  Priors priors;
  std::vector<DiscreteObservationModel> observation_models;  // one per DM
  std::vector<DecisionFunction> gammas;                      // DM 1..N-1 (none for N == 1)

  int dm_count() const { return static_cast<int>(observation_models.size()); }
  int hypothesis_count() const { return priors.hypothesis_count(); }

  /// Output alphabet size of DM k (0-based, k < N-1).
  int message_size(int k) const { return gammas[k].out_msg; }

  void validate() const {
    priors.validate();
    const int n = dm_count();
    if (n < 1) throw std::invalid_argument("network: no decision makers");
    if (static_cast<int>(gammas.size()) != n - 1)
      throw std::invalid_argument("network: need exactly N-1 decision functions");
    for (const auto& m : observation_models) {
      m.validate();
      if (m.hypothesis_count() != hypothesis_count())
        throw std::invalid_argument("network: hypothesis count mismatch");
    }
    for (int k = 0; k < n - 1; ++k) {
      gammas[k].validate();
      if (gammas[k].in_obs != observation_models[k].alphabet_size)
        throw std::invalid_argument("network: observation alphabet mismatch at DM " + std::to_string(k + 1));
      const int expect_in = (k == 0) ? 1 : gammas[k - 1].out_msg;
      if (gammas[k].in_msg != expect_in)
        throw std::invalid_argument("network: message alphabet chain broken at DM " + std::to_string(k + 1));
    }
  }
};

/// MAP decision: argmax_j priors[j] * scores[j], ties broken toward the
/// lowest hypothesis index. An all-zero score vector also yields index 0
/// (a zero-probability input, irrelevant to the error probability).
inline int map_decision(const std::vector<double>& scores, const Priors& priors) {
  if (scores.size() != priors.weights.size())
    throw std::invalid_argument("map_decision: dimension mismatch");
  int best = 0;
  double best_val = -1.0;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (scores[j] < 0.0) throw std::invalid_argument("map_decision: negative score");
    const double v = priors.weights[j] * scores[j];
    if (v > best_val) {
      best_val = v;
      best = static_cast<int>(j);
    }
  }
  return best;
}

/// Bayes error of the MAP decision given per-hypothesis PMFs over a common
/// finite alphabet: 1 - sum_z max_j priors[j] * pmf_j(z).
inline double bayes_error(const std::vector<std::vector<double>>& joint_pmfs, const Priors& priors) {
  if (joint_pmfs.size() != priors.weights.size())
    throw std::invalid_argument("bayes_error: dimension mismatch between pmfs and priors");
  const std::size_t z_size = joint_pmfs.front().size();
  for (const auto& p : joint_pmfs) {
    if (p.size() != z_size) throw std::invalid_argument("bayes_error: pmf length mismatch");
    detail::check_pmf(p, kIngestTol, "bayes_error pmf");
  }
  double correct = 0.0;
  for (std::size_t z = 0; z < z_size; ++z) {
    double best = 0.0;
    for (std::size_t j = 0; j < joint_pmfs.size(); ++j)
      best = std::max(best, priors.weights[j] * joint_pmfs[j][z]);
    correct += best;
  }
  return 1.0 - correct;
}

}  // namespace tandem
