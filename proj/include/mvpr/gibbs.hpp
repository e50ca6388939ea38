#pragma once

// Collapsed Gibbs sampler for the multi-view profile regression model.
//
// Mixture weights, component profiles and response parameters are all
// integrated out; the chain state is (z per view, gamma, nu, alpha).
// Conditionals are evaluated on the log scale and normalised with
// log_sum_exp just before a categorical draw.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mvpr/errors.hpp"
#include "mvpr/math.hpp"
#include "mvpr/model.hpp"

namespace mvpr {

using Rng = std::mt19937_64;

struct SweepConfig {
  int iterations = 10000;
  int burn_in = 1000;
  int thin = 5;
  bool update_view_prior = false;
  int audit_interval = 1000;  // full recount check every this many sweeps; 0 disables

  bool operator==(const SweepConfig&) const = default;

  void validate() const {
    if (iterations < 1) throw ConfigError("iterations must be positive");
    if (burn_in < 0 || burn_in >= iterations) throw ConfigError("burn_in must lie in [0, iterations)");
    if (thin < 1) throw ConfigError("thin must be at least 1");
    if (audit_interval < 0) throw ConfigError("audit_interval must be non-negative");
  }

  int retained() const { return (iterations - burn_in) / thin; }
};

/// One retained sweep.
struct TraceRecord {
  int iteration = 0;
  int nu = 1;
  std::vector<double> alpha;          // per non-null view
  std::vector<int> gamma;             // per variable
  std::vector<std::vector<int>> z;    // per non-null view, per individual

  bool operator==(const TraceRecord&) const = default;
};

struct PosteriorTrace {
  int n = 0;
  int P = 0;
  int L = 0;
  std::uint64_t seed = 0;
  SweepConfig config;
  std::string config_digest;
  std::string config_json;  // full run configuration, when the chain came from a config file
  std::vector<TraceRecord> records;

  bool operator==(const PosteriorTrace&) const = default;
};

struct AllocationWeights {
  std::vector<int> labels;  // occupied labels, then kNewComponent
  std::vector<double> log_weights;
};

/// exp(w - log_sum_exp(w)).
inline std::vector<double> normalized_probabilities(std::span<const double> log_weights) {
  const double norm = log_sum_exp(log_weights);
  std::vector<double> p(log_weights.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::exp(log_weights[k] - norm);
  return p;
}

/// Draws an index with probability proportional to exp(log_weights).
inline std::size_t sample_log_categorical(std::span<const double> log_weights, Rng& rng) {
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  double total = 0.0;
  thread_local std::vector<double> scratch;
  scratch.resize(log_weights.size());
  for (std::size_t k = 0; k < log_weights.size(); ++k) {
    scratch[k] = std::exp(log_weights[k] - top);
    total += scratch[k];
  }
  double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  for (std::size_t k = 0; k < scratch.size(); ++k) {
    if (u < scratch[k]) return k;
    u -= scratch[k];
  }
  // Rounding can leave u marginally above the last bucket.
  for (std::size_t k = scratch.size(); k-- > 0;) {
    if (scratch[k] > 0.0) return k;
  }
  return scratch.size() - 1;
}

inline bool response_guided(const LatentState& state, int view) {
  return state.track_response && view == state.nu;
}

/// Unnormalised log conditional of z_i in `view` over occupied labels plus a new component.
/// Individual i must already be removed from the view.
inline AllocationWeights allocation_log_weights(const LatentState& state, const CategoricalDataset& data,
                                                const Hyperparameters& hp, int view, int i) {
  if (state.labels(view)[static_cast<std::size_t>(i)] != kUnallocated) {
    throw InvariantError("allocation weights requested for an individual still allocated");
  }
  const ViewStats& vs = state.view_stats(view);
  const auto& members = state.members[static_cast<std::size_t>(view)];
  const bool with_y = response_guided(state, view);

  AllocationWeights out;
  out.labels.reserve(static_cast<std::size_t>(vs.occupied) + 1);
  out.log_weights.reserve(static_cast<std::size_t>(vs.occupied) + 1);

  for (std::size_t k = 0; k < vs.components.size(); ++k) {
    const Component& c = vs.components[k];
    if (c.size == 0) continue;
    double w = std::log(static_cast<double>(c.size));
    for (int j : members) {
      const Concentration& a = hp.a_x[static_cast<std::size_t>(j)];
      const int r = data.at(i, j);
      w += std::log((a[static_cast<std::size_t>(r)] + c.x[static_cast<std::size_t>(state.offsets[j] + r)]) /
                    (a.sum() + c.size));
    }
    if (with_y) w += log_predictive(c.y, c.size, static_cast<std::size_t>(data.y(i)), hp.a_y);
    out.labels.push_back(static_cast<int>(k));
    out.log_weights.push_back(w);
  }

  double w_new = std::log(state.alpha[static_cast<std::size_t>(view - 1)]);
  for (int j : members) {
    w_new += hp.a_x[static_cast<std::size_t>(j)].log_prior_predictive(static_cast<std::size_t>(data.at(i, j)));
  }
  if (with_y) w_new += hp.a_y.log_prior_predictive(static_cast<std::size_t>(data.y(i)));
  out.labels.push_back(kNewComponent);
  out.log_weights.push_back(w_new);
  return out;
}

inline void update_allocation(LatentState& state, const CategoricalDataset& data, const Hyperparameters& hp,
                              int view, int i, Rng& rng) {
  remove_individual(state, data, view, i);
  const AllocationWeights w = allocation_log_weights(state, data, hp, view, i);
  const std::size_t pick = sample_log_categorical(w.log_weights, rng);
  add_individual(state, data, view, i, w.labels[pick]);
}

/// Log of p(gamma_j = l | z, data) up to a constant, for l = 0..L-1.
/// Conditions on the current partition of every view.
inline std::vector<double> view_log_weights(const LatentState& state, const CategoricalDataset& data,
                                            const Hyperparameters& hp, int j) {
  const int L = state.views();
  const auto R = static_cast<std::size_t>(data.categories[static_cast<std::size_t>(j)]);
  std::vector<double> w(static_cast<std::size_t>(L));
  w[0] = std::log(state.view_prior[0]) +
         dirichlet_categorical_log_marginal(state.pooled[static_cast<std::size_t>(j)], hp.a_null[static_cast<std::size_t>(j)]);

  std::vector<int> tally;
  std::vector<int> totals;
  for (int view = 1; view < L; ++view) {
    const auto& z = state.labels(view);
    const std::size_t slots = state.view_stats(view).components.size();
    tally.assign(slots * R, 0);
    totals.assign(slots, 0);
    for (int i = 0; i < data.n; ++i) {
      const int k = z[static_cast<std::size_t>(i)];
      if (k == kUnallocated) throw InvariantError("view weights need every individual allocated");
      ++tally[static_cast<std::size_t>(k) * R + static_cast<std::size_t>(data.at(i, j))];
      ++totals[static_cast<std::size_t>(k)];
    }
    double lw = std::log(state.view_prior[static_cast<std::size_t>(view)]);
    for (std::size_t k = 0; k < slots; ++k) {
      if (totals[k] == 0) continue;
      lw += dirichlet_categorical_log_marginal(std::span<const int>(tally).subspan(k * R, R), totals[k],
                                               hp.a_x[static_cast<std::size_t>(j)]);
    }
    w[static_cast<std::size_t>(view)] = lw;
  }
  return w;
}

inline void update_view_indicator(LatentState& state, const CategoricalDataset& data, const Hyperparameters& hp,
                                  int j, Rng& rng) {
  const std::vector<double> w = view_log_weights(state, data, hp, j);
  move_variable(state, data, j, static_cast<int>(sample_log_categorical(w, rng)));
}

/// Log of p(nu = l | z, y) up to a constant, for l = 1..L-1 (index 0 of the result is view 1).
/// The prior on nu is uniform over the non-null views.
inline std::vector<double> relevance_log_weights(const LatentState& state, const Hyperparameters& hp) {
  if (!state.track_response) throw ConfigError("relevance update needs a modelled response");
  std::vector<double> w;
  for (int view = 1; view < state.views(); ++view) {
    double lw = 0.0;
    for (const Component& c : state.view_stats(view).components) {
      if (c.size > 0) lw += dirichlet_categorical_log_marginal(c.y, c.size, hp.a_y);
    }
    w.push_back(lw);
  }
  return w;
}

inline void update_relevance(LatentState& state, const Hyperparameters& hp, Rng& rng) {
  const std::vector<double> w = relevance_log_weights(state, hp);
  state.nu = 1 + static_cast<int>(sample_log_categorical(w, rng));
}

/// Auxiliary-variable update of a view's DP concentration under its Gamma(shape, rate) prior:
/// eta ~ Beta(alpha + 1, n), then alpha from a two-component Gamma mixture.
inline void update_alpha(LatentState& state, const Hyperparameters& hp, int view, int n, Rng& rng) {
  const AlphaSetting& setting = hp.alpha[static_cast<std::size_t>(view - 1)];
  if (!setting.sampled) return;
  double& alpha = state.alpha[static_cast<std::size_t>(view - 1)];
  const double k = static_cast<double>(state.occupied(view));

  const double g1 = std::gamma_distribution<double>(alpha + 1.0, 1.0)(rng);
  const double g2 = std::gamma_distribution<double>(static_cast<double>(n), 1.0)(rng);
  const double eta = g1 / (g1 + g2);
  const double rate = setting.rate - std::log(eta);
  const double odds = (setting.shape + k - 1.0) / (static_cast<double>(n) * rate);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const double shape = u < odds / (1.0 + odds) ? setting.shape + k : setting.shape + k - 1.0;
  alpha = std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
  alpha = std::max(alpha, std::numeric_limits<double>::min());
}

/// Redraws the view prior weights from Dirichlet(concentration + variables per view).
inline void update_view_prior(LatentState& state, const Hyperparameters& hp, Rng& rng) {
  double total = 0.0;
  std::vector<double> g(state.view_prior.size());
  for (std::size_t l = 0; l < g.size(); ++l) {
    const double shape = hp.view_prior_concentration + static_cast<double>(state.members[l].size());
    g[l] = std::max(std::gamma_distribution<double>(shape, 1.0)(rng), std::numeric_limits<double>::min());
    total += g[l];
  }
  for (std::size_t l = 0; l < g.size(); ++l) state.view_prior[l] = g[l] / total;
}

/// One systematic scan: allocations view by view, view indicators, relevance, alpha, view prior.
inline void sweep(LatentState& state, const CategoricalDataset& data, const Hyperparameters& hp, Rng& rng,
                  bool update_prior_weights = false) {
  const int L = state.views();
  for (int view = 1; view < L; ++view) {
    for (int i = 0; i < data.n; ++i) update_allocation(state, data, hp, view, i, rng);
  }
  if (hp.update_views) {
    for (int j = 0; j < data.P; ++j) update_view_indicator(state, data, hp, j, rng);
  }
  if (hp.sample_relevance) update_relevance(state, hp, rng);
  for (int view = 1; view < L; ++view) update_alpha(state, hp, view, data.n, rng);
  if (update_prior_weights) update_view_prior(state, hp, rng);
}

inline TraceRecord snapshot(const LatentState& state, int iteration) {
  return TraceRecord{iteration, state.nu, state.alpha, state.gamma, state.z};
}

/// Runs a full chain from the standard initial state, retaining thinned post-burn-in sweeps.
inline PosteriorTrace run_chain(const CategoricalDataset& data, const Hyperparameters& hp, const SweepConfig& cfg,
                                Rng& rng) {
  cfg.validate();
  LatentState state = init_state(data, hp);
  PosteriorTrace trace;
  trace.n = data.n;
  trace.P = data.P;
  trace.L = hp.views;
  trace.seed = hp.seed;
  trace.config = cfg;
  trace.records.reserve(static_cast<std::size_t>(cfg.retained()));
  for (int it = 1; it <= cfg.iterations; ++it) {
    sweep(state, data, hp, rng, cfg.update_view_prior);
    if (cfg.audit_interval > 0 && it % cfg.audit_interval == 0) check_consistency(state, data);
    if (it > cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0) trace.records.push_back(snapshot(state, it));
  }
  return trace;
}

inline PosteriorTrace run_chain(const CategoricalDataset& data, const Hyperparameters& hp, const SweepConfig& cfg) {
  Rng rng(hp.seed);
  return run_chain(data, hp, cfg, rng);
}

}  // namespace mvpr
