#pragma once

// Synthetic two-view categorical data with a binary response linked to the
// first (relevant) view only. Each cell is drawn from its cluster's profile
// with probability w and from the uniform distribution otherwise, so w sets
// how separable the clusters are.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mvpr/errors.hpp"
#include "mvpr/gibbs.hpp"
#include "mvpr/math.hpp"
#include "mvpr/model.hpp"

namespace mvpr {

struct SimulationConfig {
  int n = 300;
  int p = 10;
  int q = 5;  // variables 1..q form the relevant view
  int categories = 3;
  std::vector<int> clusters_per_view{6, 6};
  std::vector<double> theta{0.01, 0.15, 0.40, 0.60, 0.85, 0.90};
  // P(y = 1) implied for the irrelevant view; reported only, y is generated from theta.
  double baseline_rate = 0.485;
  double w = 0.8;
  double dirichlet_param = 0.01;
  std::uint64_t seed = 1;

  void validate() const {
    if (n < 1 || p < 1) throw ConfigError("simulation needs n >= 1 and p >= 1");
    if (q < 0 || q > p) throw ConfigError("simulation needs 0 <= q <= p");
    if (categories < 2) throw ConfigError("simulation needs at least 2 categories");
    if (clusters_per_view.size() != 2 || clusters_per_view[0] < 1 || clusters_per_view[1] < 1) {
      throw ConfigError("simulation needs a positive cluster count for each of the two views");
    }
    if (static_cast<int>(theta.size()) != clusters_per_view[0]) {
      throw ConfigError("theta needs one response probability per relevant cluster");
    }
    for (double t : theta) {
      if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("theta entries must lie in [0, 1]");
    }
    if (!(baseline_rate >= 0.0 && baseline_rate <= 1.0)) throw ConfigError("baseline_rate must lie in [0, 1]");
    if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("w must lie in [0, 1]");
    if (!(dirichlet_param > 0.0)) throw ConfigError("dirichlet_param must be positive");
  }
};

struct ClusterProfile {
  int view = 1;
  int cluster = 0;
  int variable = 0;
  std::vector<double> probs;
};

struct GroundTruth {
  std::vector<int> gamma;              // true view (1 or 2) per variable
  std::vector<std::vector<int>> z;     // z[view-1][i], 0-based cluster labels
  std::vector<ClusterProfile> profiles;
};

namespace detail {

// Dirichlet draw on the log scale: Gamma(a) = Gamma(a + 1) * U^(1/a) keeps tiny
// concentrations from underflowing to an all-zero vector.
inline std::vector<double> sample_dirichlet(int size, double a, Rng& rng) {
  std::gamma_distribution<double> g(a + 1.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> logs(static_cast<std::size_t>(size));
  for (auto& v : logs) {
    double u = unif(rng);
    while (u <= 0.0) u = unif(rng);
    v = std::log(g(rng)) + std::log(u) / a;
  }
  const double norm = log_sum_exp(logs);
  std::vector<double> probs(logs.size());
  for (std::size_t r = 0; r < probs.size(); ++r) probs[r] = std::exp(logs[r] - norm);
  return probs;
}

inline int sample_categorical(const std::vector<double>& probs, Rng& rng) {
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  for (std::size_t r = 0; r < probs.size(); ++r) {
    if (u < probs[r]) return static_cast<int>(r);
    u -= probs[r];
  }
  return static_cast<int>(probs.size()) - 1;
}

// Block assignment (remainders go to the first clusters), then a shuffle.
inline std::vector<int> balanced_labels(int n, int clusters, Rng& rng) {
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < clusters; ++k) {
    const int size = n / clusters + (k < n % clusters ? 1 : 0);
    labels.insert(labels.end(), static_cast<std::size_t>(size), k);
  }
  for (int i = n - 1; i > 0; --i) {
    const int swap_with = std::uniform_int_distribution<int>(0, i)(rng);
    std::swap(labels[static_cast<std::size_t>(i)], labels[static_cast<std::size_t>(swap_with)]);
  }
  return labels;
}

}  // namespace detail

/// Generation order is fixed: relevant view (profiles, labels, cells), response,
/// then the irrelevant view, so the response stream never depends on view 2.
inline std::pair<CategoricalDataset, GroundTruth> simulate_dataset(const SimulationConfig& cfg, Rng& rng) {
  cfg.validate();
  CategoricalDataset data;
  data.n = cfg.n;
  data.P = cfg.p;
  data.categories.assign(static_cast<std::size_t>(cfg.p), cfg.categories);
  data.cells.assign(static_cast<std::size_t>(cfg.n) * cfg.p, 0);
  for (int j = 0; j < cfg.p; ++j) data.variable_names.push_back("x" + std::to_string(j + 1));
  data.response_name = "y";
  data.response_categories = 2;

  GroundTruth truth;
  truth.gamma.resize(static_cast<std::size_t>(cfg.p));
  for (int j = 0; j < cfg.p; ++j) truth.gamma[static_cast<std::size_t>(j)] = j < cfg.q ? 1 : 2;

  const std::vector<double> uniform(static_cast<std::size_t>(cfg.categories), 1.0 / cfg.categories);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto generate_view = [&](int view) {
    const int clusters = cfg.clusters_per_view[static_cast<std::size_t>(view - 1)];
    const int first = view == 1 ? 0 : cfg.q;
    const int last = view == 1 ? cfg.q : cfg.p;
    std::vector<std::vector<std::vector<double>>> phi(static_cast<std::size_t>(clusters));
    for (int k = 0; k < clusters; ++k) {
      for (int j = first; j < last; ++j) {
        auto probs = detail::sample_dirichlet(cfg.categories, cfg.dirichlet_param, rng);
        truth.profiles.push_back({view, k, j, probs});
        phi[static_cast<std::size_t>(k)].push_back(std::move(probs));
      }
    }
    std::vector<int> z = detail::balanced_labels(cfg.n, clusters, rng);
    for (int i = 0; i < cfg.n; ++i) {
      const auto& cluster_phi = phi[static_cast<std::size_t>(z[static_cast<std::size_t>(i)])];
      for (int j = first; j < last; ++j) {
        const bool structured = unif(rng) < cfg.w;
        const auto& probs = structured ? cluster_phi[static_cast<std::size_t>(j - first)] : uniform;
        data.cells[static_cast<std::size_t>(i) * cfg.p + j] = detail::sample_categorical(probs, rng);
      }
    }
    truth.z.push_back(std::move(z));
  };

  generate_view(1);
  std::vector<int> y(static_cast<std::size_t>(cfg.n));
  for (int i = 0; i < cfg.n; ++i) {
    const double theta = cfg.theta[static_cast<std::size_t>(truth.z[0][static_cast<std::size_t>(i)])];
    y[static_cast<std::size_t>(i)] = unif(rng) < theta ? 1 : 0;
  }
  data.response = std::move(y);
  generate_view(2);
  return {std::move(data), std::move(truth)};
}

inline std::pair<CategoricalDataset, GroundTruth> simulate_dataset(const SimulationConfig& cfg) {
  Rng rng(cfg.seed);
  return simulate_dataset(cfg, rng);
}

}  // namespace mvpr
