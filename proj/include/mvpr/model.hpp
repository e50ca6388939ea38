#pragma once

// Dataset, hyperparameters and the latent state of the multi-view model,
// together with the add/remove/move primitives the sampler is built on.
//
// View 0 is the null view (no clustering structure). Views 1..L-1 each carry
// a Dirichlet process mixture over individuals; view `nu` is additionally
// linked to the categorical response.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvpr/errors.hpp"
#include "mvpr/math.hpp"

namespace mvpr {

inline constexpr int kUnallocated = -1;
inline constexpr int kNewComponent = -1;

/// n individuals by P categorical variables, codes stored 0-based.
struct CategoricalDataset {
  int n = 0;
  int P = 0;
  std::vector<int> categories;  // R_j
  std::vector<int> cells;       // row-major n x P
  std::optional<std::vector<int>> response;
  int response_categories = 0;
  std::vector<std::string> variable_names;
  std::string response_name;

  int at(int i, int j) const { return cells[static_cast<std::size_t>(i) * P + j]; }
  bool has_response() const { return response.has_value(); }
  int y(int i) const { return (*response)[static_cast<std::size_t>(i)]; }
};

inline void validate(const CategoricalDataset& data) {
  if (data.n < 1) throw DataError("dataset has no individuals");
  if (data.P < 1) throw DataError("dataset has no variables");
  if (static_cast<int>(data.categories.size()) != data.P) {
    throw DataError("dataset: categories_per_variable has wrong length");
  }
  if (data.cells.size() != static_cast<std::size_t>(data.n) * data.P) {
    throw DataError("dataset: cell matrix has wrong size");
  }
  for (int j = 0; j < data.P; ++j) {
    if (data.categories[j] < 2) {
      throw DataError("dataset: variable " + std::to_string(j + 1) + " has fewer than 2 categories");
    }
  }
  for (int i = 0; i < data.n; ++i) {
    for (int j = 0; j < data.P; ++j) {
      const int v = data.at(i, j);
      if (v < 0 || v >= data.categories[j]) {
        throw DataError("dataset: cell (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                        ") outside its category range");
      }
    }
  }
  if (data.response) {
    if (static_cast<int>(data.response->size()) != data.n) {
      throw DataError("dataset: response length differs from n");
    }
    if (data.response_categories < 2) throw DataError("dataset: response needs >= 2 categories");
    for (int i = 0; i < data.n; ++i) {
      if (data.y(i) < 0 || data.y(i) >= data.response_categories) {
        throw DataError("dataset: response of individual " + std::to_string(i + 1) +
                        " outside its category range");
      }
    }
  }
  if (!data.variable_names.empty() && static_cast<int>(data.variable_names.size()) != data.P) {
    throw DataError("dataset: variable_names has wrong length");
  }
}

/// DP concentration for one non-null view: either held fixed or given a Gamma(shape, rate) prior.
struct AlphaSetting {
  bool sampled = true;
  double value = 1.0;
  double shape = 2.0;
  double rate = 1.0;

  static AlphaSetting fixed(double v) { return {false, v, 2.0, 1.0}; }
  static AlphaSetting gamma_prior(double shape, double rate) {
    return {true, shape / rate, shape, rate};
  }
  double initial_value() const { return sampled ? shape / rate : value; }
  bool operator==(const AlphaSetting&) const = default;
};

struct Hyperparameters {
  int views = 3;                     // L, including the null view
  std::vector<Concentration> a_x;    // per variable, in-view components
  std::vector<Concentration> a_null; // per variable, null view
  Concentration a_y;                 // response (empty when unsupervised)
  std::vector<double> view_prior;    // nu_0 .. nu_{L-1}
  double view_prior_concentration = 1.0;
  std::vector<AlphaSetting> alpha;   // one per non-null view
  bool supervised = true;
  bool sample_relevance = false;
  bool update_views = true;
  std::uint64_t seed = 1;

  // Symmetric unit concentrations, uniform view prior, Gamma(2, 1) prior on every alpha.
  static Hyperparameters defaults(const CategoricalDataset& data, int views) {
    Hyperparameters hp;
    hp.views = views;
    for (int j = 0; j < data.P; ++j) {
      hp.a_x.push_back(Concentration::symmetric(data.categories[j], 1.0));
      hp.a_null.push_back(Concentration::symmetric(data.categories[j], 1.0));
    }
    if (data.has_response()) hp.a_y = Concentration::symmetric(data.response_categories, 1.0);
    hp.supervised = data.has_response();
    if (views >= 1) {
      hp.view_prior.assign(static_cast<std::size_t>(views), 1.0 / views);
      hp.alpha.assign(static_cast<std::size_t>(std::max(views - 1, 0)), AlphaSetting::gamma_prior(2.0, 1.0));
    }
    return hp;
  }
};

inline void validate(const Hyperparameters& hp, const CategoricalDataset& data) {
  if (hp.views < 2) throw ConfigError("number of views L must be at least 2");
  if (static_cast<int>(hp.view_prior.size()) != hp.views) {
    throw ConfigError("view_prior must have one weight per view");
  }
  double total = 0.0;
  for (double w : hp.view_prior) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("view_prior weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("view_prior weights must sum to 1");
  if (!(hp.view_prior_concentration > 0.0)) {
    throw ConfigError("view_prior_concentration must be positive");
  }
  if (static_cast<int>(hp.alpha.size()) != hp.views - 1) {
    throw ConfigError("need one alpha setting per non-null view");
  }
  for (const auto& a : hp.alpha) {
    const bool ok = a.sampled ? (a.shape > 0.0 && a.rate > 0.0 && std::isfinite(a.shape) &&
                                 std::isfinite(a.rate))
                              : (a.value > 0.0 && std::isfinite(a.value));
    if (!ok) throw ConfigError("alpha settings must be strictly positive");
  }
  if (static_cast<int>(hp.a_x.size()) != data.P || static_cast<int>(hp.a_null.size()) != data.P) {
    throw ConfigError("need one concentration vector per variable");
  }
  for (int j = 0; j < data.P; ++j) {
    if (static_cast<int>(hp.a_x[j].size()) != data.categories[j] ||
        static_cast<int>(hp.a_null[j].size()) != data.categories[j]) {
      throw ConfigError("concentration length differs from category count of variable " +
                        std::to_string(j + 1));
    }
  }
  if (hp.supervised) {
    if (!data.has_response()) throw ConfigError("supervised fit requires a response column");
    if (static_cast<int>(hp.a_y.size()) != data.response_categories) {
      throw ConfigError("response concentration length differs from response category count");
    }
  }
  if (hp.sample_relevance && !hp.supervised) {
    throw ConfigError("relevance sampling requires a supervised fit");
  }
}

/// One mixture component of a non-null view. `x` holds per-variable category
/// counts laid out by LatentState::offsets; entries of variables outside the
/// view stay zero.
struct Component {
  int size = 0;
  std::vector<int> x;
  std::vector<int> y;

  bool operator==(const Component&) const = default;
};

struct ViewStats {
  std::vector<Component> components;  // indexed by label; size 0 marks a vacant label
  int occupied = 0;

  bool operator==(const ViewStats&) const = default;
};

struct LatentState {
  std::vector<int> gamma;               // view of each variable, 0..L-1
  int nu = 1;                           // response-linked view
  std::vector<std::vector<int>> z;      // z[l-1][i]
  std::vector<double> alpha;            // alpha[l-1]
  std::vector<double> view_prior;       // current nu_l weights
  std::vector<ViewStats> stats;         // stats[l-1]
  std::vector<std::vector<int>> members;// members[l], ascending variable indices
  std::vector<CategoryCounts> pooled;   // per-variable counts over all individuals
  std::vector<int> offsets;             // P+1 prefix sums of R_j
  bool track_response = false;

  int views() const { return static_cast<int>(members.size()); }
  std::vector<int>& labels(int view) { return z[static_cast<std::size_t>(view - 1)]; }
  const std::vector<int>& labels(int view) const { return z[static_cast<std::size_t>(view - 1)]; }
  ViewStats& view_stats(int view) { return stats[static_cast<std::size_t>(view - 1)]; }
  const ViewStats& view_stats(int view) const { return stats[static_cast<std::size_t>(view - 1)]; }
  int occupied(int view) const { return view_stats(view).occupied; }

  bool operator==(const LatentState&) const = default;
};

namespace detail {

inline Component empty_component(const LatentState& state, const CategoricalDataset& data) {
  Component c;
  c.x.assign(static_cast<std::size_t>(state.offsets.back()), 0);
  if (state.track_response) c.y.assign(static_cast<std::size_t>(data.response_categories), 0);
  return c;
}

inline void check_view(const LatentState& state, int view) {
  if (view < 1 || view >= state.views()) {
    throw InvariantError("view index " + std::to_string(view) + " is not a non-null view");
  }
}

inline void rebuild_stats(LatentState& state, const CategoricalDataset& data) {
  const int L = state.views();
  state.members.assign(static_cast<std::size_t>(L), {});
  for (int j = 0; j < data.P; ++j) state.members[static_cast<std::size_t>(state.gamma[j])].push_back(j);

  state.pooled.clear();
  for (int j = 0; j < data.P; ++j) {
    CategoryCounts c(data.categories[j]);
    for (int i = 0; i < data.n; ++i) c.add(static_cast<std::size_t>(data.at(i, j)));
    state.pooled.push_back(std::move(c));
  }

  state.stats.assign(static_cast<std::size_t>(L - 1), {});
  for (int view = 1; view < L; ++view) {
    ViewStats& vs = state.view_stats(view);
    const auto& z = state.labels(view);
    int max_label = -1;
    for (int k : z) max_label = std::max(max_label, k);
    vs.components.assign(static_cast<std::size_t>(max_label + 1), empty_component(state, data));
    for (int i = 0; i < data.n; ++i) {
      const int k = z[static_cast<std::size_t>(i)];
      if (k == kUnallocated) continue;
      Component& c = vs.components[static_cast<std::size_t>(k)];
      ++c.size;
      for (int j : state.members[static_cast<std::size_t>(view)]) {
        ++c.x[static_cast<std::size_t>(state.offsets[j] + data.at(i, j))];
      }
      if (state.track_response) ++c.y[static_cast<std::size_t>(data.y(i))];
    }
    vs.occupied = 0;
    for (const auto& c : vs.components) vs.occupied += c.size > 0 ? 1 : 0;
  }
}

}  // namespace detail

/// All variables start in view 1, every non-null view starts as a single component.
inline LatentState init_state(const CategoricalDataset& data, const Hyperparameters& hp) {
  validate(data);
  validate(hp, data);
  LatentState state;
  state.gamma.assign(static_cast<std::size_t>(data.P), 1);
  state.nu = 1;
  state.z.assign(static_cast<std::size_t>(hp.views - 1), std::vector<int>(static_cast<std::size_t>(data.n), 0));
  for (const auto& a : hp.alpha) state.alpha.push_back(a.initial_value());
  state.view_prior = hp.view_prior;
  state.offsets.assign(static_cast<std::size_t>(data.P) + 1, 0);
  for (int j = 0; j < data.P; ++j) state.offsets[j + 1] = state.offsets[j] + data.categories[j];
  state.track_response = hp.supervised && data.has_response();
  state.members.assign(static_cast<std::size_t>(hp.views), {});
  detail::rebuild_stats(state, data);
  return state;
}

/// Rebuilds every cached count from (data, gamma, z).
inline LatentState recount(const LatentState& state, const CategoricalDataset& data) {
  LatentState fresh = state;
  detail::rebuild_stats(fresh, data);
  return fresh;
}

/// Throws InvariantError unless the cached statistics match a full recount.
inline void check_consistency(const LatentState& state, const CategoricalDataset& data) {
  const LatentState fresh = recount(state, data);
  if (fresh.members != state.members) throw InvariantError("view membership lists are stale");
  if (fresh.pooled != state.pooled) throw InvariantError("pooled counts are stale");
  if (fresh.stats != state.stats) throw InvariantError("per-component counts are stale");
  if (state.nu < 1 || state.nu >= state.views()) throw InvariantError("nu is not a non-null view");
}

/// Takes individual i out of its component in `view`; vacated components are released.
inline void remove_individual(LatentState& state, const CategoricalDataset& data, int view, int i) {
  detail::check_view(state, view);
  auto& z = state.labels(view);
  const int k = z[static_cast<std::size_t>(i)];
  if (k == kUnallocated) {
    throw InvariantError("individual " + std::to_string(i) + " is not allocated in view " +
                         std::to_string(view));
  }
  ViewStats& vs = state.view_stats(view);
  Component& c = vs.components[static_cast<std::size_t>(k)];
  --c.size;
  for (int j : state.members[static_cast<std::size_t>(view)]) {
    --c.x[static_cast<std::size_t>(state.offsets[j] + data.at(i, j))];
  }
  if (state.track_response) --c.y[static_cast<std::size_t>(data.y(i))];
  z[static_cast<std::size_t>(i)] = kUnallocated;
  if (c.size == 0) {
    --vs.occupied;
    while (!vs.components.empty() && vs.components.back().size == 0) vs.components.pop_back();
  }
}

/// Places individual i into an occupied component, or into a fresh one when
/// `label == kNewComponent` (the smallest vacant label). Returns the label used.
inline int add_individual(LatentState& state, const CategoricalDataset& data, int view, int i,
                          int label) {
  detail::check_view(state, view);
  auto& z = state.labels(view);
  if (z[static_cast<std::size_t>(i)] != kUnallocated) {
    throw InvariantError("individual " + std::to_string(i) + " is already allocated in view " +
                         std::to_string(view));
  }
  ViewStats& vs = state.view_stats(view);
  if (label == kNewComponent) {
    label = 0;
    while (label < static_cast<int>(vs.components.size()) &&
           vs.components[static_cast<std::size_t>(label)].size > 0) {
      ++label;
    }
    if (label == static_cast<int>(vs.components.size())) {
      vs.components.push_back(detail::empty_component(state, data));
    }
    ++vs.occupied;
  } else if (label < 0 || label >= static_cast<int>(vs.components.size()) ||
             vs.components[static_cast<std::size_t>(label)].size == 0) {
    throw InvariantError("component " + std::to_string(label) + " is not occupied in view " +
                         std::to_string(view));
  }
  Component& c = vs.components[static_cast<std::size_t>(label)];
  ++c.size;
  for (int j : state.members[static_cast<std::size_t>(view)]) {
    ++c.x[static_cast<std::size_t>(state.offsets[j] + data.at(i, j))];
  }
  if (state.track_response) ++c.y[static_cast<std::size_t>(data.y(i))];
  z[static_cast<std::size_t>(i)] = label;
  return label;
}

/// Reassigns variable j to `to_view`, moving its counts between view structures.
inline void move_variable(LatentState& state, const CategoricalDataset& data, int j, int to_view) {
  if (j < 0 || j >= data.P) throw InvariantError("variable index out of range");
  if (to_view < 0 || to_view >= state.views()) throw InvariantError("view index out of range");
  const int from = state.gamma[static_cast<std::size_t>(j)];
  if (from == to_view) return;
  const int lo = state.offsets[j];
  const int hi = state.offsets[j + 1];

  if (from >= 1) {
    for (Component& c : state.view_stats(from).components) {
      std::fill(c.x.begin() + lo, c.x.begin() + hi, 0);
    }
  }
  auto& src = state.members[static_cast<std::size_t>(from)];
  src.erase(std::find(src.begin(), src.end(), j));

  if (to_view >= 1) {
    auto& comps = state.view_stats(to_view).components;
    const auto& z = state.labels(to_view);
    for (int i = 0; i < data.n; ++i) {
      const int k = z[static_cast<std::size_t>(i)];
      if (k == kUnallocated) continue;
      ++comps[static_cast<std::size_t>(k)].x[static_cast<std::size_t>(lo + data.at(i, j))];
    }
  }
  auto& dst = state.members[static_cast<std::size_t>(to_view)];
  dst.insert(std::lower_bound(dst.begin(), dst.end(), j), j);
  state.gamma[static_cast<std::size_t>(j)] = to_view;
}

/// Counts of variable j in component `label` of `view` (j must belong to that view).
inline std::span<const int> component_counts(const LatentState& state, int view, int label, int j) {
  const Component& c = state.view_stats(view).components[static_cast<std::size_t>(label)];
  return std::span<const int>(c.x).subspan(static_cast<std::size_t>(state.offsets[j]),
                                           static_cast<std::size_t>(state.offsets[j + 1] - state.offsets[j]));
}

}  // namespace mvpr
