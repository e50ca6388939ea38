#pragma once

// Label-invariant summaries of a posterior trace.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mvpr/gibbs.hpp"
#include "mvpr/matrix.hpp"

namespace mvpr {

using Partition = std::vector<int>;

using SimilarityMatrix = DenseMatrix;

/// Adjusted Rand index (Hubert–Arabie), pair counts kept in exact integers.
inline double adjusted_rand_index(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) throw std::domain_error("adjusted_rand_index: partitions differ in length");
  const auto n = static_cast<std::int64_t>(a.size());
  auto pairs = [](std::int64_t m) { return m * (m - 1) / 2; };

  std::map<std::pair<int, int>, std::int64_t> cells;
  std::map<int, std::int64_t> rows;
  std::map<int, std::int64_t> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++cells[{a[i], b[i]}];
    ++rows[a[i]];
    ++cols[b[i]];
  }
  std::int64_t index = 0;
  std::int64_t sum_rows = 0;
  std::int64_t sum_cols = 0;
  for (const auto& [key, m] : cells) index += pairs(m);
  for (const auto& [key, m] : rows) sum_rows += pairs(m);
  for (const auto& [key, m] : cols) sum_cols += pairs(m);
  const std::int64_t total = pairs(n);
  if (total == 0) return 1.0;

  // Both partitions trivial (all singletons or one block) in the same way.
  if (sum_rows == sum_cols && index == sum_rows && (sum_rows == 0 || sum_rows == total)) return 1.0;

  const double expected = static_cast<double>(sum_rows) * static_cast<double>(sum_cols) / static_cast<double>(total);
  const double max_index = 0.5 * static_cast<double>(sum_rows + sum_cols);
  const double denom = max_index - expected;
  if (denom == 0.0) return 0.0;
  return (static_cast<double>(index) - expected) / denom;
}

/// Fraction of retained sweeps in which individuals i and j share a label in `view`.
inline SimilarityMatrix posterior_similarity_matrix(const PosteriorTrace& trace, int view) {
  if (trace.records.empty()) throw std::domain_error("posterior_similarity_matrix: empty trace");
  if (view < 1 || view >= trace.L) throw std::domain_error("posterior_similarity_matrix: not a non-null view");
  const int n = trace.n;
  std::vector<std::int64_t> together(static_cast<std::size_t>(n) * n, 0);
  for (const auto& rec : trace.records) {
    const auto& z = rec.z[static_cast<std::size_t>(view - 1)];
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (z[static_cast<std::size_t>(i)] == z[static_cast<std::size_t>(j)]) {
          ++together[static_cast<std::size_t>(i) * n + j];
        }
      }
    }
  }
  const auto sweeps = static_cast<double>(trace.records.size());
  SimilarityMatrix psm(n, n, 0.0);
  for (int i = 0; i < n; ++i) {
    psm(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      const double v = static_cast<double>(together[static_cast<std::size_t>(i) * n + j]) / sweeps;
      psm(i, j) = v;
      psm(j, i) = v;
    }
  }
  return psm;
}

/// P x L table: fraction of retained sweeps with gamma_j = l.
inline DenseMatrix view_selection_probabilities(const PosteriorTrace& trace) {
  if (trace.records.empty()) throw std::domain_error("view_selection_probabilities: empty trace");
  std::vector<std::int64_t> hits(static_cast<std::size_t>(trace.P) * trace.L, 0);
  for (const auto& rec : trace.records) {
    for (int j = 0; j < trace.P; ++j) ++hits[static_cast<std::size_t>(j) * trace.L + rec.gamma[static_cast<std::size_t>(j)]];
  }
  const auto sweeps = static_cast<double>(trace.records.size());
  DenseMatrix probs(trace.P, trace.L);
  for (std::size_t k = 0; k < hits.size(); ++k) probs.values[k] = static_cast<double>(hits[k]) / sweeps;
  return probs;
}

/// ARI of each retained partition of `view` against `truth`.
inline std::vector<double> ari_distribution(const PosteriorTrace& trace, const Partition& truth, int view) {
  if (static_cast<int>(truth.size()) != trace.n) throw std::domain_error("ari_distribution: truth length differs from n");
  if (view < 1 || view >= trace.L) throw std::domain_error("ari_distribution: not a non-null view");
  std::vector<double> out;
  out.reserve(trace.records.size());
  for (const auto& rec : trace.records) out.push_back(adjusted_rand_index(rec.z[static_cast<std::size_t>(view - 1)], truth));
  return out;
}

/// Per variable, the fraction of retained sweeps with gamma_j = nu (the response-linked
/// view of that sweep). Equals column 1 of the selection table when nu is held at 1.
inline std::vector<double> relevant_view_selection(const PosteriorTrace& trace) {
  if (trace.records.empty()) throw std::domain_error("relevant_view_selection: empty trace");
  std::vector<std::int64_t> hits(static_cast<std::size_t>(trace.P), 0);
  for (const auto& rec : trace.records) {
    for (int j = 0; j < trace.P; ++j) hits[static_cast<std::size_t>(j)] += rec.gamma[static_cast<std::size_t>(j)] == rec.nu;
  }
  std::vector<double> out(hits.size());
  for (std::size_t j = 0; j < hits.size(); ++j) {
    out[j] = static_cast<double>(hits[j]) / static_cast<double>(trace.records.size());
  }
  return out;
}

/// ARI of each retained partition of the response-linked view (z of view nu) against `truth`.
inline std::vector<double> relevant_ari_distribution(const PosteriorTrace& trace, const Partition& truth) {
  if (static_cast<int>(truth.size()) != trace.n) throw std::domain_error("relevant_ari_distribution: truth length differs from n");
  std::vector<double> out;
  out.reserve(trace.records.size());
  for (const auto& rec : trace.records) {
    out.push_back(adjusted_rand_index(rec.z[static_cast<std::size_t>(rec.nu - 1)], truth));
  }
  return out;
}

/// Variables whose probability of belonging to `view` is at least `threshold`, ascending.
inline std::vector<int> threshold_selected_variables(const DenseMatrix& probs, int view, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw std::domain_error("threshold must lie in [0, 1]");
  std::vector<int> out;
  for (int j = 0; j < probs.rows; ++j) {
    if (probs(j, view) >= threshold) out.push_back(j);
  }
  return out;
}

}  // namespace mvpr
