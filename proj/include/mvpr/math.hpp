#pragma once

// Log-domain primitives for Dirichlet-categorical models.
//
// Every sampler conditional in this library is assembled from the functions
// below. Category indices are 0-based here; files use 1-based codes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvpr {

/// ln Γ(x) for finite x > 0.
inline double log_gamma(double x) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw std::domain_error("log_gamma: argument must be finite and positive, got " +
                            std::to_string(x));
  }
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);  // reentrant: does not touch the global signgam
#else
  return std::lgamma(x);
#endif
}

/// ln Σ exp(v_i), computed after shifting by the maximum.
inline double log_sum_exp(std::span<const double> values) {
  if (values.empty()) throw std::domain_error("log_sum_exp: empty input");
  const double top = *std::max_element(values.begin(), values.end());
  if (top == -std::numeric_limits<double>::infinity()) return top;
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - top);
  return top + std::log(acc);
}

/// Positive Dirichlet concentration vector with cached normalising terms.
class Concentration {
 public:
  Concentration() = default;

  explicit Concentration(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) {
      throw std::domain_error("Concentration: need at least two categories");
    }
    for (double a : values_) {
      if (!std::isfinite(a) || a <= 0.0) {
        throw std::domain_error("Concentration: entries must be finite and positive");
      }
    }
    sum_ = std::accumulate(values_.begin(), values_.end(), 0.0);
    log_gamma_sum_ = log_gamma(sum_);
    sum_log_gamma_ = 0.0;
    log_prior_predictive_.resize(values_.size());
    for (std::size_t r = 0; r < values_.size(); ++r) {
      sum_log_gamma_ += log_gamma(values_[r]);
      log_prior_predictive_[r] = std::log(values_[r] / sum_);
    }
  }

  static Concentration symmetric(int categories, double value) {
    if (categories < 2) throw std::domain_error("Concentration: need at least two categories");
    return Concentration(std::vector<double>(static_cast<std::size_t>(categories), value));
  }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t r) const { return values_[r]; }
  std::span<const double> values() const { return values_; }
  double sum() const { return sum_; }
  double log_gamma_sum() const { return log_gamma_sum_; }
  double sum_log_gamma() const { return sum_log_gamma_; }
  // ln(a_r / Σa): predictive probability of category r with no observations.
  double log_prior_predictive(std::size_t r) const { return log_prior_predictive_[r]; }

  bool operator==(const Concentration& other) const { return values_ == other.values_; }

 private:
  std::vector<double> values_;
  double sum_ = 0.0;
  double log_gamma_sum_ = 0.0;
  double sum_log_gamma_ = 0.0;
  std::vector<double> log_prior_predictive_;
};

/// Per-category observation counts with a running total.
class CategoryCounts {
 public:
  CategoryCounts() = default;
  explicit CategoryCounts(int categories) : counts_(static_cast<std::size_t>(categories), 0) {
    if (categories < 2) throw std::domain_error("CategoryCounts: need at least two categories");
  }
  explicit CategoryCounts(std::vector<int> counts) : counts_(std::move(counts)) {
    if (counts_.size() < 2) throw std::domain_error("CategoryCounts: need at least two categories");
    for (int c : counts_) {
      if (c < 0) throw std::domain_error("CategoryCounts: negative count");
      total_ += c;
    }
  }

  void add(std::size_t r) {
    ++counts_.at(r);
    ++total_;
  }
  void remove(std::size_t r) {
    if (counts_.at(r) == 0) throw std::domain_error("CategoryCounts: removing from empty category");
    --counts_[r];
    --total_;
  }

  std::size_t size() const { return counts_.size(); }
  int operator[](std::size_t r) const { return counts_[r]; }
  int total() const { return total_; }
  std::span<const int> counts() const { return counts_; }

  bool operator==(const CategoryCounts&) const = default;

 private:
  std::vector<int> counts_;
  int total_ = 0;
};

/// ln p(observations | a) with the categorical parameters integrated out:
/// lnΓ(Σa) − lnΓ(Σa + N) + Σ_r [lnΓ(a_r + s_r) − lnΓ(a_r)].
inline double dirichlet_categorical_log_marginal(std::span<const int> counts, int total,
                                                 const Concentration& a) {
  if (counts.size() != a.size()) {
    throw std::domain_error("dirichlet_categorical_log_marginal: length mismatch");
  }
  if (total == 0) return 0.0;
  double value = a.log_gamma_sum() - log_gamma(a.sum() + total);
  for (std::size_t r = 0; r < counts.size(); ++r) {
    if (counts[r] > 0) value += log_gamma(a[r] + counts[r]) - log_gamma(a[r]);
  }
  return value;
}

inline double dirichlet_categorical_log_marginal(const CategoryCounts& counts,
                                                 const Concentration& a) {
  return dirichlet_categorical_log_marginal(counts.counts(), counts.total(), a);
}

/// ln p(next = category | counts, a) = ln[(a_c + s_c) / (Σa + N)].
inline double log_predictive(std::span<const int> counts, int total, std::size_t category,
                             const Concentration& a) {
  if (category >= counts.size() || counts.size() != a.size()) {
    throw std::domain_error("log_predictive: category out of range");
  }
  return std::log((a[category] + counts[category]) / (a.sum() + total));
}

inline double log_predictive(const CategoryCounts& counts, std::size_t category,
                             const Concentration& a) {
  return log_predictive(counts.counts(), counts.total(), category, a);
}

}  // namespace mvpr
