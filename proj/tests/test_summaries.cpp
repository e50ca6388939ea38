#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mvpr/summaries.hpp"
#include "oracles.hpp"

using namespace mvpr;

namespace {

PosteriorTrace trace_from(int n, int P, int L, const std::vector<std::vector<int>>& z1,
                          const std::vector<std::vector<int>>& gammas) {
  PosteriorTrace t;
  t.n = n;
  t.P = P;
  t.L = L;
  for (std::size_t r = 0; r < z1.size(); ++r) {
    TraceRecord rec;
    rec.iteration = static_cast<int>(r + 1);
    rec.nu = 1;
    rec.alpha.assign(static_cast<std::size_t>(L - 1), 1.0);
    rec.gamma = gammas[r];
    rec.z.assign(static_cast<std::size_t>(L - 1), std::vector<int>(static_cast<std::size_t>(n), 0));
    rec.z[0] = z1[r];
    t.records.push_back(rec);
  }
  return t;
}

}  // namespace

TEST(Ari, KnownValues) {
  EXPECT_NEAR(adjusted_rand_index({1, 1, 2, 2}, {1, 2, 1, 2}), -0.5, 1e-15);
  EXPECT_NEAR(adjusted_rand_index({1, 1, 2, 2}, {1, 2, 1, 2}), oracle::brute_force_ari({1, 1, 2, 2}, {1, 2, 1, 2}), 1e-15);
  EXPECT_EQ(adjusted_rand_index({1, 1, 2, 2}, {7, 7, 3, 3}), 1.0);
  EXPECT_EQ(adjusted_rand_index({0, 0, 0}, {5, 5, 5}), 1.0);
  EXPECT_EQ(adjusted_rand_index({0, 1, 2}, {2, 0, 1}), 1.0);
  EXPECT_THROW(adjusted_rand_index({0, 1}, {0}), std::domain_error);
}

TEST(Ari, SingletonsAgainstSixClustersIsZero) {
  std::vector<int> singletons(300), six(300);
  for (int i = 0; i < 300; ++i) {
    singletons[static_cast<std::size_t>(i)] = i;
    six[static_cast<std::size_t>(i)] = i % 6;
  }
  EXPECT_NEAR(adjusted_rand_index(singletons, six), 0.0, 1e-12);
}

TEST(Ari, SymmetricLabelInvariantAndMatchesBruteForce) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 300; ++t) {
    const int n = 2 + static_cast<int>(rng() % 30);
    std::vector<int> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    for (auto& v : a) v = static_cast<int>(rng() % 4);
    for (auto& v : b) v = static_cast<int>(rng() % 5);
    const double ab = adjusted_rand_index(a, b);
    EXPECT_EQ(ab, adjusted_rand_index(b, a));
    std::vector<int> relabelled = a;
    for (auto& v : relabelled) v = 10 - 3 * v;
    EXPECT_EQ(ab, adjusted_rand_index(relabelled, b));
    // The oracle is 0/0 when both partitions are trivial; that convention is checked above.
    const double ref = oracle::brute_force_ari(a, b);
    if (std::isfinite(ref)) {
      EXPECT_NEAR(ab, ref, 1e-12);
    }
    EXPECT_LE(ab, 1.0);
  }
}

TEST(Psm, PropertiesAndConcatenationMean) {
  std::mt19937_64 rng(4);
  auto random_trace = [&](int sweeps) {
    std::vector<std::vector<int>> z, g;
    for (int s = 0; s < sweeps; ++s) {
      std::vector<int> labels(7);
      for (auto& v : labels) v = static_cast<int>(rng() % 3);
      z.push_back(labels);
      g.push_back({static_cast<int>(rng() % 3), static_cast<int>(rng() % 3)});
    }
    return trace_from(7, 2, 3, z, g);
  };
  const auto a = random_trace(40);
  const auto b = random_trace(60);
  auto both = a;
  both.records.insert(both.records.end(), b.records.begin(), b.records.end());
  const auto pa = posterior_similarity_matrix(a, 1);
  const auto pb = posterior_similarity_matrix(b, 1);
  const auto pab = posterior_similarity_matrix(both, 1);
  for (int i = 0; i < 7; ++i) {
    EXPECT_EQ(pab(i, i), 1.0);
    for (int j = 0; j < 7; ++j) {
      EXPECT_EQ(pab(i, j), pab(j, i));
      EXPECT_GE(pab(i, j), 0.0);
      EXPECT_LE(pab(i, j), 1.0);
      EXPECT_NEAR(pab(i, j), (40 * pa(i, j) + 60 * pb(i, j)) / 100.0, 1e-12);
    }
  }
  // View 2 is all zeros in every record: everyone always together.
  const auto p2 = posterior_similarity_matrix(both, 2);
  for (double v : p2.values) EXPECT_EQ(v, 1.0);
  EXPECT_THROW(posterior_similarity_matrix(both, 0), std::domain_error);
}

TEST(Selection, RowsSumToOneAndThresholdMonotone) {
  const auto t = trace_from(2, 2, 3, {{0, 0}, {0, 1}, {1, 1}, {0, 0}},
                            {{1, 0}, {1, 2}, {1, 2}, {0, 2}});
  const auto probs = view_selection_probabilities(t);
  EXPECT_EQ(probs(0, 1), 0.75);
  EXPECT_EQ(probs(0, 0), 0.25);
  EXPECT_EQ(probs(1, 2), 0.75);
  for (int j = 0; j < 2; ++j) EXPECT_NEAR(probs(j, 0) + probs(j, 1) + probs(j, 2), 1.0, 1e-15);
  std::size_t previous = 3;
  for (double th : {0.0, 0.25, 0.5, 0.75, 0.9, 1.0}) {
    const auto sel = threshold_selected_variables(probs, 1, th);
    EXPECT_LE(sel.size(), previous);
    previous = sel.size();
  }
  EXPECT_EQ(threshold_selected_variables(probs, 1, 0.75), std::vector<int>{0});
  EXPECT_THROW(threshold_selected_variables(probs, 1, 1.5), std::domain_error);
}

TEST(AriDistribution, OnePerRecord) {
  const auto t = trace_from(4, 1, 2, {{0, 0, 1, 1}, {0, 1, 0, 1}}, {{1}, {1}});
  const auto d = ari_distribution(t, {3, 3, 4, 4}, 1);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0], 1.0);
  EXPECT_NEAR(d[1], -0.5, 1e-15);
  EXPECT_THROW(ari_distribution(t, {1, 2}, 1), std::domain_error);
}

TEST(Relevant, FollowsNuPerRecord) {
  auto t = trace_from(4, 2, 3, {{0, 0, 1, 1}, {0, 0, 1, 1}}, {{1, 2}, {2, 2}});
  t.records[1].nu = 2;
  t.records[1].z[1] = {0, 1, 0, 1};
  const auto sel = relevant_view_selection(t);
  EXPECT_EQ(sel, (std::vector<double>{1.0, 0.5}));
  const auto ari = relevant_ari_distribution(t, {0, 0, 1, 1});
  EXPECT_EQ(ari[0], 1.0);
  EXPECT_NEAR(ari[1], -0.5, 1e-15);
  // With nu held at 1 the relevant column is view 1.
  t.records[1].nu = 1;
  const auto probs = view_selection_probabilities(t);
  const auto held = relevant_view_selection(t);
  for (int j = 0; j < 2; ++j) EXPECT_EQ(held[static_cast<std::size_t>(j)], probs(j, 1));
}
