#include <gtest/gtest.h>

#include <random>

#include "mvpr/model.hpp"
#include "test_helpers.hpp"

using namespace mvpr;
using testing_helpers::random_dataset;

namespace {

int total_size(const LatentState& s, int view) {
  int total = 0;
  for (const auto& c : s.view_stats(view).components) total += c.size;
  return total;
}

}  // namespace

TEST(InitState, AllVariablesInRelevantViewSingleComponent) {
  const auto data = random_dataset(20, 6, 3, 2, 1);
  const auto hp = Hyperparameters::defaults(data, 3);
  const LatentState s = init_state(data, hp);
  for (int g : s.gamma) EXPECT_EQ(g, 1);
  EXPECT_EQ(s.nu, 1);
  EXPECT_EQ(s.occupied(1), 1);
  EXPECT_EQ(s.occupied(2), 1);
  for (int k : s.labels(1)) EXPECT_EQ(k, 0);
  EXPECT_DOUBLE_EQ(s.alpha[0], 2.0);  // Gamma(2, 1) prior mean
  EXPECT_NO_THROW(check_consistency(s, data));
  EXPECT_EQ(recount(s, data), s);
}

TEST(InitState, SingleIndividual) {
  const auto data = random_dataset(1, 3, 2, 2, 2);
  const LatentState s = init_state(data, Hyperparameters::defaults(data, 2));
  EXPECT_EQ(s.occupied(1), 1);
  EXPECT_EQ(s.view_stats(1).components[0].size, 1);
}

TEST(InitState, FixedAlphaAndMissingResponse) {
  auto data = random_dataset(5, 2, 2, 0, 3);
  auto hp = Hyperparameters::defaults(data, 2);
  hp.alpha = {AlphaSetting::fixed(0.7)};
  EXPECT_DOUBLE_EQ(init_state(data, hp).alpha[0], 0.7);
  hp.supervised = true;
  EXPECT_THROW(init_state(data, hp), ConfigError);
}

TEST(Hyperparameters, Validation) {
  const auto data = random_dataset(5, 2, 2, 2, 3);
  auto hp = Hyperparameters::defaults(data, 3);
  EXPECT_NO_THROW(validate(hp, data));
  auto bad = hp;
  bad.views = 1;
  EXPECT_THROW(validate(bad, data), ConfigError);
  bad = hp;
  bad.view_prior = {0.5, 0.5, 0.5};
  EXPECT_THROW(validate(bad, data), ConfigError);
  bad = hp;
  bad.alpha[0] = AlphaSetting::gamma_prior(0.0, 1.0);
  EXPECT_THROW(validate(bad, data), ConfigError);
  bad = hp;
  bad.alpha[1] = AlphaSetting::fixed(-1.0);
  EXPECT_THROW(validate(bad, data), ConfigError);
}

TEST(Dataset, ValidationRejectsOutOfRange) {
  auto data = random_dataset(4, 2, 3, 2, 4);
  data.cells[3] = 3;
  EXPECT_THROW(validate(data), DataError);
  data = random_dataset(4, 2, 3, 2, 4);
  (*data.response)[0] = 5;
  EXPECT_THROW(validate(data), DataError);
}

TEST(RemoveAdd, RoundTripRestoresState) {
  const auto data = random_dataset(12, 4, 3, 2, 5);
  const auto hp = Hyperparameters::defaults(data, 3);
  LatentState s = init_state(data, hp);
  remove_individual(s, data, 1, 0);
  add_individual(s, data, 1, 0, kNewComponent);
  remove_individual(s, data, 1, 1);
  add_individual(s, data, 1, 1, 1);
  const LatentState before = s;
  remove_individual(s, data, 1, 1);
  EXPECT_EQ(total_size(s, 1), data.n - 1);
  add_individual(s, data, 1, 1, 1);
  EXPECT_EQ(s, before);
}

TEST(RemoveAdd, SoleMemberVacatesComponent) {
  const auto data = random_dataset(6, 3, 2, 2, 6);
  const auto hp = Hyperparameters::defaults(data, 2);
  LatentState s = init_state(data, hp);
  remove_individual(s, data, 1, 2);
  EXPECT_EQ(add_individual(s, data, 1, 2, kNewComponent), 1);
  EXPECT_EQ(s.occupied(1), 2);
  const LatentState before = s;
  remove_individual(s, data, 1, 2);
  EXPECT_EQ(s.occupied(1), 1);
  EXPECT_EQ(s.view_stats(1).components.size(), 1u);
  EXPECT_EQ(add_individual(s, data, 1, 2, kNewComponent), 1);  // smallest unused label
  EXPECT_EQ(s, before);
}

TEST(RemoveAdd, ReusesSmallestVacantLabel) {
  const auto data = random_dataset(5, 2, 2, 0, 7);
  auto hp = Hyperparameters::defaults(data, 2);
  LatentState s = init_state(data, hp);
  for (int i = 1; i < 4; ++i) {
    remove_individual(s, data, 1, i);
    add_individual(s, data, 1, i, kNewComponent);
  }
  EXPECT_EQ(s.labels(1), (std::vector<int>{0, 1, 2, 3, 0}));
  remove_individual(s, data, 1, 2);  // vacates label 2
  EXPECT_EQ(add_individual(s, data, 1, 2, kNewComponent), 2);
  EXPECT_NO_THROW(check_consistency(s, data));
}

TEST(RemoveAdd, Errors) {
  const auto data = random_dataset(4, 2, 2, 2, 8);
  LatentState s = init_state(data, Hyperparameters::defaults(data, 2));
  remove_individual(s, data, 1, 0);
  EXPECT_THROW(remove_individual(s, data, 1, 0), InvariantError);
  EXPECT_THROW(add_individual(s, data, 1, 0, 5), InvariantError);
  EXPECT_THROW(add_individual(s, data, 1, 1, 0), InvariantError);  // already allocated
  EXPECT_THROW(remove_individual(s, data, 0, 1), InvariantError);  // null view has no allocations
}

TEST(MoveVariable, NoOpAndInverse) {
  const auto data = random_dataset(15, 5, 3, 2, 9);
  LatentState s = init_state(data, Hyperparameters::defaults(data, 3));
  std::mt19937_64 rng(1);
  for (int i = 0; i < data.n; ++i) {
    remove_individual(s, data, 1, i);
    add_individual(s, data, 1, i, i % 3 == 0 ? kNewComponent : 0);
  }
  const LatentState base = s;
  move_variable(s, data, 2, 1);
  EXPECT_EQ(s, base);
  move_variable(s, data, 2, 0);
  EXPECT_NO_THROW(check_consistency(s, data));
  move_variable(s, data, 2, 1);
  EXPECT_EQ(s, base);
  move_variable(s, data, 3, 2);
  move_variable(s, data, 3, 1);
  EXPECT_EQ(s, base);
}

TEST(MoveVariable, RandomOperationsKeepCacheCoherent) {
  const auto data = random_dataset(25, 7, 4, 3, 10);
  auto hp = Hyperparameters::defaults(data, 4);
  LatentState s = init_state(data, hp);
  std::mt19937_64 rng(99);
  for (int step = 0; step < 2000; ++step) {
    const int op = std::uniform_int_distribution<int>(0, 2)(rng);
    if (op < 2) {
      const int view = std::uniform_int_distribution<int>(1, 3)(rng);
      const int i = std::uniform_int_distribution<int>(0, data.n - 1)(rng);
      remove_individual(s, data, view, i);
      const auto& comps = s.view_stats(view).components;
      std::vector<int> occupied;
      for (std::size_t k = 0; k < comps.size(); ++k) {
        if (comps[k].size > 0) occupied.push_back(static_cast<int>(k));
      }
      const int pick = std::uniform_int_distribution<int>(0, static_cast<int>(occupied.size()))(rng);
      add_individual(s, data, view, i, pick == static_cast<int>(occupied.size()) ? kNewComponent : occupied[static_cast<std::size_t>(pick)]);
    } else {
      move_variable(s, data, std::uniform_int_distribution<int>(0, data.P - 1)(rng),
                    std::uniform_int_distribution<int>(0, 3)(rng));
    }
    ASSERT_NO_THROW(check_consistency(s, data)) << "step " << step;
    for (int view = 1; view < 4; ++view) {
      ASSERT_EQ(total_size(s, view), data.n);
      for (const auto& c : s.view_stats(view).components) {
        if (s.track_response) {
          int ytotal = 0;
          for (int v : c.y) ytotal += v;
          ASSERT_EQ(ytotal, c.size);
        }
      }
    }
  }
}

TEST(Consistency, DetectsCorruptedCache) {
  const auto data = random_dataset(8, 3, 2, 2, 12);
  LatentState s = init_state(data, Hyperparameters::defaults(data, 2));
  s.view_stats(1).components[0].x[0] += 1;
  EXPECT_THROW(check_consistency(s, data), InvariantError);
}
