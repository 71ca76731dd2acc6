#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "smtt/core.hpp"
#include "smtt/datagen.hpp"

using namespace smtt;

namespace {
const Instance kSix({10, 11, 10, 10, 11, 10}, {15, 11, 13, 11, 12, 11});
}

TEST_CASE("instance validation") {
  CHECK_THROWS_AS(Instance({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(Instance({1, 2}, {3}), std::invalid_argument);
  CHECK_THROWS_AS(Instance({0}, {3}), std::invalid_argument);
  CHECK_THROWS_AS(Instance({-5}, {3}), std::invalid_argument);
  const Instance neg({4}, {-7});  // negative due dates are legal
  CHECK(neg.due(0) == -7);
  CHECK(kSix.jobs() == 6);
  CHECK(kSix.total_ptime() == 62);
}

TEST_CASE("completion times are job indexed") {
  const Schedule order{{1, 0, 2, 3, 5, 4}};
  const auto c = completion_times(kSix, order);
  CHECK(c == std::vector<std::int64_t>{21, 11, 31, 41, 62, 51});
}

TEST_CASE("total tardiness on reference schedules") {
  CHECK(total_tardiness(kSix, Schedule{{1, 0, 2, 3, 5, 4}}) == 144);
  CHECK(total_tardiness(kSix, Schedule{{3, 5, 2, 0, 1, 4}}) == 141);
  CHECK(total_tardiness(kSix, Schedule{{3, 5, 1, 4, 2, 0}}) == 145);

  const Instance small({3, 2, 4}, {2, 5, 7});
  CHECK(total_tardiness(small, Schedule{{0, 1, 2}}) == 3);
}

TEST_CASE("total tardiness rejects non-permutations") {
  CHECK_THROWS_AS(total_tardiness(kSix, Schedule{{0, 1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(total_tardiness(kSix, Schedule{{0, 0, 1, 2, 3, 4}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(total_tardiness(kSix, Schedule{{0, 1, 2, 3, 4, 6}}),
                  std::invalid_argument);
}

TEST_CASE("is_permutation_of") {
  const std::vector<int> good{2, 0, 1};
  CHECK(is_permutation_of(good, 3));
  CHECK_FALSE(is_permutation_of(std::vector<int>{0, 0, 1}, 3));
  CHECK_FALSE(is_permutation_of(std::vector<int>{0, 1}, 3));
  CHECK_FALSE(is_permutation_of(std::vector<int>{0, 1, 3}, 3));
  CHECK_FALSE(is_permutation_of(std::vector<int>{-1, 1, 0}, 3));
}

TEST_CASE("optimality gap") {
  CHECK(optimality_gap_percent(144, 141) == doctest::Approx(2.1277).epsilon(1e-4));
  CHECK(optimality_gap_percent(141, 141) == 0.0);
  CHECK_THROWS_AS(optimality_gap_percent(5, 0), std::invalid_argument);
  CHECK_THROWS_AS(optimality_gap_percent(5, -1), std::invalid_argument);
}

TEST_CASE("penalty strictly dominates any achievable tardiness") {
  Rng rng(555);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(7));
    std::vector<int> p(n), d(n);
    for (int i = 0; i < n; ++i) {
      p[i] = 1 + static_cast<int>(rng.below(50));
      d[i] = static_cast<int>(rng.below(120)) - 60;  // negatives included
    }
    const Instance inst(p, d);
    const std::int64_t penalty = sandbox_penalty(inst);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    do {
      CHECK(total_tardiness(inst, Schedule{order}) < penalty);
    } while (std::next_permutation(order.begin(), order.end()) && n <= 5);
  }
}

TEST_CASE("evaluate_candidate never throws and never mutates the instance") {
  const Instance before = kSix;

  SUBCASE("feasible order scores its tardiness") {
    const std::vector<int> order{3, 5, 2, 0, 1, 4};
    const auto out = evaluate_candidate(kSix, order);
    CHECK(out.feasible);
    CHECK(out.total_tardiness == 141);
    CHECK(out.score == 141);
  }
  SUBCASE("corrupt orders score the penalty") {
    const std::int64_t penalty = sandbox_penalty(kSix);
    for (const auto& bad : std::vector<std::vector<int>>{
             {},                      // empty
             {0, 1, 2},               // short
             {0, 1, 2, 3, 4, 5, 0},   // long
             {0, 0, 1, 2, 3, 4},      // duplicate
             {0, 1, 2, 3, 4, 6},      // out of range
             {-1, 1, 2, 3, 4, 5}}) {  // negative
      const auto out = evaluate_candidate(kSix, bad);
      CHECK_FALSE(out.feasible);
      CHECK(out.score == penalty);
    }
  }
  CHECK(kSix == before);
  CHECK(instance_to_string(kSix) == instance_to_string(before));
}
