#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "smtt/core.hpp"
#include "smtt/datagen.hpp"
#include "smtt/discovery.hpp"
#include "smtt/expr.hpp"
#include "smtt/heuristics.hpp"

using namespace smtt;
namespace fs = std::filesystem;

namespace {
const Instance kSix({10, 11, 10, 10, 11, 10}, {15, 11, 13, 11, 12, 11});

std::vector<Instance> tiny_training() {
  return {kSix, Instance({3, 2, 4}, {2, 5, 7}), Instance({5, 4}, {1, 1})};
}
}  // namespace

TEST_CASE("expression parse and render round trips") {
  for (const char* text : {
           "P",
           "D",
           "T",
           "MAXP",
           "SUMP",
           "MEANP",
           "REMAINING",
           "1.5",
           "max(P + T, D)",
           "min(P / (T + MAXP), 1)",
           "square(P - D)",
           "P + T * D",
           "(P + T) * D",
           "P - (T - D)",
           "P / T / D",
           "P / (T / D)",
           "P * 1.1 + T",
           "max(P + T, D) * (1 + square(min(P / (T + MAXP), 1)))",
           "0 - P",
           "max(min(P, D), max(T, MEANP))",
       }) {
    const PriorityExpr e = PriorityExpr::parse(text);
    CHECK(e.str() == text);
    CHECK(PriorityExpr::parse(e.str()) == e);
  }
}

TEST_CASE("renderer drops only redundant parentheses") {
  CHECK(PriorityExpr::parse("(P) + (T)").str() == "P + T");
  CHECK(PriorityExpr::parse("(P + T) + D").str() == "P + T + D");
  CHECK(PriorityExpr::parse("P + (T + D)").str() == "P + T + D");
  CHECK(PriorityExpr::parse("P - (T + D)").str() == "P - (T + D)");
  CHECK(PriorityExpr::parse("(P - T) - D").str() == "P - T - D");
  CHECK(PriorityExpr::parse("(P + T) / D").str() == "(P + T) / D");
  CHECK(PriorityExpr::parse("((square(P)))").str() == "square(P)");
}

TEST_CASE("negative literals fold, negated terms subtract from zero") {
  CHECK(PriorityExpr::parse("-3").str() == "-3");
  const PriorityExpr neg = PriorityExpr::parse("-P");
  CHECK(neg.str() == "0 - P");
  JobFeatures f{};
  f.p = 4;
  CHECK(neg.eval(f) == -4.0);
}

TEST_CASE("parser rejects malformed input") {
  for (const char* bad : {"", "P +", "max(P)", "min(P, T, D)", "square(P, T)",
                          "foo", "p", "P T", "(P", "P)", "2..3", "P $ T",
                          "square()", "max(,)", "P 5"}) {
    CHECK_THROWS_AS(PriorityExpr::parse(bad), ExprParseError);
  }
}

TEST_CASE("evaluation is total and clamped") {
  JobFeatures f{};
  f.p = 3;
  f.d = -2;
  f.t = 10;
  f.max_p = 5;
  f.sum_p = 12;
  f.mean_p = 4;
  f.remaining = 3;

  CHECK(PriorityExpr::parse("P").eval(f) == 3.0);
  CHECK(PriorityExpr::parse("D").eval(f) == -2.0);
  CHECK(PriorityExpr::parse("T").eval(f) == 10.0);
  CHECK(PriorityExpr::parse("MAXP").eval(f) == 5.0);
  CHECK(PriorityExpr::parse("SUMP").eval(f) == 12.0);
  CHECK(PriorityExpr::parse("MEANP").eval(f) == 4.0);
  CHECK(PriorityExpr::parse("REMAINING").eval(f) == 3.0);
  CHECK(PriorityExpr::parse("max(P, T)").eval(f) == 10.0);
  CHECK(PriorityExpr::parse("min(P, D)").eval(f) == -2.0);
  CHECK(PriorityExpr::parse("square(P)").eval(f) == 9.0);

  // Division by an exact zero returns the sentinel instead of inf/NaN.
  JobFeatures zero{};
  CHECK(PriorityExpr::parse("P / T").eval(zero) == kDivSentinel);
  CHECK(PriorityExpr::parse("1 / (P - P)").eval(f) == kDivSentinel);
  CHECK(PriorityExpr::parse("0 / 0").eval(f) == kDivSentinel);

  // Magnitudes cap at the clamp bound; nothing non-finite escapes.
  JobFeatures huge{};
  huge.p = 1e300;
  CHECK(PriorityExpr::parse("P * P").eval(huge) == kExprClamp);
  CHECK(PriorityExpr::parse("0 - P * P").eval(huge) == -kExprClamp);
  CHECK(PriorityExpr::parse("square(P)").eval(huge) == kExprClamp);
  CHECK(std::isfinite(PriorityExpr::parse("P / 0.0000001").eval(huge)));
}

TEST_CASE("depth and size count the tree") {
  const PriorityExpr e = PriorityExpr::parse("max(P + T, D)");
  CHECK(e.depth() == 3);
  CHECK(e.size() == 5);
  CHECK(PriorityExpr::parse("P").depth() == 1);
  CHECK(PriorityExpr::parse("square(square(P))").depth() == 3);
}

TEST_CASE("structural mutation helpers") {
  const PriorityExpr base = PriorityExpr::parse("max(P + T, D)");
  CHECK(scale_terminal_occurrence(base, 0, 1.1).str() == "max(P * 1.1 + T, D)");
  CHECK(scale_terminal_occurrence(base, 1, 0.9).str() == "max(P + T * 0.9, D)");
  CHECK(scale_terminal_occurrence(base, 2, 1.2).str() == "max(P + T, D * 1.2)");
  CHECK_THROWS_AS(scale_terminal_occurrence(base, 3, 1.1), std::invalid_argument);

  const PriorityExpr with_consts = PriorityExpr::parse("P * 2 + T * 4");
  CHECK(scale_constant_occurrence(with_consts, 0, 0.5).str() == "P * 1 + T * 4");
  CHECK(scale_constant_occurrence(with_consts, 1, 0.5).str() == "P * 2 + T * 2");
  CHECK_THROWS_AS(scale_constant_occurrence(with_consts, 2, 2.0),
                  std::invalid_argument);
}

TEST_CASE("dispatch reproduces the reference rule") {
  const PriorityExpr rule = PriorityExpr::parse("max(P + T, D)");
  const auto order = dispatch(rule, kSix);
  CHECK(order == std::vector<int>{3, 5, 2, 0, 1, 4});
  CHECK(total_tardiness(kSix, Schedule{order}) == 141);
}

TEST_CASE("dispatch always yields a permutation") {
  Rng rng(2024);
  const PriorityExpr weird = PriorityExpr::parse("1");  // everything ties
  const PriorityExpr rule = PriorityExpr::parse("max(P + T, D) / (1 + square(D))");
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(30));
    std::vector<int> p(n), d(n);
    for (int i = 0; i < n; ++i) {
      p[i] = 1 + static_cast<int>(rng.below(40));
      d[i] = static_cast<int>(rng.below(150)) - 50;
    }
    const Instance inst(p, d);
    CHECK(is_permutation_of(dispatch(rule, inst), n));
    // Constant scores: ties collapse to (p, d, index) order.
    const auto tied = dispatch(weird, inst);
    CHECK(is_permutation_of(tied, n));
    for (std::size_t i = 1; i < tied.size(); ++i) {
      const int a = tied[i - 1], b = tied[i];
      const bool le =
          inst.ptime(a) < inst.ptime(b) ||
          (inst.ptime(a) == inst.ptime(b) &&
           (inst.due(a) < inst.due(b) ||
            (inst.due(a) == inst.due(b) && a < b)));
      CHECK(le);
    }
  }
}

TEST_CASE("score_program averages sandbox scores") {
  const auto training = tiny_training();
  const ScoreResult sr =
      score_program(PriorityExpr::parse("max(P + T, D)"), training);
  CHECK(sr.all_feasible);
  // Dispatch objectives: 141 on the six-job instance, 3 and 11 on the others.
  std::int64_t total = 0;
  for (const auto& inst : training)
    total +=
        total_tardiness(inst, Schedule{dispatch(PriorityExpr::parse("max(P + T, D)"), inst)});
  CHECK(sr.mean_score ==
        doctest::Approx(static_cast<double>(total) / training.size()));
  CHECK_THROWS_AS(score_program(PriorityExpr::parse("P"), {}),
                  std::invalid_argument);
}

TEST_CASE("island database keeps the first-found best on ties") {
  IslandDatabase db(3);
  ScoredProgram a{PriorityExpr::parse("P"), 10.0, 0, 1};
  ScoredProgram b{PriorityExpr::parse("D"), 10.0, 1, 2};
  ScoredProgram c{PriorityExpr::parse("T"), 8.0, 2, 3};
  db.add(a);
  db.add(b);
  CHECK(db.global_best().expr.str() == "P");  // tie: earlier insert wins
  db.add(c);
  CHECK(db.global_best().expr.str() == "T");
  CHECK(db.island(0).size() == 1);
  CHECK(db.island(1).size() == 1);
  CHECK(db.island(2).size() == 1);
}

TEST_CASE("reset clears the weaker half and reseeds from survivors") {
  // Ten islands with best scores 0..9 (island i holds score i).
  IslandDatabase db(10);
  for (int i = 0; i < 10; ++i) {
    ScoredProgram prog{PriorityExpr::constant(i), static_cast<double>(i), i, 1};
    db.add(prog);
    // A filler program so cleared islands visibly shrink.
    ScoredProgram filler{PriorityExpr::constant(100 + i),
                         static_cast<double>(100 + i), i, 2};
    db.add(filler);
  }
  const ScoredProgram best_before = db.global_best();
  Rng rng(5);
  const auto cleared = db.reset(rng);
  CHECK(cleared == std::vector<int>{5, 6, 7, 8, 9});  // weaker half, sorted
  CHECK(db.global_best().score == best_before.score);
  for (int i = 0; i < 5; ++i) CHECK(db.island(i).size() == 2);
  for (int i = 5; i < 10; ++i) {
    REQUIRE(db.island(i).size() == 1);  // reseeded with a single founder
    const double s = db.island(i)[0].score;
    CHECK(s <= 4.0);  // founder copied from some survivor's best
    CHECK(db.island(i)[0].island == i);
  }
}

TEST_CASE("odd island counts keep the strict majority") {
  IslandDatabase db(5);
  for (int i = 0; i < 5; ++i) {
    ScoredProgram prog{PriorityExpr::constant(i), static_cast<double>(i), i, 1};
    db.add(prog);
  }
  Rng rng(1);
  const auto cleared = db.reset(rng);
  CHECK(cleared == std::vector<int>{3, 4});  // ceil(5/2)=3 survive
}

TEST_CASE("empty islands never win a reset over seeded ones") {
  IslandDatabase db(4);
  ScoredProgram good{PriorityExpr::parse("P"), 5.0, 2, 1};
  db.add(good);
  Rng rng(9);
  const auto cleared = db.reset(rng);
  // Island 2 (the only nonempty one) must survive.
  for (int c : cleared) CHECK(c != 2);
  CHECK(db.global_best().score == 5.0);
}

TEST_CASE("prompt sampling prefers stronger programs") {
  IslandDatabase db(1);
  ScoredProgram strong{PriorityExpr::parse("P"), 10.0, 0, 1};
  ScoredProgram weak{PriorityExpr::parse("D"), 20.0, 0, 2};
  db.add(weak);
  db.add(strong);

  Rng rng(31337);
  int strong_first = 0;
  for (int i = 0; i < 10000; ++i) {
    const PromptSample s = sample_prompt(db, rng, 1);
    CHECK(s.island == 0);
    REQUIRE(s.programs.size() == 1);
    strong_first += s.programs[0].score == 10.0;
  }
  // Rank weights 1 : 1/2 -> the stronger program appears about 2/3 of the time.
  CHECK(strong_first > 6000);
  CHECK(strong_first < 7400);

  // With k=2 the prompt lists worst first, best last.
  const PromptSample both = sample_prompt(db, rng, 2);
  REQUIRE(both.programs.size() == 2);
  CHECK(both.programs[0].score == 20.0);
  CHECK(both.programs[1].score == 10.0);

  // k beyond the population clamps.
  const PromptSample all = sample_prompt(db, rng, 9);
  CHECK(all.programs.size() == 2);
}

TEST_CASE("prompt sampling skips empty islands") {
  IslandDatabase db(6);
  ScoredProgram only{PriorityExpr::parse("P"), 3.0, 4, 1};
  db.add(only);
  Rng rng(77);
  for (int i = 0; i < 50; ++i) CHECK(sample_prompt(db, rng, 2).island == 4);
  IslandDatabase empty(3);
  CHECK_THROWS_AS(sample_prompt(empty, rng, 1), std::logic_error);
}

TEST_CASE("rendered prompts list programs with scores, worst first") {
  IslandDatabase db(1);
  ScoredProgram strong{PriorityExpr::parse("P"), 10.0, 0, 1};
  ScoredProgram weak{PriorityExpr::parse("D"), 20.0, 0, 2};
  db.add(weak);
  db.add(strong);
  Rng rng(4);
  const PromptSample s = sample_prompt(db, rng, 2);
  const std::string prompt = render_prompt(s);
  const auto pos_weak = prompt.find("[score 20.000000]\nD");
  const auto pos_strong = prompt.find("[score 10.000000]\nP");
  REQUIRE(pos_weak != std::string::npos);
  REQUIRE(pos_strong != std::string::npos);
  CHECK(pos_weak < pos_strong);
  CHECK(prompt.find("single expression") != std::string::npos);
}

TEST_CASE("maybe_reset fires once per elapsed period") {
  IslandDatabase db(4);
  ScoredProgram seed{PriorityExpr::parse("P"), 1.0, 0, 0};
  db.add(seed);
  Rng rng(3);

  SUBCASE("disabled when nonpositive") {
    for (int i = 1; i <= 500; ++i) CHECK_FALSE(maybe_reset(db, i, 0, rng));
    CHECK_FALSE(maybe_reset(db, 1000, -5, rng));
  }
  SUBCASE("sliding window in whatever units the caller counts") {
    int fired = 0;
    for (int i = 1; i <= 200; ++i) fired += maybe_reset(db, i, 50, rng);
    CHECK(fired == 4);  // at 50, 100, 150, 200
    CHECK(db.last_reset == 200);
  }
}

TEST_CASE("stub mutator is deterministic and always parseable") {
  StubMutator mut(42);
  const std::string prompt = "[score 100.000000]\nmax(P + T, D)\n";
  const auto a = mut.propose(prompt);
  const auto b = mut.propose(prompt);
  REQUIRE(a.has_value());
  CHECK(*a == *b);
  CHECK_NOTHROW(PriorityExpr::parse(*a));

  StubMutator other(43);
  bool any_difference = false;
  for (int i = 0; i < 8; ++i) {
    const std::string pr =
        "[score " + std::to_string(100 + i) + ".000000]\nmax(P + T, D)\n";
    const auto x = StubMutator(42).propose(pr);
    const auto y = other.propose(pr);
    REQUIRE(x.has_value());
    REQUIRE(y.has_value());
    CHECK_NOTHROW(PriorityExpr::parse(*y));
    any_difference |= *x != *y;
  }
  CHECK(any_difference);
}

TEST_CASE("stub mutator needs a parseable base line") {
  StubMutator mut(1);
  CHECK_FALSE(mut.propose("no expressions here\n### markup ###\n").has_value());
  // The last parseable line is the base.
  const auto got = mut.propose("[score 1.0]\nP + D\n[score 2.0]\nT * 2\n");
  REQUIRE(got.has_value());
  CHECK(got->find("T") != std::string::npos);
}

TEST_CASE("stub mutator respects the depth bound") {
  StubMutator mut(7, /*max_depth=*/3);
  const std::string prompt = "[score 5.000000]\nmax(P + T, D)\n";  // depth 3
  for (int i = 0; i < 30; ++i) {
    const auto prop = mut.propose(prompt + std::string(i, ' '));
    REQUIRE(prop.has_value());
    CHECK(PriorityExpr::parse(*prop).depth() <= 4);  // one scale layer at most
  }
}

TEST_CASE("discovery with zero iterations returns the scored seed") {
  DiscoveryConfig cfg = DiscoveryConfig::desk();
  cfg.max_iterations = 0;
  StubMutator mut(cfg.seed);
  const DiscoveryResult res = run_discovery(cfg, mut);
  CHECK(res.iterations_run == 0);
  CHECK(res.log.empty());
  CHECK(res.best.expr.str() == "max(P + T, D)");
  CHECK(res.best.iteration == 0);
  CHECK(res.best.score > 0);
}

TEST_CASE("short discovery runs are reproducible and monotone") {
  DiscoveryConfig cfg = DiscoveryConfig::desk();
  cfg.max_iterations = 30;
  cfg.reset_period_iterations = 10;
  cfg.training.per_class = 1;

  StubMutator m1(cfg.seed), m2(cfg.seed);
  const DiscoveryResult a = run_discovery(cfg, m1);
  const DiscoveryResult b = run_discovery(cfg, m2);
  CHECK(a.iterations_run == 30);
  REQUIRE(a.log.size() == 30);
  CHECK(discovery_log_csv(a.log) == discovery_log_csv(b.log));
  CHECK(a.best.expr == b.best.expr);
  CHECK(a.best.score == b.best.score);
  CHECK(a.reset_iterations == std::vector<std::int64_t>{10, 20, 30});

  double prev = a.log.front().best_score;
  for (const auto& row : a.log) {
    CHECK(row.best_score <= prev);
    prev = row.best_score;
    CHECK(row.iteration >= 1);
    CHECK(row.island >= 0);
    CHECK(row.island < cfg.islands);
  }
}

TEST_CASE("discovery skips unusable proposals without losing the best") {
  struct FlakyMutator : Mutator {
    int calls = 0;
    std::optional<std::string> propose(const std::string&) override {
      switch (calls++ % 4) {
        case 0: return std::nullopt;                   // refusal
        case 1: return "this is not an expression";    // parse failure
        case 2: return std::string("P + unknowntoken");
        default: return std::string("max(P + T, D) * 1.05");
      }
    }
  };
  DiscoveryConfig cfg = DiscoveryConfig::desk();
  cfg.max_iterations = 12;
  cfg.reset_period_iterations = 0;
  cfg.training.per_class = 1;
  FlakyMutator mut;
  const DiscoveryResult res = run_discovery(cfg, mut);
  CHECK(res.iterations_run == 12);
  REQUIRE(res.log.size() == 12);
  int skipped = 0;
  for (const auto& row : res.log) {
    if (!row.candidate_score) ++skipped;
    CHECK(row.best_score <= res.log.front().best_score);
  }
  CHECK(skipped == 9);  // three of every four proposals are unusable
  CHECK(res.best.score > 0);
}

TEST_CASE("discovery log csv layout") {
  std::vector<DiscoveryLogRow> rows;
  rows.push_back({1, 12.5, 12.5, 3});
  rows.push_back({2, std::nullopt, 12.5, 0});
  CHECK(discovery_log_csv(rows) ==
        "iteration,candidate_score,best_score,island\n"
        "1,12.500000,12.500000,3\n"
        "2,,12.500000,0\n");
}

TEST_CASE("discovery writes its log file when asked") {
  const fs::path log = fs::temp_directory_path() / "smtt_disc_log.csv";
  fs::remove(log);
  DiscoveryConfig cfg = DiscoveryConfig::desk();
  cfg.max_iterations = 5;
  cfg.training.per_class = 1;
  cfg.log_path = log.string();
  StubMutator mut(cfg.seed);
  const DiscoveryResult res = run_discovery(cfg, mut);
  std::ifstream in(log);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  CHECK(os.str() == discovery_log_csv(res.log));
  fs::remove(log);
}
