#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "smtt/datagen.hpp"
#include "smtt/expr.hpp"

namespace smtt {

// Greedy dispatcher: repeatedly scores every unscheduled job with the
// expression and runs the lowest-scoring one next. Unscheduled jobs are kept
// in (p, d, index) order and near-ties (within kScoreEps) go to the earliest
// of them. Always returns a valid permutation.
std::vector<int> dispatch(const PriorityExpr&, const Instance&);

using DispatchFn =
    std::function<std::vector<int>(const PriorityExpr&, const Instance&)>;

// Mean evaluator score of the dispatched orders over a training set. Orders
// pass through evaluate_candidate, so an ill-behaved custom dispatcher is
// penalized rather than trusted; all_feasible reports whether every order
// was a real permutation.
struct ScoreResult {
  double mean_score = 0;
  bool all_feasible = true;
};
ScoreResult score_program(const PriorityExpr&, const std::vector<Instance>& training,
                          const DispatchFn& = dispatch);

struct ScoredProgram {
  PriorityExpr expr;
  double score = 0;   // sandbox-computed, never self-reported
  int island = 0;
  std::int64_t iteration = 0;
};

// Fixed set of islands, each an append-only list of scored programs with a
// cached best. Periodic resets clear the weaker islands and reseed each from
// the best program of a surviving island.
class IslandDatabase {
public:
  explicit IslandDatabase(int islands);

  int island_count() const { return static_cast<int>(islands_.size()); }
  const std::vector<ScoredProgram>& island(int i) const { return islands_[i]; }
  bool island_empty(int i) const { return islands_[i].empty(); }
  double island_best_score(int i) const;  // +inf when empty
  const ScoredProgram* island_best(int i) const;

  bool empty() const;
  const ScoredProgram& global_best() const;  // throws when empty

  // Appends to the program's island and refreshes the caches.
  void add(const ScoredProgram&);

  // Ranks islands by best score (ties: lower id ranks stronger), keeps the
  // strongest ceil(I/2) untouched, clears the rest, and reseeds each cleared
  // island with a copy of the best program of a uniformly chosen survivor.
  // Returns the ids of the reset islands.
  std::vector<int> reset(Rng&);

  double last_reset = 0;  // in the clock units maybe_reset is driven with

private:
  std::vector<std::vector<ScoredProgram>> islands_;
  std::vector<int> best_index_;  // -1 when island empty
};

void register_program(IslandDatabase&, const ScoredProgram&);

// Fires a reset once `period` units have elapsed since the previous one.
bool maybe_reset(IslandDatabase&, double now, double period, Rng&);

// Uniform island choice, then up to sample_k programs drawn without
// replacement with probability proportional to 1/rank (rank 1 = best
// score). Returned worst-to-best so the strongest program comes last.
struct PromptSample {
  int island = 0;
  std::vector<ScoredProgram> programs;
};
PromptSample sample_prompt(const IslandDatabase&, Rng&, int sample_k);

// Problem description plus the sampled programs, worst first, each preceded
// by its mean score; ends by asking for a single improved expression.
std::string render_prompt(const PromptSample&);

// A proposal source. Returns expression text, or nullopt when no usable
// proposal could be produced for this prompt.
class Mutator {
public:
  virtual ~Mutator() = default;
  virtual std::optional<std::string> propose(const std::string& prompt) = 0;
};

// Deterministic built-in mutator: seeds a generator from (seed, prompt
// bytes), picks the last parseable expression in the prompt as the base, and
// applies one structural edit from a fixed pool (constant perturbation,
// terminal scaling, grafting a load- or pressure-style subterm). The same
// seed and prompt always produce the same proposal.
class StubMutator : public Mutator {
public:
  explicit StubMutator(std::uint64_t seed, int max_depth = 16);
  std::optional<std::string> propose(const std::string& prompt) override;

private:
  std::uint64_t seed_;
  int max_depth_;
};

// Mutation primitives used by StubMutator, exposed for direct testing.
// Occurrences count Terminal nodes in node order; out-of-range throws.
PriorityExpr scale_terminal_occurrence(const PriorityExpr&, int occurrence,
                                       double factor);
PriorityExpr scale_constant_occurrence(const PriorityExpr&, int occurrence,
                                       double factor);

struct TrainingSpec {
  int n = 25;
  int per_class = 400;            // classes = training_grid => 25 * per_class instances
  std::uint64_t seed = 2024;
  Distribution dist = Distribution::UniformProcessing;
};

struct DiscoveryConfig {
  int islands = 10;
  int sample_k = 2;
  double reset_period_seconds = 14400;
  std::int64_t reset_period_iterations = 0;  // > 0 switches resets to iteration counting
  std::int64_t max_iterations = 10000;
  double wall_clock_limit_seconds = 259200;
  std::uint64_t seed = 1;
  int max_expr_depth = 16;
  std::string initial_expression = "max(P + T, D)";
  std::string log_path;  // empty = keep the log in memory only
  TrainingSpec training;

  // Small configuration for interactive use and tests: 100 training
  // instances, 200 iterations, resets every 50 iterations.
  static DiscoveryConfig desk();
};

struct DiscoveryLogRow {
  std::int64_t iteration = 0;
  std::optional<double> candidate_score;  // empty when the iteration was skipped
  double best_score = 0;
  int island = 0;
};

struct DiscoveryResult {
  ScoredProgram best;
  std::vector<DiscoveryLogRow> log;
  std::vector<std::int64_t> reset_iterations;
  std::int64_t iterations_run = 0;
};

std::string discovery_log_csv(const std::vector<DiscoveryLogRow>&);

// Seeds every island with the scored initial expression, then iterates
// sample -> propose -> parse -> score -> register until max_iterations or
// the wall-clock limit. Proposals that fail to parse, exceed the depth
// bound, or dispatch infeasibly are logged and skipped; they never enter
// the database. With the stub mutator the whole run is a pure function of
// the configuration.
DiscoveryResult run_discovery(const DiscoveryConfig&, Mutator&);

}  // namespace smtt
