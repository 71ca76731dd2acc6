#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace smtt {

// One scheduling problem: n jobs on a single machine, integer processing
// times (>= 1) and integer due dates (may be negative). Immutable after
// construction.
class Instance {
public:
  Instance(std::vector<int> p, std::vector<int> d);

  int jobs() const { return static_cast<int>(p_.size()); }
  int ptime(int j) const { return p_[j]; }
  int due(int j) const { return d_[j]; }
  const std::vector<int>& ptimes() const { return p_; }
  const std::vector<int>& dues() const { return d_; }
  std::int64_t total_ptime() const { return total_p_; }  // sum of all p_j

  bool operator==(const Instance&) const = default;

private:
  std::vector<int> p_;
  std::vector<int> d_;
  std::int64_t total_p_ = 0;
};

// A solution: the job index run at each position.
struct Schedule {
  std::vector<int> order;
};

bool is_permutation_of(std::span<const int> order, int n);

// Completion time of each job (indexed by job, not position).
std::vector<std::int64_t> completion_times(const Instance&, const Schedule&);

// Sum over jobs of max{0, C_j - d_j}. Throws if the order is not a
// permutation of 0..n-1.
std::int64_t total_tardiness(const Instance&, const Schedule&);

struct EvalOutcome {
  bool feasible = false;
  std::int64_t total_tardiness = 0;  // meaningful only when feasible
  std::int64_t score = 0;            // == total_tardiness when feasible, else penalty
};

// Penalty charged for a non-permutation candidate. Strictly larger than the
// total tardiness of any permutation: every C_j <= P and every per-job
// tardiness is at most P + max(0, -d_j), so n * (P + max(0, -min d)) + 1 is
// a strict upper bound even with negative due dates.
std::int64_t sandbox_penalty(const Instance&);

// Total evaluation of an untrusted candidate order: never throws, never
// mutates the instance. Anything that is not a permutation of 0..n-1 is
// infeasible and scores the penalty.
EvalOutcome evaluate_candidate(const Instance&, std::span<const int> proposed);

// (heuristic - optimal) / optimal * 100. Rejects optimal <= 0; callers are
// expected to exclude zero-optimal instances before averaging gaps.
double optimality_gap_percent(std::int64_t heuristic_value, std::int64_t optimal_value);

}  // namespace smtt
