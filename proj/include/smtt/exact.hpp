#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "smtt/core.hpp"

namespace smtt {

// Exhaustive search over all n! orders, n <= 10. Returns the
// lexicographically smallest optimal order.
struct BruteForceResult {
  Schedule schedule;
  std::int64_t value;
};
BruteForceResult brute_force_optimal(const Instance&);

inline constexpr int kDefaultDpCap = 22;

// Thrown when an instance exceeds the subset-DP cap; the message carries a
// memory estimate for the table that would have been needed.
struct DpCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// values[mask] = minimal total tardiness of scheduling exactly the jobs in
// `mask` first (in some order), for every subset mask. values[0] == 0 and
// values[full] is the instance optimum.
struct DpTable {
  int n;
  std::vector<std::int64_t> values;
};
DpTable dp_table(const Instance&, int cap = kDefaultDpCap);

struct DpResult {
  std::int64_t value;
  Schedule schedule;  // reconstructed by backtracking over the value table
};
DpResult dp_optimal(const Instance&, int cap = kDefaultDpCap);

// Completion-time lower-bound coefficient for "job j at position k"
// (1-based j and k, k >= 2):
//   k <= j: sum of p_1..p_{k-1}
//   k >  j: sum of p_1..p_{j-1} plus p_{j+1}..p_k
// With p sorted nondecreasing this equals the sum of the k-1 smallest
// processing times excluding job j, i.e. the least work that can precede
// position k; descending input makes the bound unsound.
std::int64_t pi_coefficient(std::span<const int> sorted_p, int j, int k);

enum class RowSense { Eq, Ge };

struct MipRow {
  std::string name;
  std::vector<std::pair<std::string, std::int64_t>> terms;
  RowSense sense;
  std::int64_t rhs;
};

// Positional-assignment formulation. Binaries u_j_k put job j at position k;
// continuous c_k track positional completion times, C_j per-job completion,
// T_j per-job tardiness; the objective minimizes sum of T_j. With
// with_vi the jobs are reindexed by nondecreasing processing time (ties:
// lower original index first) and one completion-time lower-bound row per
// job is added.
struct MipModel {
  int n = 0;
  std::vector<int> p, d;         // in model job order
  std::vector<int> job_map;      // model job index -> original job index
  std::int64_t big_m = 0;        // sum of processing times
  bool with_vi = false;
  std::vector<MipRow> rows;
  std::vector<std::string> continuous_vars;  // c_k, C_j, T_j
  std::vector<std::string> binary_vars;      // u_j_k, j-major
};
MipModel build_mip(const Instance&, bool with_vi);

// Deterministic LP-format text: sections Minimize / Subject To / Bounds /
// Binary / End, objective row "obj", byte-identical across runs.
std::string export_lp(const MipModel&);

// Substitutes the natural assignment induced by a schedule (given in
// original job ids) into every model row.
struct AssignmentCheck {
  bool feasible = false;
  std::int64_t objective = 0;
  std::vector<std::string> violated;  // names of unsatisfied rows
};
AssignmentCheck evaluate_assignment(const MipModel&, const Schedule&);

}  // namespace smtt
