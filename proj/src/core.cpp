#include "smtt/core.hpp"

#include <algorithm>
#include <numeric>

namespace smtt {

Instance::Instance(std::vector<int> p, std::vector<int> d)
    : p_(std::move(p)), d_(std::move(d)) {
  if (p_.empty())
    throw std::invalid_argument("instance: at least one job required");
  if (p_.size() != d_.size())
    throw std::invalid_argument("instance: processing-time and due-date counts differ");
  for (int v : p_)
    if (v < 1) throw std::invalid_argument("instance: processing times must be >= 1");
  total_p_ = std::accumulate(p_.begin(), p_.end(), std::int64_t{0});
}

bool is_permutation_of(std::span<const int> order, int n) {
  if (static_cast<int>(order.size()) != n) return false;
  std::vector<char> seen(n, 0);
  for (int j : order) {
    if (j < 0 || j >= n || seen[j]) return false;
    seen[j] = 1;
  }
  return true;
}

std::vector<std::int64_t> completion_times(const Instance& inst, const Schedule& sched) {
  const int n = inst.jobs();
  if (!is_permutation_of(sched.order, n))
    throw std::invalid_argument("schedule: order is not a permutation of the jobs");
  std::vector<std::int64_t> c(n, 0);
  std::int64_t t = 0;
  for (int j : sched.order) {
    t += inst.ptime(j);
    c[j] = t;
  }
  return c;
}

std::int64_t total_tardiness(const Instance& inst, const Schedule& sched) {
  const int n = inst.jobs();
  if (!is_permutation_of(sched.order, n))
    throw std::invalid_argument("schedule: order is not a permutation of the jobs");
  std::int64_t t = 0, tard = 0;
  for (int j : sched.order) {
    t += inst.ptime(j);
    if (t > inst.due(j)) tard += t - inst.due(j);
  }
  return tard;
}

std::int64_t sandbox_penalty(const Instance& inst) {
  std::int64_t worst_neg_due = 0;
  for (int d : inst.dues())
    worst_neg_due = std::max<std::int64_t>(worst_neg_due, -static_cast<std::int64_t>(d));
  return inst.jobs() * (inst.total_ptime() + worst_neg_due) + 1;
}

EvalOutcome evaluate_candidate(const Instance& inst, std::span<const int> proposed) {
  EvalOutcome out;
  if (!is_permutation_of(proposed, inst.jobs())) {
    out.feasible = false;
    out.total_tardiness = 0;
    out.score = sandbox_penalty(inst);
    return out;
  }
  std::int64_t t = 0, tard = 0;
  for (int j : proposed) {
    t += inst.ptime(j);
    if (t > inst.due(j)) tard += t - inst.due(j);
  }
  out.feasible = true;
  out.total_tardiness = tard;
  out.score = tard;
  return out;
}

double optimality_gap_percent(std::int64_t heuristic_value, std::int64_t optimal_value) {
  if (optimal_value <= 0)
    throw std::invalid_argument("gap: optimal value must be positive (exclude zero-optimal instances upstream)");
  return static_cast<double>(heuristic_value - optimal_value) /
         static_cast<double>(optimal_value) * 100.0;
}

}  // namespace smtt
