#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "smtt/core.hpp"

namespace smtt {

enum class HeuristicId { EDD, SPT, MDD, EDDC, MDDC, AUG_MDD, AUG_MDDC };

// Static dispatch rules. All are deterministic: ties are broken by the
// documented orderings, never by anything platform-dependent.
Schedule edd(const Instance&);   // sort by (d, p, job index)
Schedule spt(const Instance&);   // sort by (p, d, job index)
Schedule mdd(const Instance&);   // greedy min of max{d_j, t + p_j}; ties -> lowest index
Schedule eddc(const Instance&);  // (d, p) sort plus a conditional final-pair swap
Schedule mddc(const Instance&);  // weighted modified-due-date rule, see mddc_score
Schedule augmented_mdd(const Instance&);   // mdd scoring + move-to-end local search
Schedule augmented_mddc(const Instance&);  // mddc scoring + move-to-end local search

// Score decomposition for one unscheduled job inside mddc:
//   mu    = max(1.1 * p + t, d)
//   rho   = min(p / (t + max_p_u), 1)      (raw value kept for diagnostics)
//   theta = rho^2 / (1 + rho^2)
//   mu    = mu * (1 + theta) + sigma,  sigma = p / (t + sum_p_u / remaining)
// The candidate with the lowest final mu runs next; among near-ties (within
// kScoreEps) the job earliest in (p, d, index) order wins.
struct MddcScore {
  double mu;
  double rho_raw;  // before the min clamp; never exceeds 1 for t >= 0
  double rho;
  double theta;
  double sigma;
};
MddcScore mddc_score(int p, int d, std::int64_t t, int max_p_u,
                     std::int64_t sum_p_u, int remaining);

// Absolute tolerance for treating two floating-point priority scores as tied.
inline constexpr double kScoreEps = 1e-9;

// Step-by-step trace of an mddc run, for inspection and tests.
struct MddcStep {
  std::int64_t current_time;
  std::vector<int> unscheduled;   // in (p, d, index) order
  std::vector<MddcScore> scores;  // parallel to unscheduled
  int chosen;
};
Schedule mddc_traced(const Instance&, std::vector<MddcStep>* trace);

using HeuristicFn = std::function<Schedule(const Instance&)>;

const std::string& heuristic_name(HeuristicId);
HeuristicId heuristic_from_name(const std::string&);  // throws on unknown name
std::vector<HeuristicId> all_heuristics();

// Name -> rule map with the built-ins preloaded; external baselines can be
// added under new names.
class HeuristicRegistry {
public:
  HeuristicRegistry();
  void add(const std::string& name, HeuristicFn);
  const HeuristicFn& get(const std::string& name) const;
  std::vector<std::string> names() const;

private:
  std::map<std::string, HeuristicFn> fns_;
};

struct HeuristicRun {
  Schedule schedule;
  std::int64_t tardiness;  // recomputed by the evaluator, not self-reported
  double elapsed_seconds;  // monotonic clock around the rule call only
};
HeuristicRun run_heuristic(HeuristicId, const Instance&);
HeuristicRun run_heuristic(const HeuristicRegistry&, const std::string& name,
                           const Instance&);

}  // namespace smtt
