#include "smtt/heuristics.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <numeric>

namespace smtt {

namespace {

std::vector<int> sorted_by(const Instance& inst, bool due_first) {
  std::vector<int> s(inst.jobs());
  std::iota(s.begin(), s.end(), 0);
  std::stable_sort(s.begin(), s.end(), [&](int a, int b) {
    long long ka1 = due_first ? inst.due(a) : inst.ptime(a);
    long long kb1 = due_first ? inst.due(b) : inst.ptime(b);
    long long ka2 = due_first ? inst.ptime(a) : inst.due(a);
    long long kb2 = due_first ? inst.ptime(b) : inst.due(b);
    return ka1 != kb1 ? ka1 < kb1 : ka2 < kb2;  // stable sort keeps index order on full ties
  });
  return s;
}

// First position whose score undercuts the incumbent by more than kScoreEps;
// near-ties keep the earlier position.
int argmin_first(const std::vector<double>& scores) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(scores.size()); ++i)
    if (scores[i] < scores[best] - kScoreEps) best = i;
  return best;
}

// Greedy constructor shared by the augmented rules: pick by score, then try
// to move each earlier job to the end of the partial schedule, keeping any
// strict improvement. Candidates are visited in schedule order as of the
// step's start, and the incumbent tardiness is re-evaluated before each trial.
template <typename ScoreFn>
Schedule augmented_construct(const Instance& inst, ScoreFn&& score) {
  const int n = inst.jobs();
  std::vector<int> u = sorted_by(inst, /*due_first=*/false);
  std::vector<int> s;
  s.reserve(n);
  std::int64_t t = 0, sum_p = inst.total_ptime();
  std::vector<double> scores;
  std::vector<std::int64_t> comp, tardpre;
  std::vector<int> snapshot;

  while (!u.empty()) {
    const int m = static_cast<int>(u.size());
    const int max_p = inst.ptime(u.back());  // u ascending in p, so max is last
    scores.resize(m);
    for (int i = 0; i < m; ++i) scores[i] = score(u[i], t, max_p, sum_p, m);
    const int pick = argmin_first(scores);
    const int chosen = u[pick];
    u.erase(u.begin() + pick);
    s.push_back(chosen);
    t += inst.ptime(chosen);
    sum_p -= inst.ptime(chosen);

    const int k = static_cast<int>(s.size());
    if (k < 2) continue;
    snapshot.assign(s.begin(), s.end() - 1);
    for (int jb : snapshot) {
      // Incumbent completions and prefix tardiness.
      comp.resize(k);
      tardpre.resize(k + 1);
      tardpre[0] = 0;
      std::int64_t ct = 0;
      int q = -1;
      for (int i = 0; i < k; ++i) {
        ct += inst.ptime(s[i]);
        comp[i] = ct;
        const std::int64_t late = comp[i] - inst.due(s[i]);
        tardpre[i + 1] = tardpre[i] + (late > 0 ? late : 0);
        if (s[i] == jb) q = i;
      }
      const std::int64_t cur = tardpre[k];
      // Trial: jb moves to the end, jobs behind it finish p_jb earlier and
      // jb itself finishes at the (unchanged) makespan.
      const int pq = inst.ptime(jb);
      std::int64_t trial = tardpre[q];
      for (int i = q + 1; i < k; ++i) {
        const std::int64_t late = comp[i] - pq - inst.due(s[i]);
        if (late > 0) trial += late;
      }
      const std::int64_t late_moved = comp[k - 1] - inst.due(jb);
      if (late_moved > 0) trial += late_moved;
      if (trial < cur)
        std::rotate(s.begin() + q, s.begin() + q + 1, s.end());
    }
  }
  return {std::move(s)};
}

}  // namespace

Schedule edd(const Instance& inst) { return {sorted_by(inst, true)}; }

Schedule spt(const Instance& inst) { return {sorted_by(inst, false)}; }

Schedule mdd(const Instance& inst) {
  const int n = inst.jobs();
  std::vector<char> used(n, 0);
  std::vector<int> order;
  order.reserve(n);
  std::int64_t t = 0;
  for (int step = 0; step < n; ++step) {
    int best = -1;
    std::int64_t best_score = 0;
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      const std::int64_t sc =
          std::max<std::int64_t>(inst.due(j), t + inst.ptime(j));
      if (best < 0 || sc < best_score) {  // strict < keeps the lowest index on ties
        best = j;
        best_score = sc;
      }
    }
    used[best] = 1;
    order.push_back(best);
    t += inst.ptime(best);
  }
  return {std::move(order)};
}

Schedule eddc(const Instance& inst) {
  const int n = inst.jobs();
  std::vector<int> s = sorted_by(inst, true);
  // Tail-conditional swap pass over the sorted order (positions 1-based).
  // The scan guard needs a descending adjacent due-date pair, so from a
  // sorted start it can only ever act at the final two positions: those are
  // swapped when the next-to-last due date exceeds both the last job's due
  // date and the completion time of everything before the last position.
  for (int i = 1; i <= n; ++i) {
    int j = i;
    while (j > 1 && inst.due(s[j - 1]) < inst.due(s[j - 2])) {
      std::int64_t t_completion = 0;
      for (int l = 0; l + 1 < j; ++l) t_completion += inst.ptime(s[l]);
      if (j == n && inst.due(s[j - 2]) > t_completion)
        std::swap(s[j - 1], s[j - 2]);
      --j;
    }
  }
  return {std::move(s)};
}

MddcScore mddc_score(int p, int d, std::int64_t t, int max_p_u,
                     std::int64_t sum_p_u, int remaining) {
  MddcScore sc;
  sc.mu = std::max(1.1 * p + static_cast<double>(t), static_cast<double>(d));
  sc.rho_raw = p / (static_cast<double>(t) + max_p_u);
  assert(sc.rho_raw <= 1.0 + 1e-15);  // p <= max over unscheduled, t >= 0
  sc.rho = std::min(sc.rho_raw, 1.0);
  sc.theta = sc.rho * sc.rho / (1.0 + sc.rho * sc.rho);
  sc.sigma = p / (static_cast<double>(t) +
                  static_cast<double>(sum_p_u) / remaining);
  sc.mu = sc.mu * (1.0 + sc.theta) + sc.sigma;
  return sc;
}

Schedule mddc_traced(const Instance& inst, std::vector<MddcStep>* trace) {
  const int n = inst.jobs();
  std::vector<int> u = sorted_by(inst, /*due_first=*/false);
  std::vector<int> order;
  order.reserve(n);
  std::int64_t t = 0, sum_p = inst.total_ptime();
  std::vector<double> scores;
  while (!u.empty()) {
    const int m = static_cast<int>(u.size());
    const int max_p = inst.ptime(u.back());
    scores.resize(m);
    MddcStep step;
    if (trace) {
      step.current_time = t;
      step.unscheduled = u;
    }
    for (int i = 0; i < m; ++i) {
      const MddcScore sc =
          mddc_score(inst.ptime(u[i]), inst.due(u[i]), t, max_p, sum_p, m);
      scores[i] = sc.mu;
      if (trace) step.scores.push_back(sc);
    }
    const int pick = argmin_first(scores);
    const int chosen = u[pick];
    if (trace) {
      step.chosen = chosen;
      trace->push_back(std::move(step));
    }
    u.erase(u.begin() + pick);
    order.push_back(chosen);
    t += inst.ptime(chosen);
    sum_p -= inst.ptime(chosen);
  }
  return {std::move(order)};
}

Schedule mddc(const Instance& inst) { return mddc_traced(inst, nullptr); }

Schedule augmented_mdd(const Instance& inst) {
  return augmented_construct(
      inst, [&](int j, std::int64_t t, int, std::int64_t, int) {
        return static_cast<double>(
            std::max<std::int64_t>(inst.due(j), t + inst.ptime(j)));
      });
}

Schedule augmented_mddc(const Instance& inst) {
  return augmented_construct(
      inst, [&](int j, std::int64_t t, int max_p, std::int64_t sum_p, int m) {
        return mddc_score(inst.ptime(j), inst.due(j), t, max_p, sum_p, m).mu;
      });
}

const std::string& heuristic_name(HeuristicId id) {
  static const std::vector<std::string> names = {
      "edd", "spt", "mdd", "eddc", "mddc", "aug_mdd", "aug_mddc"};
  return names[static_cast<int>(id)];
}

HeuristicId heuristic_from_name(const std::string& name) {
  for (HeuristicId id : all_heuristics())
    if (heuristic_name(id) == name) return id;
  throw std::invalid_argument("unknown heuristic: " + name);
}

std::vector<HeuristicId> all_heuristics() {
  return {HeuristicId::EDD,  HeuristicId::SPT,     HeuristicId::MDD,
          HeuristicId::EDDC, HeuristicId::MDDC,    HeuristicId::AUG_MDD,
          HeuristicId::AUG_MDDC};
}

namespace {
Schedule run_by_id(HeuristicId id, const Instance& inst) {
  switch (id) {
    case HeuristicId::EDD: return edd(inst);
    case HeuristicId::SPT: return spt(inst);
    case HeuristicId::MDD: return mdd(inst);
    case HeuristicId::EDDC: return eddc(inst);
    case HeuristicId::MDDC: return mddc(inst);
    case HeuristicId::AUG_MDD: return augmented_mdd(inst);
    case HeuristicId::AUG_MDDC: return augmented_mddc(inst);
  }
  throw std::logic_error("unreachable heuristic id");
}
}  // namespace

HeuristicRegistry::HeuristicRegistry() {
  for (HeuristicId id : all_heuristics())
    fns_[heuristic_name(id)] = [id](const Instance& inst) { return run_by_id(id, inst); };
}

void HeuristicRegistry::add(const std::string& name, HeuristicFn fn) {
  fns_[name] = std::move(fn);
}

const HeuristicFn& HeuristicRegistry::get(const std::string& name) const {
  auto it = fns_.find(name);
  if (it == fns_.end()) throw std::invalid_argument("unknown heuristic: " + name);
  return it->second;
}

std::vector<std::string> HeuristicRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, fn] : fns_) out.push_back(name);
  return out;
}

namespace {
HeuristicRun timed_run(const HeuristicFn& fn, const Instance& inst) {
  const auto start = std::chrono::steady_clock::now();
  Schedule s = fn(inst);
  const auto stop = std::chrono::steady_clock::now();
  HeuristicRun run;
  run.tardiness = total_tardiness(inst, s);
  run.schedule = std::move(s);
  run.elapsed_seconds = std::chrono::duration<double>(stop - start).count();
  return run;
}
}  // namespace

HeuristicRun run_heuristic(HeuristicId id, const Instance& inst) {
  return timed_run([id](const Instance& i) { return run_by_id(id, i); }, inst);
}

HeuristicRun run_heuristic(const HeuristicRegistry& reg, const std::string& name,
                           const Instance& inst) {
  return timed_run(reg.get(name), inst);
}

}  // namespace smtt
