#include "smtt/discovery.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "smtt/heuristics.hpp"  // kScoreEps

namespace smtt {

std::vector<int> dispatch(const PriorityExpr& expr, const Instance& inst) {
  const int n = inst.jobs();
  std::vector<int> u(n);
  std::iota(u.begin(), u.end(), 0);
  std::stable_sort(u.begin(), u.end(), [&](int a, int b) {
    if (inst.ptime(a) != inst.ptime(b)) return inst.ptime(a) < inst.ptime(b);
    return inst.due(a) < inst.due(b);
  });
  std::vector<int> order;
  order.reserve(n);
  std::int64_t t = 0, sum_p = inst.total_ptime();
  while (!u.empty()) {
    const int m = static_cast<int>(u.size());
    JobFeatures f;
    f.t = static_cast<double>(t);
    f.max_p = inst.ptime(u.back());  // u ascending in p
    f.sum_p = static_cast<double>(sum_p);
    f.mean_p = f.sum_p / m;
    f.remaining = m;
    int best = 0;
    double best_score = 0;
    for (int i = 0; i < m; ++i) {
      f.p = inst.ptime(u[i]);
      f.d = inst.due(u[i]);
      const double sc = expr.eval(f);
      if (i == 0 || sc < best_score - kScoreEps) {
        best = i;
        best_score = sc;
      }
    }
    const int chosen = u[best];
    u.erase(u.begin() + best);
    order.push_back(chosen);
    t += inst.ptime(chosen);
    sum_p -= inst.ptime(chosen);
  }
  return order;
}

ScoreResult score_program(const PriorityExpr& expr,
                          const std::vector<Instance>& training,
                          const DispatchFn& dispatcher) {
  if (training.empty())
    throw std::invalid_argument("score_program: empty training set");
  ScoreResult res;
  std::int64_t sum = 0;
  for (const Instance& inst : training) {
    const std::vector<int> order = dispatcher(expr, inst);
    const EvalOutcome out = evaluate_candidate(inst, order);
    if (!out.feasible) res.all_feasible = false;
    sum += out.score;
  }
  res.mean_score = static_cast<double>(sum) / static_cast<double>(training.size());
  return res;
}

IslandDatabase::IslandDatabase(int islands) {
  if (islands < 1) throw std::invalid_argument("island database: need >= 1 island");
  islands_.resize(islands);
  best_index_.assign(islands, -1);
}

double IslandDatabase::island_best_score(int i) const {
  return best_index_[i] < 0 ? std::numeric_limits<double>::infinity()
                            : islands_[i][best_index_[i]].score;
}

const ScoredProgram* IslandDatabase::island_best(int i) const {
  return best_index_[i] < 0 ? nullptr : &islands_[i][best_index_[i]];
}

bool IslandDatabase::empty() const {
  for (const auto& isl : islands_)
    if (!isl.empty()) return false;
  return true;
}

const ScoredProgram& IslandDatabase::global_best() const {
  const ScoredProgram* best = nullptr;
  for (int i = 0; i < island_count(); ++i) {
    const ScoredProgram* cand = island_best(i);
    if (cand && (!best || cand->score < best->score)) best = cand;
  }
  if (!best) throw std::logic_error("island database is empty");
  return *best;
}

void IslandDatabase::add(const ScoredProgram& program) {
  const int i = program.island;
  if (i < 0 || i >= island_count())
    throw std::invalid_argument("register: island id out of range");
  islands_[i].push_back(program);
  // Strict improvement keeps the earliest best on ties.
  if (best_index_[i] < 0 ||
      program.score < islands_[i][best_index_[i]].score)
    best_index_[i] = static_cast<int>(islands_[i].size()) - 1;
}

std::vector<int> IslandDatabase::reset(Rng& rng) {
  const int count = island_count();
  const int survivors = (count + 1) / 2;  // the stronger ceil(I/2) stay untouched
  std::vector<int> rank(count);
  std::iota(rank.begin(), rank.end(), 0);
  std::stable_sort(rank.begin(), rank.end(), [&](int a, int b) {
    return island_best_score(a) < island_best_score(b);
  });
  std::vector<int> cleared(rank.begin() + survivors, rank.end());
  std::sort(cleared.begin(), cleared.end());
  for (int victim : cleared) {
    const int founder = rank[rng.below(survivors)];
    const ScoredProgram* seed = island_best(founder);
    islands_[victim].clear();
    best_index_[victim] = -1;
    if (seed) {
      ScoredProgram copy = *seed;
      copy.island = victim;
      add(copy);
    }
  }
  return cleared;
}

void register_program(IslandDatabase& db, const ScoredProgram& program) {
  db.add(program);
}

bool maybe_reset(IslandDatabase& db, double now, double period, Rng& rng) {
  if (period <= 0) return false;
  if (now - db.last_reset < period) return false;
  db.last_reset = now;
  db.reset(rng);
  return true;
}

PromptSample sample_prompt(const IslandDatabase& db, Rng& rng, int sample_k) {
  if (db.empty()) throw std::logic_error("sample_prompt: empty database");
  if (sample_k < 1) throw std::invalid_argument("sample_prompt: sample_k must be >= 1");
  PromptSample out;
  // Uniform island choice among the nonempty ones (all are nonempty in a
  // seeded run; emptiness can only appear through direct construction).
  std::vector<int> candidates;
  for (int i = 0; i < db.island_count(); ++i)
    if (!db.island_empty(i)) candidates.push_back(i);
  out.island = candidates[rng.below(candidates.size())];

  const auto& pool = db.island(out.island);
  const int m = static_cast<int>(pool.size());
  // Rank 1 = best score; ties resolved by registration order.
  std::vector<int> by_rank(m);
  std::iota(by_rank.begin(), by_rank.end(), 0);
  std::stable_sort(by_rank.begin(), by_rank.end(), [&](int a, int b) {
    return pool[a].score < pool[b].score;
  });
  std::vector<double> weight(m);
  for (int r = 0; r < m; ++r) weight[r] = 1.0 / (r + 1);

  const int k = std::min(sample_k, m);
  std::vector<char> taken(m, 0);
  std::vector<int> picked_ranks;
  for (int draw = 0; draw < k; ++draw) {
    double total = 0;
    for (int r = 0; r < m; ++r)
      if (!taken[r]) total += weight[r];
    double x = rng.uniform01() * total;
    int chosen = -1;
    for (int r = 0; r < m; ++r) {
      if (taken[r]) continue;
      chosen = r;
      x -= weight[r];
      if (x < 0) break;
    }
    taken[chosen] = 1;
    picked_ranks.push_back(chosen);
  }
  // Worst-to-best: descending rank number.
  std::sort(picked_ranks.begin(), picked_ranks.end(), std::greater<>());
  for (int r : picked_ranks) out.programs.push_back(pool[by_rank[r]]);
  return out;
}

std::string render_prompt(const PromptSample& sample) {
  std::ostringstream os;
  os << "Design a priority score for sequencing jobs on one machine to "
        "minimize total tardiness.\n"
        "At each step the unscheduled job with the LOWEST score runs next. "
        "Every job is scheduled\n"
        "exactly once; job data is read-only and must not be altered.\n"
        "Inputs: P (the job's processing time), D (its due date), T (time "
        "already scheduled),\n"
        "MAXP, SUMP, MEANP (over unscheduled jobs), REMAINING (count of "
        "unscheduled jobs).\n"
        "Operators: + - * /, max(a, b), min(a, b), square(a).\n"
        "Known rules, mean tardiness in brackets, best last:\n";
  for (const auto& prog : sample.programs) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", prog.score);
    os << "[score " << buf << "]\n" << prog.expr.str() << '\n';
  }
  os << "Improve on the last rule. Reply with a single expression.\n";
  return os.str();
}

// ---- stub mutator ----

namespace {

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

int count_kind(const PriorityExpr& e, ExprKind kind) {
  int count = 0;
  for (const auto& nd : e.nodes())
    if (nd.kind == kind) ++count;
  return count;
}

PriorityExpr rebuild_with(const PriorityExpr& e,
                          const std::function<PriorityExpr(const ExprNode&, int)>& leaf,
                          int target_node) {
  // Rebuilds bottom-up; `leaf` replaces the node at target_node.
  std::vector<PriorityExpr> built(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    const ExprNode& nd = e.nodes()[i];
    PriorityExpr plain;
    switch (nd.kind) {
      case ExprKind::Const: plain = PriorityExpr::constant(nd.value); break;
      case ExprKind::Terminal: plain = PriorityExpr::terminal(nd.term); break;
      case ExprKind::Square: plain = PriorityExpr::square(built[nd.lhs]); break;
      default:
        plain = PriorityExpr::binary(nd.kind, built[nd.lhs], built[nd.rhs]);
        break;
    }
    built[i] = static_cast<int>(i) == target_node ? leaf(nd, static_cast<int>(i))
                                                  : std::move(plain);
  }
  return built[e.root()];
}

int nth_node_of_kind(const PriorityExpr& e, ExprKind kind, int occurrence) {
  int seen = 0;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (e.nodes()[i].kind == kind) {
      if (seen == occurrence) return static_cast<int>(i);
      ++seen;
    }
  throw std::invalid_argument("expression has no such occurrence");
}

}  // namespace

PriorityExpr scale_terminal_occurrence(const PriorityExpr& e, int occurrence,
                                       double factor) {
  const int target = nth_node_of_kind(e, ExprKind::Terminal, occurrence);
  return rebuild_with(
      e,
      [&](const ExprNode& nd, int) {
        return PriorityExpr::binary(ExprKind::Mul, PriorityExpr::terminal(nd.term),
                                    PriorityExpr::constant(factor));
      },
      target);
}

PriorityExpr scale_constant_occurrence(const PriorityExpr& e, int occurrence,
                                       double factor) {
  const int target = nth_node_of_kind(e, ExprKind::Const, occurrence);
  return rebuild_with(
      e,
      [&](const ExprNode& nd, int) {
        return PriorityExpr::constant(nd.value * factor);
      },
      target);
}

StubMutator::StubMutator(std::uint64_t seed, int max_depth)
    : seed_(seed), max_depth_(max_depth) {}

std::optional<std::string> StubMutator::propose(const std::string& prompt) {
  // Base program: the last line of the prompt that parses as an expression.
  std::optional<PriorityExpr> base;
  std::istringstream is(prompt);
  std::string line;
  while (std::getline(is, line)) {
    try {
      base = PriorityExpr::parse(line);
    } catch (const ExprParseError&) {
    }
  }
  if (!base) return std::nullopt;

  // Deterministic in (seed, prompt): the generator is derived from both.
  Rng rng(seed_ ^ fnv1a64(prompt));
  static const double factors[] = {1.1, 0.9, 1.2, 0.8, 1.05};

  auto scale_some_terminal = [&]() -> PriorityExpr {
    const int terms = count_kind(*base, ExprKind::Terminal);
    if (terms == 0) return *base;
    return scale_terminal_occurrence(*base, static_cast<int>(rng.below(terms)),
                                     factors[rng.below(std::size(factors))]);
  };

  auto attempt = [&]() -> PriorityExpr {
    switch (rng.below(6)) {
      case 0:  // scale a terminal by a constant factor
        return scale_some_terminal();
      case 1: {  // perturb an existing constant
        const int consts = count_kind(*base, ExprKind::Const);
        if (consts == 0) break;
        return scale_constant_occurrence(
            *base, static_cast<int>(rng.below(consts)),
            factors[rng.below(std::size(factors))]);
      }
      case 2:  // add a congestion-pressure term
        return PriorityExpr::binary(
            ExprKind::Add, *base,
            PriorityExpr::parse("P / (T + MEANP)"));
      case 3:  // guard with the due date
        return PriorityExpr::binary(ExprKind::Max, *base,
                                    PriorityExpr::terminal(Term::D));
      case 4: {  // shift by a small constant
        static const double shifts[] = {0.5, 1, 2, -0.5};
        return PriorityExpr::binary(ExprKind::Add, *base,
                                    PriorityExpr::constant(shifts[rng.below(4)]));
      }
      case 5:  // scale by a saturating load ratio
        return PriorityExpr::binary(
            ExprKind::Mul, *base,
            PriorityExpr::parse(
                "1 + square(min(P / (T + MAXP), 1)) / (1 + square(min(P / (T + MAXP), 1)))"));
    }
    return scale_some_terminal();
  };

  PriorityExpr proposal = attempt();
  if (proposal.depth() > max_depth_) {
    proposal = scale_some_terminal();
    if (proposal.depth() > max_depth_) proposal = *base;
  }
  return proposal.str();
}

// ---- configuration and main loop ----

DiscoveryConfig DiscoveryConfig::desk() {
  DiscoveryConfig cfg;
  cfg.max_iterations = 200;
  cfg.reset_period_iterations = 50;
  cfg.training.per_class = 4;  // 25 classes -> 100 instances
  return cfg;
}

std::string discovery_log_csv(const std::vector<DiscoveryLogRow>& rows) {
  std::ostringstream os;
  os << "iteration,candidate_score,best_score,island\n";
  char buf[64];
  for (const auto& r : rows) {
    os << r.iteration << ',';
    if (r.candidate_score) {
      std::snprintf(buf, sizeof buf, "%.6f", *r.candidate_score);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%.6f", r.best_score);
    os << ',' << buf << ',' << r.island << '\n';
  }
  return os.str();
}

DiscoveryResult run_discovery(const DiscoveryConfig& cfg, Mutator& mutator) {
  if (cfg.islands < 1 || cfg.sample_k < 1)
    throw std::invalid_argument("discovery: islands and sample_k must be >= 1");

  std::vector<Instance> training;
  {
    const Dataset ds = generate_dataset(training_grid(cfg.training.n, cfg.training.dist),
                                        cfg.training.per_class, cfg.training.seed);
    for (const auto& dc : ds.classes)
      for (const auto& inst : dc.instances) training.push_back(inst);
  }
  if (training.empty())
    throw std::invalid_argument("discovery: empty training set");

  IslandDatabase db(cfg.islands);
  Rng rng(cfg.seed);

  const PriorityExpr initial = PriorityExpr::parse(cfg.initial_expression);
  const ScoreResult initial_score = score_program(initial, training);
  if (!initial_score.all_feasible)
    throw std::logic_error("discovery: initial program dispatched infeasibly");
  for (int i = 0; i < cfg.islands; ++i)
    db.add({initial, initial_score.mean_score, i, 0});

  DiscoveryResult result;
  result.best = db.global_best();

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  };
  const bool iter_resets = cfg.reset_period_iterations > 0;

  for (std::int64_t iter = 1; iter <= cfg.max_iterations; ++iter) {
    if (elapsed() > cfg.wall_clock_limit_seconds) break;
    result.iterations_run = iter;

    const double now = iter_resets ? static_cast<double>(iter) : elapsed();
    const double period = iter_resets ? static_cast<double>(cfg.reset_period_iterations)
                                      : cfg.reset_period_seconds;
    if (maybe_reset(db, now, period, rng)) result.reset_iterations.push_back(iter);

    const PromptSample sample = sample_prompt(db, rng, cfg.sample_k);
    const std::string prompt = render_prompt(sample);

    DiscoveryLogRow row;
    row.iteration = iter;
    row.island = sample.island;

    std::optional<std::string> text;
    try {
      text = mutator.propose(prompt);
    } catch (const std::exception&) {
      text = std::nullopt;
    }
    if (text) {
      try {
        const PriorityExpr expr = PriorityExpr::parse(*text);
        if (expr.depth() <= cfg.max_expr_depth) {
          const ScoreResult sc = score_program(expr, training);
          row.candidate_score = sc.mean_score;
          if (sc.all_feasible) {
            // Infeasible dispatch output never enters the database.
            db.add({expr, sc.mean_score, sample.island, iter});
          }
        }
      } catch (const ExprParseError&) {
      }
    }
    row.best_score = db.global_best().score;
    result.log.push_back(std::move(row));
  }

  result.best = db.global_best();
  if (!cfg.log_path.empty()) {
    std::ofstream out(cfg.log_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + cfg.log_path);
    out << discovery_log_csv(result.log);
  }
  return result;
}

}  // namespace smtt
