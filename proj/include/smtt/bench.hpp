#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smtt/datagen.hpp"
#include "smtt/exact.hpp"
#include "smtt/heuristics.hpp"

namespace smtt {

// One measurement: a heuristic (or the oracle itself) on one instance.
struct RunRecord {
  std::string instance_id;
  int n = 0;
  double rdd = 0, tf = 0;
  std::string method;  // heuristic name, or oracle tag "dp"/"brute"/"optima"
  std::int64_t objective = 0;
  std::optional<std::int64_t> optimal;
  std::optional<double> gap_percent;  // present iff optimal && *optimal > 0
  double elapsed_seconds = 0;
  bool excluded = false;  // zero-optimal instance, dropped from averages
};

enum class OracleKind { Dp, BruteForce, ProvidedOptima };

using ProvidedOptima = std::map<std::string, std::int64_t>;

// Raised when optima are inconsistent: a heuristic beating the "optimal"
// value (oracle bug), or missing/negative provided optima.
struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runs every listed heuristic plus the oracle over the whole dataset. One
// record per (instance, heuristic) and one per (instance, oracle). Before
// timing starts each heuristic gets a single untimed warm-up call.
std::vector<RunRecord> run_suite(const Dataset&,
                                 const std::vector<std::string>& heuristics,
                                 OracleKind oracle,
                                 const ProvidedOptima* optima = nullptr,
                                 const HeuristicRegistry* registry = nullptr,
                                 int dp_cap = kDefaultDpCap);

struct GapRow {
  bool is_average = false;
  int n = 0;
  double rdd = 0, tf = 0;
  std::vector<std::optional<double>> mean_gap;  // parallel to GapTable::heuristics
  std::optional<double> optimal_mean;
  int count = 0;  // instances actually averaged (zero-optimal ones excluded)
};

struct GapTable {
  std::vector<std::string> heuristics;
  std::vector<GapRow> rows;         // sorted by (n, rdd, tf)
  std::optional<GapRow> average;    // pooled over all non-excluded instances
};

// Groups records by class and averages gaps per heuristic. The grand average
// pools every non-excluded instance rather than averaging the class means.
GapTable aggregate(const std::vector<RunRecord>&);

// Deterministic CSV: header n,rdd,tf,<heuristics...>,optimal_mean,count; the
// pooled row prints "Average" in the first column.
std::string gap_table_csv(const GapTable&);
void emit_csv(const GapTable&, const std::string& path);

std::string records_csv(const std::vector<RunRecord>&);
void emit_records_csv(const std::vector<RunRecord>&, const std::string& path);

// CSV of instance_path,optimal (header optional). Duplicate paths and
// negative optima are rejected; entries for unknown instances are allowed
// and ignored, while instances without an entry fail inside run_suite.
ProvidedOptima load_provided_optima(const std::string& path);

}  // namespace smtt
