#include "smtt/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include "textutil.hpp"

namespace smtt {

namespace {

bool is_oracle_tag(const std::string& name) {
  return name == "dp" || name == "brute" || name == "optima";
}

std::string oracle_tag(OracleKind k) {
  switch (k) {
    case OracleKind::Dp: return "dp";
    case OracleKind::BruteForce: return "brute";
    case OracleKind::ProvidedOptima: return "optima";
  }
  throw std::logic_error("unreachable oracle kind");
}

}  // namespace

std::vector<RunRecord> run_suite(const Dataset& ds,
                                 const std::vector<std::string>& heuristics,
                                 OracleKind oracle, const ProvidedOptima* optima,
                                 const HeuristicRegistry* registry, int dp_cap) {
  for (const auto& h : heuristics)
    if (is_oracle_tag(h))
      throw std::invalid_argument("heuristic name collides with oracle tag: " + h);
  if (oracle == OracleKind::ProvidedOptima && !optima)
    throw std::invalid_argument("provided-optima oracle needs an optima table");

  static const HeuristicRegistry builtin;
  const HeuristicRegistry& reg = registry ? *registry : builtin;
  for (const auto& h : heuristics) reg.get(h);  // fail early on unknown names

  // One untimed warm-up call per heuristic.
  const Instance* first = nullptr;
  for (const auto& dc : ds.classes)
    if (!dc.instances.empty()) {
      first = &dc.instances.front();
      break;
    }
  if (first)
    for (const auto& h : heuristics) reg.get(h)(*first);

  std::vector<RunRecord> records;
  for (const auto& dc : ds.classes) {
    for (std::size_t k = 0; k < dc.instances.size(); ++k) {
      const Instance& inst = dc.instances[k];
      const std::string& id = dc.ids[k];

      RunRecord oracle_rec;
      oracle_rec.instance_id = id;
      oracle_rec.n = dc.params.n;
      oracle_rec.rdd = dc.params.rdd;
      oracle_rec.tf = dc.params.tf;
      oracle_rec.method = oracle_tag(oracle);
      std::int64_t opt;
      const auto o_start = std::chrono::steady_clock::now();
      switch (oracle) {
        case OracleKind::Dp: opt = dp_optimal(inst, dp_cap).value; break;
        case OracleKind::BruteForce: opt = brute_force_optimal(inst).value; break;
        case OracleKind::ProvidedOptima: {
          auto it = optima->find(id);
          if (it == optima->end())
            throw OracleError("no provided optimum for instance " + id);
          opt = it->second;
          break;
        }
      }
      oracle_rec.elapsed_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - o_start)
              .count();
      oracle_rec.objective = opt;
      oracle_rec.optimal = opt;
      oracle_rec.excluded = opt == 0;
      if (opt > 0) oracle_rec.gap_percent = 0.0;
      records.push_back(std::move(oracle_rec));

      for (const auto& h : heuristics) {
        HeuristicRun run = run_heuristic(reg, h, inst);
        if (run.tardiness < opt)
          throw OracleError("heuristic " + h + " scored " +
                            std::to_string(run.tardiness) + " below the oracle value " +
                            std::to_string(opt) + " on instance " + id +
                            "; the oracle is wrong");
        RunRecord rec;
        rec.instance_id = id;
        rec.n = dc.params.n;
        rec.rdd = dc.params.rdd;
        rec.tf = dc.params.tf;
        rec.method = h;
        rec.objective = run.tardiness;
        rec.optimal = opt;
        rec.excluded = opt == 0;
        if (opt > 0) rec.gap_percent = optimality_gap_percent(run.tardiness, opt);
        rec.elapsed_seconds = run.elapsed_seconds;
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

GapTable aggregate(const std::vector<RunRecord>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");

  GapTable table;
  for (const auto& r : records)
    if (!is_oracle_tag(r.method) &&
        std::find(table.heuristics.begin(), table.heuristics.end(), r.method) ==
            table.heuristics.end())
      table.heuristics.push_back(r.method);
  const int H = static_cast<int>(table.heuristics.size());
  auto hindex = [&](const std::string& name) {
    return static_cast<int>(std::find(table.heuristics.begin(), table.heuristics.end(),
                                      name) -
                            table.heuristics.begin());
  };

  struct Acc {
    std::vector<double> gap_sum;
    std::vector<int> gap_cnt;
    double opt_sum = 0;
    int opt_cnt = 0;
  };
  std::map<std::tuple<int, double, double>, Acc> groups;
  Acc pooled{std::vector<double>(H, 0), std::vector<int>(H, 0), 0, 0};

  for (const auto& r : records) {
    if (r.excluded) continue;
    auto key = std::make_tuple(r.n, r.rdd, r.tf);
    auto [it, fresh] = groups.try_emplace(
        key, Acc{std::vector<double>(H, 0), std::vector<int>(H, 0), 0, 0});
    Acc& acc = it->second;
    if (is_oracle_tag(r.method)) {
      acc.opt_sum += static_cast<double>(r.objective);
      acc.opt_cnt += 1;
      pooled.opt_sum += static_cast<double>(r.objective);
      pooled.opt_cnt += 1;
    } else if (r.gap_percent) {
      const int h = hindex(r.method);
      acc.gap_sum[h] += *r.gap_percent;
      acc.gap_cnt[h] += 1;
      pooled.gap_sum[h] += *r.gap_percent;
      pooled.gap_cnt[h] += 1;
    }
  }
  // Classes whose every instance was excluded still get a row (count 0).
  std::map<std::tuple<int, double, double>, int> zero_rows;
  for (const auto& r : records) {
    auto key = std::make_tuple(r.n, r.rdd, r.tf);
    if (!groups.count(key)) zero_rows[key] = 0;
  }

  auto make_row = [&](const std::tuple<int, double, double>* key, const Acc& acc) {
    GapRow row;
    if (key) {
      row.n = std::get<0>(*key);
      row.rdd = std::get<1>(*key);
      row.tf = std::get<2>(*key);
    } else {
      row.is_average = true;
    }
    row.count = acc.opt_cnt;
    if (acc.opt_cnt > 0) row.optimal_mean = acc.opt_sum / acc.opt_cnt;
    for (int h = 0; h < H; ++h)
      row.mean_gap.push_back(acc.gap_cnt[h] > 0
                                 ? std::optional<double>(acc.gap_sum[h] / acc.gap_cnt[h])
                                 : std::nullopt);
    return row;
  };

  for (const auto& [key, acc] : groups) table.rows.push_back(make_row(&key, acc));
  for (const auto& [key, unused] : zero_rows) {
    Acc empty{std::vector<double>(H, 0), std::vector<int>(H, 0), 0, 0};
    table.rows.push_back(make_row(&key, empty));
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const GapRow& a, const GapRow& b) {
    return std::tie(a.n, a.rdd, a.tf) < std::tie(b.n, b.rdd, b.tf);
  });
  table.average = make_row(nullptr, pooled);
  return table;
}

namespace {

std::string fmt_gap(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_row(std::ostringstream& os, const GapRow& row) {
  if (row.is_average)
    os << "Average,,";
  else
    os << row.n << ',' << fmt_trim(row.rdd) << ',' << fmt_trim(row.tf);
  for (const auto& g : row.mean_gap) os << ',' << (g ? fmt_gap(*g) : "");
  os << ',' << (row.optimal_mean ? fmt_gap(*row.optimal_mean) : "") << ','
     << row.count << '\n';
}

}  // namespace

std::string gap_table_csv(const GapTable& table) {
  std::ostringstream os;
  os << "n,rdd,tf";
  for (const auto& h : table.heuristics) os << ',' << h;
  os << ",optimal_mean,count\n";
  for (const auto& row : table.rows) write_row(os, row);
  if (table.average) write_row(os, *table.average);
  return os.str();
}

void emit_csv(const GapTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << gap_table_csv(table);
}

std::string records_csv(const std::vector<RunRecord>& records) {
  std::ostringstream os;
  os << "instance_id,n,rdd,tf,method,objective,optimal,gap_percent,elapsed_seconds\n";
  for (const auto& r : records) {
    os << r.instance_id << ',' << r.n << ',' << fmt_trim(r.rdd) << ','
       << fmt_trim(r.tf) << ',' << r.method << ',' << r.objective << ',';
    if (r.optimal) os << *r.optimal;
    os << ',';
    if (r.gap_percent) os << fmt_gap(*r.gap_percent);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", r.elapsed_seconds);
    os << ',' << buf << '\n';
  }
  return os.str();
}

void emit_records_csv(const std::vector<RunRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << records_csv(records);
}

ProvidedOptima load_provided_optima(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  ProvidedOptima out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first && line == "instance_path,optimal") {
      first = false;
      continue;
    }
    first = false;
    auto cols = split_csv_line(line);
    if (cols.size() != 2)
      throw OracleError("optima file: bad row: " + line);
    std::size_t used = 0;
    long long value;
    try {
      value = std::stoll(cols[1], &used);
    } catch (const std::exception&) {
      throw OracleError("optima file: bad value in row: " + line);
    }
    if (used != cols[1].size())
      throw OracleError("optima file: bad value in row: " + line);
    if (value < 0)
      throw OracleError("optima file: negative optimum for " + cols[0]);
    if (!out.emplace(cols[0], value).second)
      throw OracleError("optima file: duplicate instance " + cols[0]);
  }
  return out;
}

}  // namespace smtt
