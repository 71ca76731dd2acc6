#include "smtt/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

namespace smtt {

BruteForceResult brute_force_optimal(const Instance& inst) {
  const int n = inst.jobs();
  if (n > 10)
    throw std::invalid_argument("brute force: limited to n <= 10");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  BruteForceResult best{{perm}, total_tardiness(inst, {perm})};
  // next_permutation enumerates in lexicographic order, so keeping only
  // strict improvements leaves the lexicographically smallest optimum.
  while (std::next_permutation(perm.begin(), perm.end())) {
    std::int64_t t = 0, tard = 0;
    for (int j : perm) {
      t += inst.ptime(j);
      if (t > inst.due(j)) tard += t - inst.due(j);
    }
    if (tard < best.value) {
      best.value = tard;
      best.schedule.order = perm;
    }
  }
  return best;
}

namespace {

std::string human_bytes(double bytes) {
  const char* units[] = {"B", "KiB", "MiB", "GiB", "TiB", "PiB", "EiB"};
  int u = 0;
  while (bytes >= 1024.0 && u < 6) {
    bytes /= 1024.0;
    ++u;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f %s", bytes, units[u]);
  return buf;
}

}  // namespace

DpTable dp_table(const Instance& inst, int cap) {
  const int n = inst.jobs();
  if (n > cap) {
    std::ostringstream msg;
    msg << "subset DP: n=" << n << " exceeds cap " << cap
        << "; the value table alone would need about "
        << human_bytes(8.0 * std::exp2(n)) << " (8 bytes per subset)";
    throw DpCapError(msg.str());
  }
  const std::size_t size = std::size_t{1} << n;
  DpTable table{n, std::vector<std::int64_t>(size, 0)};
  auto& v = table.values;
  for (std::size_t mask = 1; mask < size; ++mask) {
    // Completion time of the whole subset, then the best choice of last job.
    std::int64_t c = 0;
    for (std::size_t rest = mask; rest;) {
      const int j = std::countr_zero(rest);
      c += inst.ptime(j);
      rest &= rest - 1;
    }
    std::int64_t best = -1;
    for (std::size_t rest = mask; rest;) {
      const int j = std::countr_zero(rest);
      const std::size_t bit = std::size_t{1} << j;
      const std::int64_t late = c - inst.due(j);
      const std::int64_t cand = v[mask ^ bit] + (late > 0 ? late : 0);
      if (best < 0 || cand < best) best = cand;
      rest &= rest - 1;
    }
    v[mask] = best;
  }
  return table;
}

DpResult dp_optimal(const Instance& inst, int cap) {
  const DpTable table = dp_table(inst, cap);
  const int n = table.n;
  const auto& v = table.values;
  DpResult res;
  res.value = v.back();
  res.schedule.order.assign(n, -1);
  // Walk back from the full set, peeling off a last job that attains the
  // stored value at each step (lowest index first, for determinism).
  std::size_t mask = (std::size_t{1} << n) - 1;
  for (int pos = n - 1; pos >= 0; --pos) {
    std::int64_t c = 0;
    for (std::size_t rest = mask; rest;) {
      c += inst.ptime(std::countr_zero(rest));
      rest &= rest - 1;
    }
    for (std::size_t rest = mask; rest;) {
      const int j = std::countr_zero(rest);
      const std::size_t bit = std::size_t{1} << j;
      const std::int64_t late = c - inst.due(j);
      if (v[mask ^ bit] + (late > 0 ? late : 0) == v[mask]) {
        res.schedule.order[pos] = j;
        mask ^= bit;
        break;
      }
      rest &= rest - 1;
    }
  }
  return res;
}

std::int64_t pi_coefficient(std::span<const int> sorted_p, int j, int k) {
  const int n = static_cast<int>(sorted_p.size());
  if (j < 1 || j > n || k < 2 || k > n)
    throw std::invalid_argument("pi: need 1 <= j <= n and 2 <= k <= n");
  auto prefix = [&](int m) {  // sum of p_1..p_m, 1-based
    std::int64_t s = 0;
    for (int l = 1; l <= m; ++l) s += sorted_p[l - 1];
    return s;
  };
  if (k <= j) return prefix(k - 1);
  return prefix(j - 1) + (prefix(k) - prefix(j));
}

namespace {

std::string var_u(int j, int k) {
  return "u_" + std::to_string(j) + "_" + std::to_string(k);
}
std::string var_c(int k) { return "c_" + std::to_string(k); }
std::string var_C(int j) { return "C_" + std::to_string(j); }
std::string var_T(int j) { return "T_" + std::to_string(j); }

}  // namespace

MipModel build_mip(const Instance& inst, bool with_vi) {
  const int n = inst.jobs();
  MipModel m;
  m.n = n;
  m.with_vi = with_vi;
  m.big_m = inst.total_ptime();

  m.job_map.resize(n);
  std::iota(m.job_map.begin(), m.job_map.end(), 0);
  if (with_vi) {
    // Reindex by nondecreasing processing time, ties by lower original
    // index. The lower-bound coefficients read "sum of the k-1 smallest
    // processing times excluding job j" off prefix sums, which requires the
    // ascending order; a descending order would overcount and the row would
    // cut off feasible assignments.
    std::stable_sort(m.job_map.begin(), m.job_map.end(), [&](int a, int b) {
      return inst.ptime(a) < inst.ptime(b);
    });
  }
  m.p.resize(n);
  m.d.resize(n);
  for (int j = 0; j < n; ++j) {
    m.p[j] = inst.ptime(m.job_map[j]);
    m.d[j] = inst.due(m.job_map[j]);
  }

  for (int k = 1; k <= n; ++k) m.continuous_vars.push_back(var_c(k));
  for (int j = 1; j <= n; ++j) m.continuous_vars.push_back(var_C(j));
  for (int j = 1; j <= n; ++j) m.continuous_vars.push_back(var_T(j));
  for (int j = 1; j <= n; ++j)
    for (int k = 1; k <= n; ++k) m.binary_vars.push_back(var_u(j, k));

  // Each job takes exactly one position.
  for (int j = 1; j <= n; ++j) {
    MipRow row{"asg_" + std::to_string(j), {}, RowSense::Eq, 1};
    for (int k = 1; k <= n; ++k) row.terms.emplace_back(var_u(j, k), 1);
    m.rows.push_back(std::move(row));
  }
  // Each position takes exactly one job.
  for (int k = 1; k <= n; ++k) {
    MipRow row{"pos_" + std::to_string(k), {}, RowSense::Eq, 1};
    for (int j = 1; j <= n; ++j) row.terms.emplace_back(var_u(j, k), 1);
    m.rows.push_back(std::move(row));
  }
  // First positional completion time.
  {
    MipRow row{"cdef_1", {}, RowSense::Eq, 0};
    row.terms.emplace_back(var_c(1), 1);
    for (int j = 1; j <= n; ++j)
      row.terms.emplace_back(var_u(j, 1), -m.p[j - 1]);
    m.rows.push_back(std::move(row));
  }
  // Completion chain across positions.
  for (int k = 2; k <= n; ++k) {
    MipRow row{"chain_" + std::to_string(k), {}, RowSense::Ge, 0};
    row.terms.emplace_back(var_c(k), 1);
    row.terms.emplace_back(var_c(k - 1), -1);
    for (int j = 1; j <= n; ++j)
      row.terms.emplace_back(var_u(j, k), -m.p[j - 1]);
    m.rows.push_back(std::move(row));
  }
  // Big-M link between per-job and positional completion times.
  for (int j = 1; j <= n; ++j)
    for (int k = 1; k <= n; ++k) {
      MipRow row{"link_" + std::to_string(j) + "_" + std::to_string(k),
                 {},
                 RowSense::Ge,
                 -m.big_m};
      row.terms.emplace_back(var_C(j), 1);
      row.terms.emplace_back(var_c(k), -1);
      row.terms.emplace_back(var_u(j, k), -m.big_m);
      m.rows.push_back(std::move(row));
    }
  // Tardiness definition.
  for (int j = 1; j <= n; ++j) {
    MipRow row{"tard_" + std::to_string(j), {}, RowSense::Ge, -m.d[j - 1]};
    row.terms.emplace_back(var_T(j), 1);
    row.terms.emplace_back(var_C(j), -1);
    m.rows.push_back(std::move(row));
  }
  // Completion-time lower bounds, one per job.
  if (with_vi) {
    for (int j = 1; j <= n; ++j) {
      MipRow row{"vi_" + std::to_string(j), {}, RowSense::Ge, m.p[j - 1]};
      row.terms.emplace_back(var_C(j), 1);
      for (int k = 2; k <= n; ++k)
        row.terms.emplace_back(var_u(j, k), -pi_coefficient(m.p, j, k));
      m.rows.push_back(std::move(row));
    }
  }
  return m;
}

namespace {

// Writes "lhs sense rhs" with at most eight terms per line; continuation
// lines are indented so LP readers treat them as part of the same row.
void write_terms(std::ostringstream& os,
                 const std::vector<std::pair<std::string, std::int64_t>>& terms) {
  int written = 0;
  for (const auto& [var, coeff] : terms) {
    if (written > 0 && written % 8 == 0) os << "\n  ";
    if (written == 0) {
      if (coeff == -1)
        os << "- ";
      else if (coeff != 1)
        os << (coeff < 0 ? "- " : "") << std::llabs(coeff) << ' ';
    } else {
      os << (coeff < 0 ? " - " : " + ");
      if (std::llabs(coeff) != 1) os << std::llabs(coeff) << ' ';
    }
    os << var;
    ++written;
  }
}

}  // namespace

std::string export_lp(const MipModel& m) {
  std::ostringstream os;
  os << "Minimize\n obj: ";
  {
    std::vector<std::pair<std::string, std::int64_t>> obj;
    for (int j = 1; j <= m.n; ++j) obj.emplace_back(var_T(j), 1);
    write_terms(os, obj);
  }
  os << "\nSubject To\n";
  for (const auto& row : m.rows) {
    os << ' ' << row.name << ": ";
    write_terms(os, row.terms);
    os << (row.sense == RowSense::Eq ? " = " : " >= ") << row.rhs << '\n';
  }
  os << "Bounds\n";
  for (const auto& v : m.continuous_vars) os << ' ' << v << " >= 0\n";
  os << "Binary\n";
  for (const auto& v : m.binary_vars) os << ' ' << v << '\n';
  os << "End\n";
  return os.str();
}

AssignmentCheck evaluate_assignment(const MipModel& m, const Schedule& sched) {
  const int n = m.n;
  if (!is_permutation_of(sched.order, n))
    throw std::invalid_argument("assignment: order is not a permutation of the jobs");
  std::vector<int> inverse(n);  // original job id -> model job index
  for (int mj = 0; mj < n; ++mj) inverse[m.job_map[mj]] = mj;

  std::map<std::string, std::int64_t> val;
  std::int64_t t = 0;
  for (int k = 1; k <= n; ++k) {
    const int mj = inverse[sched.order[k - 1]];
    t += m.p[mj];
    val[var_u(mj + 1, k)] = 1;
    val[var_c(k)] = t;
    val[var_C(mj + 1)] = t;
    const std::int64_t late = t - m.d[mj];
    val[var_T(mj + 1)] = late > 0 ? late : 0;
  }

  AssignmentCheck check;
  for (int j = 1; j <= n; ++j) check.objective += val[var_T(j)];
  for (const auto& row : m.rows) {
    std::int64_t lhs = 0;
    for (const auto& [var, coeff] : row.terms) {
      auto it = val.find(var);
      if (it != val.end()) lhs += coeff * it->second;
    }
    const bool ok = row.sense == RowSense::Eq ? lhs == row.rhs : lhs >= row.rhs;
    if (!ok) check.violated.push_back(row.name);
  }
  check.feasible = check.violated.empty();
  return check;
}

}  // namespace smtt
