#include "smtt/datagen.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "textutil.hpp"

namespace smtt {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
  for (auto& w : s_) w = splitmix64(seed);
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(next()) * bound) >> 64);
}

int Rng::int_in(int lo, int hi) {
  return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

double Rng::uniform01() { return (next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double a, double b) { return a + (b - a) * uniform01(); }

double Rng::normal(double mean, double sd) {
  for (;;) {
    double u = 2.0 * uniform01() - 1.0;
    double v = 2.0 * uniform01() - 1.0;
    double s = u * u + v * v;
    if (s > 0.0 && s < 1.0)
      return mean + sd * (u * std::sqrt(-2.0 * std::log(s) / s));
  }
}

std::uint64_t class_substream_seed(std::uint64_t master_seed, int class_index) {
  std::uint64_t x = master_seed +
                    (static_cast<std::uint64_t>(class_index) + 1) * 0x9e3779b97f4a7c15ULL;
  return splitmix64(x);
}

const std::string& distribution_name(Distribution d) {
  static const std::string uniform = "uniform", normal = "normal";
  return d == Distribution::UniformProcessing ? uniform : normal;
}

Distribution distribution_from_name(const std::string& name) {
  if (name == "uniform") return Distribution::UniformProcessing;
  if (name == "normal") return Distribution::NormalProcessing;
  throw std::invalid_argument("unknown distribution: " + name);
}

ClassParams::ClassParams(int n_, double rdd_, double tf_, Distribution dist_)
    : n(n_), rdd(rdd_), tf(tf_), dist(dist_) {
  if (n < 1) throw std::invalid_argument("class: n must be >= 1");
  if (!(rdd > 0.0 && rdd <= 1.0) || !(tf > 0.0 && tf <= 1.0))
    throw std::invalid_argument("class: rdd and tf must lie in (0, 1]");
}

std::size_t Dataset::total_instances() const {
  std::size_t total = 0;
  for (const auto& c : classes) total += c.instances.size();
  return total;
}

Instance generate_instance(const ClassParams& cp, Rng& rng) {
  std::vector<int> p(cp.n), d(cp.n);
  for (int j = 0; j < cp.n; ++j) {
    if (cp.dist == Distribution::UniformProcessing) {
      p[j] = rng.int_in(1, 100);
    } else {
      long long v = std::llround(rng.normal(60.0, 20.0));
      p[j] = static_cast<int>(std::max(1LL, v));
    }
  }
  const double total = static_cast<double>(
      std::accumulate(p.begin(), p.end(), std::int64_t{0}));
  const double lo = total * (1.0 - cp.tf - cp.rdd / 2.0);
  const double hi = total * (1.0 - cp.tf + cp.rdd / 2.0);
  for (int j = 0; j < cp.n; ++j)
    d[j] = static_cast<int>(std::llround(rng.uniform(lo, hi)));
  return Instance(std::move(p), std::move(d));
}

Dataset generate_dataset(const std::vector<ClassParams>& classes, int per_class,
                         std::uint64_t seed) {
  if (per_class < 0) throw std::invalid_argument("dataset: per_class must be >= 0");
  Dataset ds;
  ds.seed = seed;
  ds.per_class = per_class;
  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    Rng rng(class_substream_seed(seed, static_cast<int>(ci)));
    DatasetClass dc{classes[ci], {}, {}};
    for (int k = 0; k < per_class; ++k) {
      dc.instances.push_back(generate_instance(classes[ci], rng));
      char id[32];
      std::snprintf(id, sizeof id, "c%02zu_i%04d.txt", ci, k);
      dc.ids.emplace_back(id);
    }
    ds.classes.push_back(std::move(dc));
  }
  return ds;
}

std::vector<ClassParams> test_grid(int n, Distribution dist) {
  std::vector<ClassParams> out;
  for (double rdd : {0.2, 0.4, 0.6, 0.8, 1.0})
    for (double tf : {0.2, 0.4, 0.6, 0.8})
      out.emplace_back(n, rdd, tf, dist);
  return out;
}

std::vector<ClassParams> training_grid(int n, Distribution dist) {
  std::vector<ClassParams> out;
  for (double rdd : {0.2, 0.4, 0.6, 0.8, 1.0})
    for (double tf : {0.2, 0.4, 0.6, 0.8, 1.0})
      out.emplace_back(n, rdd, tf, dist);
  return out;
}

std::string instance_to_string(const Instance& inst) {
  std::ostringstream os;
  os << inst.jobs() << '\n';
  for (int j = 0; j < inst.jobs(); ++j)
    os << (j ? " " : "") << inst.ptime(j);
  os << '\n';
  for (int j = 0; j < inst.jobs(); ++j)
    os << (j ? " " : "") << inst.due(j);
  os << '\n';
  return os.str();
}

Instance instance_from_string(const std::string& text) {
  std::istringstream is(text);
  long long n;
  if (!(is >> n) || n < 1 || n > 10'000'000)
    throw std::invalid_argument("instance file: bad job count");
  std::vector<int> p(n), d(n);
  for (auto& v : p)
    if (!(is >> v)) throw std::invalid_argument("instance file: missing processing time");
  for (auto& v : d)
    if (!(is >> v)) throw std::invalid_argument("instance file: missing due date");
  std::string extra;
  if (is >> extra) throw std::invalid_argument("instance file: trailing tokens");
  return Instance(std::move(p), std::move(d));  // validates p >= 1
}

void write_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << instance_to_string(inst);
}

Instance read_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return instance_from_string(buf.str());
}

void write_dataset(const Dataset& ds, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::ofstream manifest(fs::path(dir) / "manifest.csv", std::ios::binary);
  if (!manifest) throw std::runtime_error("cannot write manifest in " + dir);
  manifest << "class_id,n,rdd,tf,distribution,instance_path,seed\n";
  for (std::size_t ci = 0; ci < ds.classes.size(); ++ci) {
    const auto& dc = ds.classes[ci];
    const std::uint64_t sub = class_substream_seed(ds.seed, static_cast<int>(ci));
    for (std::size_t k = 0; k < dc.instances.size(); ++k) {
      write_instance(dc.instances[k], (fs::path(dir) / dc.ids[k]).string());
      char cid[16];
      std::snprintf(cid, sizeof cid, "c%02zu", ci);
      manifest << cid << ',' << dc.params.n << ',' << fmt_trim(dc.params.rdd)
               << ',' << fmt_trim(dc.params.tf) << ','
               << distribution_name(dc.params.dist) << ',' << dc.ids[k] << ','
               << sub << '\n';
    }
  }
}

Dataset load_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream manifest(fs::path(dir) / "manifest.csv", std::ios::binary);
  if (!manifest) throw std::runtime_error("cannot read manifest in " + dir);
  std::string line;
  if (!std::getline(manifest, line) ||
      line != "class_id,n,rdd,tf,distribution,instance_path,seed")
    throw std::runtime_error("manifest: unexpected header");
  Dataset ds;
  std::string current_class;
  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    auto cols = split_csv_line(line);
    if (cols.size() != 7) throw std::runtime_error("manifest: bad row: " + line);
    if (cols[0] != current_class) {
      current_class = cols[0];
      ClassParams params(std::stoi(cols[1]), std::stod(cols[2]), std::stod(cols[3]),
                         distribution_from_name(cols[4]));
      ds.classes.push_back(DatasetClass{params, {}, {}});
    }
    auto& dc = ds.classes.back();
    dc.instances.push_back(read_instance((fs::path(dir) / cols[5]).string()));
    dc.ids.push_back(cols[5]);
  }
  for (const auto& dc : ds.classes)
    ds.per_class = std::max(ds.per_class, static_cast<int>(dc.instances.size()));
  return ds;
}

}  // namespace smtt
