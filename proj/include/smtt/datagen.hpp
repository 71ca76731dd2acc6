#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smtt/core.hpp"

namespace smtt {

// xoshiro256++ seeded through splitmix64. All derived draws (bounded ints,
// unit doubles, normals) are built from the raw 64-bit stream with fixed
// arithmetic only, so the same seed reproduces the same bytes on any
// platform. The exact derivations are documented in docs/formats.md.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();

  // Uniform in [0, bound) via 128-bit multiply-shift range reduction.
  std::uint64_t below(std::uint64_t bound);

  // Uniform integer in [lo, hi], inclusive.
  int int_in(int lo, int hi);

  // Uniform in [0, 1) with 53 random mantissa bits.
  double uniform01();

  // Uniform in [a, b).
  double uniform(double a, double b);

  // Marsaglia polar method; the spare deviate is discarded so every call
  // consumes a whole number of accept/reject rounds.
  double normal(double mean, double sd);

private:
  std::uint64_t s_[4];
};

// Deterministic per-class sub-stream seed so each class of a dataset can be
// regenerated independently.
std::uint64_t class_substream_seed(std::uint64_t master_seed, int class_index);

enum class Distribution { UniformProcessing, NormalProcessing };

const std::string& distribution_name(Distribution);
Distribution distribution_from_name(const std::string&);

// One instance class: n jobs, relative due-date range RDD and tardiness
// factor TF, both in (0, 1].
struct ClassParams {
  int n;
  double rdd;
  double tf;
  Distribution dist;

  ClassParams(int n, double rdd, double tf, Distribution dist);
};

struct DatasetClass {
  ClassParams params;
  std::vector<Instance> instances;
  std::vector<std::string> ids;  // parallel to instances
};

struct Dataset {
  std::vector<DatasetClass> classes;
  std::uint64_t seed = 0;
  int per_class = 0;

  std::size_t total_instances() const;
};

// Processing times: integer-uniform {1..100}, or round(Normal(60, 20))
// clamped to >= 1. Due dates: round of a continuous uniform draw on
// [P(1-TF-RDD/2), P(1-TF+RDD/2)] where P is the realized sum of processing
// times; negative values are kept.
Instance generate_instance(const ClassParams&, Rng&);

Dataset generate_dataset(const std::vector<ClassParams>&, int per_class,
                         std::uint64_t seed);

// RDD in {0.2,...,1.0} crossed with TF in {0.2,...,0.8}: 20 classes.
std::vector<ClassParams> test_grid(int n, Distribution);
// Same plus TF = 1.0: 25 classes.
std::vector<ClassParams> training_grid(int n, Distribution);

// Canonical instance file: line 1 = n, line 2 = processing times,
// line 3 = due dates; space-separated ASCII decimal, LF newlines.
std::string instance_to_string(const Instance&);
Instance instance_from_string(const std::string& text);
void write_instance(const Instance&, const std::string& path);
Instance read_instance(const std::string& path);

// Writes instance files plus manifest.csv with columns
// class_id,n,rdd,tf,distribution,instance_path,seed (seed = the class
// sub-stream seed). The master seed is not stored, so a reloaded dataset
// reports seed = 0.
void write_dataset(const Dataset&, const std::string& dir);
Dataset load_dataset(const std::string& dir);

}  // namespace smtt
