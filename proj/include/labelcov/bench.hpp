//===-- bench.hpp - Benchmark programs and the experiment matrix -*- C++ -*-===//
//
// Part of labelcov, a label-driven test generation toolkit.
//
//===----------------------------------------------------------------------===//

#ifndef LABELCOV_BENCH_HPP
#define LABELCOV_BENCH_HPP

#include "labelcov/coverage.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace labelcov {

struct BenchmarkSource {
  std::string name;
  std::string source;
  std::string harness;
  std::string notes;
};

struct Benchmark {
  std::string name;
  Program program;
  Harness harness;
  std::string notes;
};

/// power, search, tritype, selection_sort, fourballs, modulus, boundary.
const std::vector<BenchmarkSource> &builtin_sources();

Benchmark build_benchmark(const BenchmarkSource &src);
std::vector<Benchmark> builtin_benchmarks();
/// Builtin benchmark by name. Throws UnknownEntry.
Benchmark builtin_benchmark(const std::string &name);

/// Every `<name>.mc` in `dir` with a sibling `<name>.harness`, sorted by name.
std::vector<Benchmark> load_benchmarks(const std::filesystem::path &dir);

struct Metrics {
  std::string program;
  std::string criterion;
  std::string mode;
  std::size_t labels = 0;
  std::size_t covered = 0;
  std::size_t stmts_executed = 0;
  std::size_t paths = 0;
  std::size_t tests_gen = 0;
  std::size_t tests_kept = 0;
  double time_ms = 0;
  bool timed_out = false;
  /// Set when the cell failed; the counters are then meaningless.
  std::optional<std::string> diagnostic;
};

/// One row per (benchmark, criterion, mode), benchmark-major. `jobs` > 1 runs
/// cells on that many threads; rows keep the same order.
std::vector<Metrics> run_matrix(const std::vector<Benchmark> &benchmarks,
                                const std::vector<CriterionTag> &criteria,
                                const std::vector<Mode> &modes,
                                const ExploreConfig &cfg, unsigned jobs = 1);

enum class TableFormat { Tsv, Markdown };

std::string render_table(const std::vector<Metrics> &rows, TableFormat fmt);

} // namespace labelcov

#endif // LABELCOV_BENCH_HPP
