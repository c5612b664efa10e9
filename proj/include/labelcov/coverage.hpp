//===-- coverage.hpp - Label coverage store and test replay -----*- C++ -*-===//
//
// Part of labelcov, a label-driven test generation toolkit.
//
//===----------------------------------------------------------------------===//

#ifndef LABELCOV_COVERAGE_HPP
#define LABELCOV_COVERAGE_HPP

#include "labelcov/criteria.hpp"
#include "labelcov/instrument.hpp"
#include "labelcov/symex.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace labelcov {

/// Covered flags of every label, optionally mirrored to a file with lines
/// `<id> <0|1>`. Flags only ever go from 0 to 1.
class CoverageStore {
public:
  explicit CoverageStore(const std::vector<int> &ids = {});

  /// Opens the store file at `path`, creating it when absent. Ids listed in
  /// `ids` but missing from the file start uncovered. Throws StoreError on a
  /// malformed file.
  static CoverageStore open(const std::filesystem::path &path,
                            const std::vector<int> &ids);

  bool covered(int id) const;
  const std::map<int, bool> &statuses() const { return statuses_; }
  std::set<int> covered_ids() const;
  std::size_t covered_count() const;
  std::size_t total() const { return statuses_.size(); }
  /// covered / total; 1 for a store without labels.
  double ratio() const;

  /// Marks `ids` covered. With a backing file, the new contents are written
  /// to a temporary file and renamed over the old one before the in-memory
  /// state changes.
  void commit(const std::set<int> &ids);

  const std::optional<std::filesystem::path> &path() const { return path_; }

  /// Runs between writing the temporary file and renaming it. Tests use it
  /// to simulate a crash in the middle of a commit.
  void set_fault_seam(std::function<void()> seam) { seam_ = std::move(seam); }

  static std::map<int, bool> read_file(const std::filesystem::path &path);

private:
  std::map<int, bool> statuses_;
  std::optional<std::filesystem::path> path_;
  std::function<void()> seam_;

  void persist(const std::map<int, bool> &next);
};

/// Labels seen covered during one replay, committed only if it ends normally.
struct ReplayBuffer {
  std::set<int> staged;
};

struct ReplayResult {
  /// The run returned without a runtime error or step-limit stop.
  bool normal = false;
  std::set<int> covered;
  ExecResult exec;
};

/// Runs tests on the replayer form of an annotated program.
class Replayer {
public:
  explicit Replayer(const AnnotatedProgram &ap);

  ReplayResult run(const TestCase &t, CoverageStore &store) const;
  const Program &program() const { return program_; }

private:
  Program program_;
};

ReplayResult replay(const AnnotatedProgram &ap, const TestCase &t,
                    CoverageStore &store);

/// Keeps the first of every group of tests that agree on all inputs not
/// named `nondet_*`.
std::vector<TestCase> dedup_nondet(const std::vector<TestCase> &tests);

struct SuiteReport {
  std::vector<TestCase> generated;
  std::vector<TestCase> kept;
  std::map<int, bool> per_label;
  std::size_t covered = 0;
  std::size_t total = 0;
  /// Covered count after each replay, in replay order.
  std::vector<std::size_t> progress;

  double coverage_ratio() const {
    return total == 0 ? 1.0 : static_cast<double>(covered) / total;
  }
};

/// Replays `tests` in order against `store`, keeping those that replay
/// normally and cover at least one new label.
SuiteReport greedy_reduce(const AnnotatedProgram &ap,
                          const std::vector<TestCase> &tests,
                          CoverageStore &store);

struct PipelineOptions {
  /// Optim only: replay an assertion test this many forks after it was
  /// emitted instead of immediately.
  std::size_t async_delay = 0;
  /// Optim only: file backing the store shared with the explorer.
  std::optional<std::filesystem::path> store_path;
};

struct PipelineResult {
  ExplorationReport exploration;
  SuiteReport suite;
  /// Label ids of the program, for reporting.
  std::size_t labels = 0;
};

/// Instruments, explores, filters and reduces. Throws ModeMismatch for the
/// Replayer mode.
PipelineResult run_pipeline(const AnnotatedProgram &ap, const Harness &h,
                            Mode mode, ExploreConfig cfg,
                            const PipelineOptions &opts = {});

/// `report.tsv` contents.
std::string report_tsv(const SuiteReport &s);
/// Writes `report.tsv` and one `kept_<id>.kv` per kept test.
void write_suite(const std::filesystem::path &dir, const SuiteReport &s);

} // namespace labelcov

#endif // LABELCOV_COVERAGE_HPP
