//===-- symex.hpp - Bounded symbolic exploration ----------------*- C++ -*-===//
//
// Part of labelcov, a label-driven test generation toolkit.
//
//===----------------------------------------------------------------------===//
//
// A path-by-path explorer for MiniC over finite input domains. Every state
// keeps the set of input assignments consistent with its path condition and
// evaluates instructions on all of them at once, so feasibility of a branch
// is decided exactly by partitioning that set.
//
//===----------------------------------------------------------------------===//

#ifndef LABELCOV_SYMEX_HPP
#define LABELCOV_SYMEX_HPP

#include "labelcov/instrument.hpp"
#include "labelcov/minic.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace labelcov {

//===----------------------------------------------------------------------===//
// Harness
//===----------------------------------------------------------------------===//

struct Interval {
  Int lo, hi;
  friend bool operator==(const Interval &, const Interval &) = default;
};

/// Input domains of the entry function. Arrays get one interval per element.
struct Harness {
  std::string entry;
  std::map<std::string, Interval> scalars;
  std::map<std::string, std::vector<Interval>> arrays;

  /// Parses lines `name lo hi`; for an array, `name lo hi` sets every element
  /// and `name[i] lo hi` one element. `#` starts a comment. Throws
  /// HarnessError when a parameter of `p`'s entry function has no domain.
  static Harness parse(std::string_view text, const Program &p);
  static Harness load(const std::filesystem::path &file, const Program &p);

  std::string str() const;
};

/// Replaces the domain of scalar `name`, of every element of array `name`, or
/// of one element `name[i]`. Throws HarnessError for other names.
void set_bound(Harness &h, const std::string &name, Interval iv);

/// Flattened input names (`x`, `tab[0]`, ...) in enumeration order: sorted by
/// base name, then element index. The first name varies slowest.
std::vector<std::string> input_names(const Harness &h);

/// Number of assignments in the domain product; nullopt past `cap`.
std::optional<std::uint64_t> domain_size(const Harness &h, std::uint64_t cap);

//===----------------------------------------------------------------------===//
// Path conditions and tests
//===----------------------------------------------------------------------===//

/// A total assignment keyed by flattened input name.
using Model = std::map<std::string, Int>;

/// What a conjunct demands of its term. The `OrError` forms come from label
/// predicates, whose runtime errors count as "false".
enum class Expect { Nonzero, Zero, NonzeroOrError, ZeroOrError };

struct Conjunct {
  ExprPtr term; // over harness inputs
  Expect expect;
};

struct PathCondition {
  std::vector<Conjunct> conjuncts;
  std::vector<Location> fork_locs;
};

enum class TestKind { Complete, AssertErr, RteErr };
const char *to_string(TestKind k);

struct TestCase {
  int id = 0;
  Model assignment;
  TestKind kind = TestKind::Complete;
  /// Label whose assertion failed, for AssertErr.
  int label_id = 0;
  /// For RteErr.
  RteKind rte = RteKind::DivByZero;
  /// Statements executed along the path.
  std::size_t path_len = 0;
  PathCondition pc;
  std::vector<BranchEdge> edges;
};

/// Builds interpreter inputs from a test assignment. `nondet_` names are
/// passed through as scalars.
Inputs to_inputs(const Model &m, const Program &p);

//===----------------------------------------------------------------------===//
// Exploration
//===----------------------------------------------------------------------===//

enum class Strategy { DFS, BFS };
const char *to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

struct ExploreConfig {
  Strategy strategy = Strategy::DFS;
  std::chrono::milliseconds time_budget{10'000};
  std::size_t max_paths = 1'000'000;
  std::size_t max_steps_per_path = 200'000;
  /// Keep a complete-path test only if it covers a new branch edge.
  bool covering_new = true;
  /// Largest domain product the engine will enumerate.
  std::uint64_t feasibility_budget = 1'000'000;
};

/// `__covered(id)` answered at a CoveredGuard.
struct GuardEvent {
  int label_id;
  bool covered;
};

/// One evaluation of a label assertion.
struct AssertEvent {
  int label_id;
  bool can_fail;
  bool can_pass;
  /// Store status of the label when the assertion was evaluated.
  bool covered;
};

struct ExplorationReport {
  std::vector<TestCase> tests;
  std::size_t paths_complete = 0;
  std::size_t paths_partial = 0;
  std::size_t forks = 0;
  std::size_t solver_calls = 0;
  std::size_t stmts_executed = 0;
  double wall_time_ms = 0;
  bool timed_out = false;
  /// max_paths was reached before the tree was exhausted.
  bool truncated = false;
  std::vector<GuardEvent> guard_events;
  std::vector<AssertEvent> assert_events;
};

/// Callbacks into the explorer's client; all run on the explorer's thread.
class ExplorationHook {
public:
  virtual ~ExplorationHook() = default;
  virtual void on_test(const TestCase &) {}
  /// Called after every fork, for clients that emulate delayed replay.
  virtual void on_fork() {}
  /// Answers `__covered(id)`.
  virtual bool covered(int) { return false; }
};

/// Explores `p` over the domains of `h`. Throws InfeasibleHarness for an
/// empty domain, BudgetExceeded when the product exceeds the feasibility
/// budget, and ModeMismatch for programs still carrying labels or replayer
/// statements.
ExplorationReport explore(const Program &p, const Harness &h,
                          const ExploreConfig &cfg = {},
                          ExplorationHook *hook = nullptr);

/// The lexicographically smallest assignment satisfying every conjunct and
/// `extra` (when given), or nullopt. Throws BudgetExceeded past `budget`.
std::optional<Model> solve(const PathCondition &pc, const ExprPtr &extra,
                           const Harness &h,
                           std::uint64_t budget = 1'000'000);

/// Tests that count for a mode: Complete for Ignore/Naive, AssertErr for
/// Tight/Optim. RteErr tests never count.
std::vector<TestCase> classify_tests(const ExplorationReport &r, Mode m);

//===----------------------------------------------------------------------===//
// Test files
//===----------------------------------------------------------------------===//

/// Writes `test_<n>.kv`, error markers and `stats.txt` into `dir`.
void write_tests(const std::filesystem::path &dir,
                 const ExplorationReport &r);
void write_test(const std::filesystem::path &file, const Model &m);
std::string stats_text(const ExplorationReport &r);

/// Reads one `.kv` file; the kind comes from a sibling marker file.
TestCase read_test(const std::filesystem::path &file);
/// Reads every `test_<n>.kv` in `dir` in numeric order.
std::vector<TestCase> read_tests(const std::filesystem::path &dir);

} // namespace labelcov

#endif // LABELCOV_SYMEX_HPP
