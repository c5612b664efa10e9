#include "labelcov/bench.hpp"
#include "labelcov/error.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace labelcov;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Labels some input covers, by interpreting the annotated program on the
/// whole domain. Runs ending in a runtime error do not count.
std::set<int> feasible_labels(const AnnotatedProgram &ap, const Harness &h) {
  std::set<int> out;
  oracles::for_each_input(h, [&](const Inputs &in) {
    ExecResult r = interpret(ap.program, in);
    if (!r.returned())
      return;
    for (const auto &e : r.label_events)
      if (e.truth)
        out.insert(e.label_id);
  });
  return out;
}

const Metrics &row(const std::vector<Metrics> &rows, Mode m) {
  for (const auto &r : rows)
    if (r.mode == to_string(m))
      return r;
  throw std::runtime_error("no row");
}

void strip_times(std::vector<Metrics> &rows) {
  for (auto &r : rows)
    r.time_ms = 0;
}

bool same_rows(const Metrics &a, const Metrics &b) {
  return a.program == b.program && a.criterion == b.criterion &&
         a.mode == b.mode && a.labels == b.labels && a.covered == b.covered &&
         a.stmts_executed == b.stmts_executed && a.paths == b.paths &&
         a.tests_gen == b.tests_gen && a.tests_kept == b.tests_kept &&
         a.timed_out == b.timed_out && a.diagnostic == b.diagnostic;
}

const std::vector<Mode> kModes = {Mode::Ignore, Mode::Naive, Mode::Tight,
                                  Mode::Optim};

} // namespace

TEST(Bench, DirectoryMatchesBuiltins) {
  fs::path dir = fs::path(LABELCOV_SOURCE_DIR) / "bench";
  for (const auto &s : builtin_sources()) {
    EXPECT_EQ(slurp(dir / (s.name + ".mc")), s.source) << s.name;
    EXPECT_EQ(slurp(dir / (s.name + ".harness")), s.harness) << s.name;
  }
  auto loaded = load_benchmarks(dir);
  ASSERT_EQ(loaded.size(), builtin_sources().size());
  std::set<std::string> names;
  for (const auto &b : loaded)
    names.insert(b.name);
  for (const auto &s : builtin_sources())
    EXPECT_TRUE(names.count(s.name)) << s.name;
}

TEST(Bench, BuiltinsAreWellFormed) {
  for (const auto &b : builtin_benchmarks()) {
    EXPECT_TRUE(typecheck(b.program).empty()) << b.name;
    EXPECT_LE(domain_size(b.harness, 1'000'000), 10'000u) << b.name;
  }
  try {
    builtin_benchmark("tcas");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownEntry);
  }
}

TEST(Bench, PowerDecisionRow) {
  Benchmark power = builtin_benchmark("power");
  AnnotatedProgram ap = annotate(power.program, CriterionTag::dc());
  ASSERT_EQ(feasible_labels(ap, power.harness).size(), 4u);
  auto rows = run_matrix({power}, {CriterionTag::dc()},
                         {Mode::Ignore, Mode::Optim}, {});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].labels, 4u);
  EXPECT_EQ(rows[0].covered, 4u);
  EXPECT_EQ(rows[1].covered, rows[0].covered);
  EXPECT_LE(rows[1].tests_kept, rows[0].tests_kept);
}

TEST(Bench, SearchMccIgnoreFallsShort) {
  auto rows = run_matrix({builtin_benchmark("search")}, {CriterionTag::mcc()},
                         {Mode::Ignore}, {});
  EXPECT_LT(rows[0].covered, rows[0].labels);
}

TEST(Bench, DecisionAndConditionSaturation) {
  for (const auto &b : builtin_benchmarks())
    for (auto c : {CriterionTag::dc(), CriterionTag::cc()}) {
      AnnotatedProgram ap = annotate(b.program, c);
      ASSERT_EQ(feasible_labels(ap, b.harness).size(), ap.labels.size())
          << b.name << " " << c.str();
      for (const auto &r : run_matrix({b}, {c}, kModes, {}))
        EXPECT_EQ(r.covered, r.labels) << b.name << " " << c.str() << " "
                                       << r.mode;
    }
}

TEST(Bench, RowInvariantsAndModeOrdering) {
  auto criteria = {CriterionTag::mcc(), parse_criterion("WM"),
                   CriterionTag::limit_n(1)};
  for (const auto &b : builtin_benchmarks())
    for (const auto &c : criteria) {
      AnnotatedProgram ap = annotate(b.program, c);
      std::size_t feasible = feasible_labels(ap, b.harness).size();
      auto rows = run_matrix({b}, {c}, kModes, {});
      for (const auto &r : rows) {
        ASSERT_FALSE(r.diagnostic) << *r.diagnostic;
        EXPECT_FALSE(r.timed_out);
        EXPECT_LE(r.covered, feasible) << b.name << " " << r.mode;
        EXPECT_LE(r.tests_kept, r.tests_gen);
      }
      EXPECT_GE(row(rows, Mode::Optim).covered, row(rows, Mode::Ignore).covered)
          << b.name << " " << c.str();
      EXPECT_LE(row(rows, Mode::Optim).tests_gen,
                row(rows, Mode::Tight).tests_gen)
          << b.name << " " << c.str();
      // Tight and Optim reach every label some input covers.
      EXPECT_EQ(row(rows, Mode::Tight).covered, feasible) << b.name;
      EXPECT_EQ(row(rows, Mode::Optim).covered, feasible) << b.name;
    }
}

TEST(Bench, Reproducible) {
  auto benches = builtin_benchmarks();
  std::vector<CriterionTag> criteria = {CriterionTag::dc(),
                                        parse_criterion("WM:ROR")};
  auto a = run_matrix(benches, criteria, kModes, {});
  auto b = run_matrix(benches, criteria, kModes, {}, 4);
  ASSERT_EQ(a.size(), benches.size() * criteria.size() * kModes.size());
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_TRUE(same_rows(a[i], b[i])) << i;
  strip_times(a);
  strip_times(b);
  EXPECT_EQ(render_table(a, TableFormat::Tsv), render_table(b, TableFormat::Tsv));
}

TEST(Bench, FailingCellDoesNotAbort) {
  Benchmark wide;
  wide.name = "wide";
  wide.program = parse("int f(int a, int b) { return a + b; }");
  wide.harness = Harness::parse("a 0 999\nb 0 999", wide.program);
  ExploreConfig cfg;
  cfg.feasibility_budget = 1000;
  auto rows = run_matrix({wide, builtin_benchmark("fourballs")},
                         {CriterionTag::dc()}, {Mode::Ignore}, cfg);
  ASSERT_EQ(rows.size(), 2u);
  ASSERT_TRUE(rows[0].diagnostic);
  EXPECT_NE(rows[0].diagnostic->find("BudgetExceeded"), std::string::npos)
      << *rows[0].diagnostic;
  EXPECT_FALSE(rows[1].diagnostic);
  EXPECT_NE(render_table(rows, TableFormat::Tsv).find("wide\tDC\tignore\t—"),
            std::string::npos);
  EXPECT_THROW(run_matrix({}, {CriterionTag::dc()}, {Mode::Ignore}, {}), Error);
}

TEST(Table, Layout) {
  const std::string header = "program\tcriterion\tmode\tlabels\tcovered\tpaths"
                             "\ttests_gen\ttests_kept\ttime_ms\ttimed_out\n";
  EXPECT_EQ(render_table({}, TableFormat::Tsv), header);

  Metrics m;
  m.program = "power";
  m.criterion = "DC";
  m.mode = "optim";
  m.labels = 4;
  m.covered = 4;
  m.paths = 41;
  m.tests_gen = 2;
  m.tests_kept = 2;
  m.time_ms = 1.25;
  EXPECT_EQ(render_table({m}, TableFormat::Tsv),
            header + "power\tDC\toptim\t4\t4\t41\t2\t2\t1.2\t0\n");

  m.timed_out = true;
  EXPECT_EQ(render_table({m}, TableFormat::Tsv),
            header + "power\tDC\toptim\t4\t4\t41\t2\t2\tTO\t1\n");

  std::string md = render_table({m}, TableFormat::Markdown);
  EXPECT_EQ(md.substr(0, md.find('\n')),
            "| program | criterion | mode | labels | covered | paths | "
            "tests_gen | tests_kept | time_ms | timed_out |");
  EXPECT_NE(md.find("| power | DC | optim | 4 | 4 | 41 | 2 | 2 | TO | 1 |"),
            std::string::npos);
}
