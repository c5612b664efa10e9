#include "labelcov/error.hpp"
#include "labelcov/instrument.hpp"
#include "labelcov/minic.hpp"
#include "programs.hpp"
#include "straight_line.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace labelcov;

namespace {

AnnotatedProgram one_label() {
  AnnotatedProgram ap;
  ap.program = parse("int f(int x) {\n  int y = x * 2;\n  return y;\n}\n");
  return add_custom_label(
      ap, Location{3, 3},
      make_binary(BinOp::Eq, make_var("y"), make_int(4)));
}

const Block &entry_body(const Program &p) { return p.entry_function().body; }

std::vector<Location> original_locs(const Program &p) {
  std::vector<Location> out;
  for_each_stmt(p, [&](const Stmt &s) {
    if (!s.loc.synthetic)
      out.push_back(s.loc);
  });
  return out;
}

std::string outcome_name(const Outcome &o) {
  switch (o.index()) {
  case 0: return "returned";
  case 1: return "rte";
  case 2: return "silent";
  case 3: return "assert";
  default: return "steps";
  }
}

} // namespace

TEST(Instrument, ModeNames) {
  for (Mode m : {Mode::Ignore, Mode::Naive, Mode::Tight, Mode::Optim,
                 Mode::Replayer})
    EXPECT_EQ(parse_mode(to_string(m)), m);
  EXPECT_THROW(parse_mode("fast"), Error);
}

TEST(Instrument, NaiveIsABranchOnThePredicate) {
  Program p = transform(one_label(), Mode::Naive);
  const auto &stmts = entry_body(p).stmts;
  ASSERT_EQ(stmts.size(), 3u);
  const auto *i = stmts[1]->as<If>();
  ASSERT_TRUE(i);
  EXPECT_FALSE(i->else_block);
  ASSERT_EQ(i->then_block.stmts.size(), 1u);
  EXPECT_TRUE(i->then_block.stmts[0]->as<Nop>());
  EXPECT_TRUE(stmts[1]->loc.synthetic);
  int ifs = 0;
  for_each_stmt(p, [&](const Stmt &s) { ifs += s.as<If>() != nullptr; });
  EXPECT_EQ(ifs, 1);
}

TEST(Instrument, TightGuardsAnAssertion) {
  Program p = transform(one_label(), Mode::Tight);
  const auto &stmts = entry_body(p).stmts;
  ASSERT_EQ(stmts.size(), 3u);
  const auto *g = stmts[1]->as<NondetGuard>();
  ASSERT_TRUE(g);
  EXPECT_EQ(g->id, 1);
  ASSERT_EQ(g->body.stmts.size(), 2u);
  const auto *a = g->body.stmts[0]->as<Assert>();
  ASSERT_TRUE(a);
  EXPECT_EQ(print(*a->cond), "!(y == 4)");
  EXPECT_TRUE(g->body.stmts[1]->as<SilentExit>());
  // The return became a trailing silent exit.
  const auto *tail = stmts[2]->as<Block>();
  ASSERT_TRUE(tail);
  EXPECT_TRUE(tail->stmts.back()->as<SilentExit>());
  EXPECT_EQ(print(p), R"(int f(int x) {
  int y = x * 2;
  if (__nondet_1) {
    __assert(!(y == 4));
    __silent_exit();
  }
  {
    int __result = y;
    __silent_exit();
  }
}
)");
}

TEST(Instrument, OptimExitsOutsideTheCoveredGuard) {
  Program p = transform(one_label(), Mode::Optim);
  const auto *g = entry_body(p).stmts[1]->as<NondetGuard>();
  ASSERT_TRUE(g);
  ASSERT_EQ(g->body.stmts.size(), 2u);
  const auto *c = g->body.stmts[0]->as<CoveredGuard>();
  ASSERT_TRUE(c);
  EXPECT_EQ(c->id, 1);
  ASSERT_EQ(c->body.stmts.size(), 1u);
  EXPECT_TRUE(c->body.stmts[0]->as<Assert>());
  EXPECT_TRUE(g->body.stmts[1]->as<SilentExit>());
}

TEST(Instrument, ReplayerSetsCovered) {
  Program p = transform(one_label(), Mode::Replayer);
  const auto *i = entry_body(p).stmts[1]->as<If>();
  ASSERT_TRUE(i);
  EXPECT_TRUE(i->then_block.stmts[0]->as<SetCovered>());
  EXPECT_TRUE(entry_body(p).stmts[2]->as<Return>());
}

TEST(Instrument, IgnoreEqualsStrip) {
  for (const char *src : {fixtures::kPower, fixtures::kSearch})
    for (auto c : {CriterionTag::mcc(), parse_criterion("WM")}) {
      AnnotatedProgram ap = annotate(parse(src), c);
      Program a = transform(ap, Mode::Ignore);
      Program b = strip(ap);
      EXPECT_TRUE(same_shape(a, b));
      EXPECT_EQ(original_locs(a), original_locs(b));
    }
}

TEST(Instrument, InstrumentedProgramsRoundTripAndTypecheck) {
  for (const char *src : {fixtures::kPower, fixtures::kSearch})
    for (auto c : {CriterionTag::dc(), CriterionTag::mcc(),
                   parse_criterion("WM"), CriterionTag::limit_n(1)})
      for (Mode m : {Mode::Ignore, Mode::Naive, Mode::Tight, Mode::Optim,
                     Mode::Replayer}) {
        Program p = transform(annotate(parse(src), c), m);
        EXPECT_TRUE(typecheck(p).empty()) << to_string(m);
        std::string text = print(p);
        Program q = parse(text);
        EXPECT_TRUE(same_shape(p, q)) << text;
        EXPECT_EQ(print(q), text);
      }
}

TEST(Instrument, OriginalLocationsPreserved) {
  AnnotatedProgram ap = annotate(parse(fixtures::kSearch), CriterionTag::mcc());
  auto base = original_locs(strip(ap));
  for (Mode m : {Mode::Naive, Mode::Tight, Mode::Optim, Mode::Replayer})
    EXPECT_EQ(original_locs(transform(ap, m)), base) << to_string(m);
}

TEST(Instrument, RejectsInstrumentedInput) {
  AnnotatedProgram ap;
  ap.program = transform(one_label(), Mode::Naive);
  try {
    transform(ap, Mode::Tight);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::ModeMismatch);
  }
}

TEST(Instrument, BehaviourPreservedWithNondetOff) {
  std::mt19937 rng(5);
  Program power = parse(fixtures::kPower);
  Program search = parse(fixtures::kSearch);
  for (auto c : {CriterionTag::mcc(), parse_criterion("WM")}) {
    AnnotatedProgram ap = annotate(power, c);
    AnnotatedProgram as = annotate(search, c);
    for (Mode m : {Mode::Ignore, Mode::Naive, Mode::Tight, Mode::Optim,
                   Mode::Replayer}) {
      Program tp = transform(ap, m), ts = transform(as, m);
      bool exits = m == Mode::Tight || m == Mode::Optim;
      for (int i = 0; i < 200; ++i) {
        Inputs a{{"X", Int(static_cast<int>(rng() % 9) - 4)},
                 {"N", Int(static_cast<int>(rng() % 7))}};
        Inputs b{{"n", Int(static_cast<int>(rng() % 3))},
                 {"tab", std::vector<Int>{Int(rng() % 2), Int(rng() % 2)}},
                 {"val", Int(rng() % 2)}};
        for (auto [orig, inst, in] :
             {std::tuple{&power, &tp, a}, std::tuple{&search, &ts, b}}) {
          ExecResult x = interpret(*orig, in), y = interpret(*inst, in);
          std::string want = outcome_name(x.outcome);
          if (exits && want == "returned")
            want = "silent";
          EXPECT_EQ(outcome_name(y.outcome), want);
          if (!exits && x.returned())
            EXPECT_EQ(std::get<outcome::Returned>(x.outcome).value,
                      std::get<outcome::Returned>(y.outcome).value);
          EXPECT_EQ(x.edges, y.edges);
        }
      }
    }
  }
}

TEST(StaticPaths, StraightLineGrowth) {
  for (int k = 0; k <= 8; ++k) {
    AnnotatedProgram ap = fixtures::straight_line(k);
    // Oracle: each naive branch doubles the paths; each tight guard adds one
    // exit next to the single fall-through.
    EXPECT_EQ(count_static_paths(transform(ap, Mode::Naive), 1u << 20).count,
              1u << k);
    EXPECT_EQ(count_static_paths(transform(ap, Mode::Tight), 1u << 20).count,
              static_cast<std::uint64_t>(k) + 1);
    EXPECT_EQ(count_static_paths(transform(ap, Mode::Ignore), 1u << 20).count,
              1u);
  }
}

TEST(StaticPaths, LoopsNeedABound) {
  Program power = parse(fixtures::kPower);
  try {
    count_static_paths(power, 1000);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnboundedLoop);
  }
  // Each iteration is one of two branches of the if; u iterations give
  // 1 + 2 + ... + 2^u paths.
  for (unsigned u = 0; u <= 5; ++u)
    EXPECT_EQ(count_static_paths(power, 1000, u).count, (2u << u) - 1);
}

TEST(StaticPaths, Saturates) {
  Program p = transform(fixtures::straight_line(8), Mode::Naive);
  StaticPaths s = count_static_paths(p, 100);
  EXPECT_TRUE(s.saturated);
  EXPECT_EQ(s.count, 100u);
  EXPECT_FALSE(count_static_paths(p, 256).saturated);
}
