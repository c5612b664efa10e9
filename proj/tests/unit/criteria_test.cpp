#include "labelcov/criteria.hpp"
#include "labelcov/error.hpp"
#include "labelcov/minic.hpp"
#include "programs.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace labelcov;

namespace {

std::vector<std::string> predicates(const AnnotatedProgram &ap) {
  std::vector<std::string> out;
  for (const auto &l : ap.labels)
    out.push_back(print(*l.predicate));
  return out;
}

using Strings = std::vector<std::string>;

int count_decisions(const Program &p) {
  int n = 0;
  for_each_stmt(p, [&](const Stmt &s) { n += s.as<If>() || s.as<While>(); });
  return n;
}

ErrorKind error_of(const std::function<void()> &f) {
  try {
    f();
  } catch (const Error &e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::IoError;
}

/// Label ids seen by the interpreter hook as covered (predicate true).
std::set<int> covered_by(const Program &p, const Inputs &in) {
  std::set<int> out;
  interpret(p, in, [&](int id, bool t) {
    if (t)
      out.insert(id);
  });
  return out;
}

} // namespace

TEST(Criteria, ParseCriterion) {
  EXPECT_EQ(parse_criterion("DC"), CriterionTag::dc());
  EXPECT_EQ(parse_criterion("cc"), CriterionTag::cc());
  EXPECT_EQ(parse_criterion("MCC"), CriterionTag::mcc());
  EXPECT_EQ(parse_criterion("LIMIT:3"), CriterionTag::limit_n(3));
  EXPECT_EQ(parse_criterion("WM:AOR,ABS").str(), "WM:ABS,AOR");
  EXPECT_EQ(parse_criterion("WM").str(), "WM:ABS,AOR,ROR,COR");
  for (const char *bad : {"", "MCDC", "WM:", "WM:XYZ", "LIMIT:", "LIMIT:-1",
                          "LIMIT:2x"})
    EXPECT_EQ(error_of([&] { parse_criterion(bad); }),
              ErrorKind::UnsupportedCriterion)
        << bad;
}

TEST(Criteria, AtomsDescendThroughNegation) {
  Program p = parse("int f(int res, int i, int n) { while (!res && i < n) "
                    "{ i = i + 1; } return i; }");
  const auto *w = p.functions[0].body.stmts[0]->as<While>();
  auto as = atoms(w->cond);
  ASSERT_EQ(as.size(), 2u);
  EXPECT_EQ(print(*as[0]), "res");
  EXPECT_EQ(print(*as[1]), "i < n");
}

TEST(Criteria, MccFigureExample) {
  Program p = parse("int f(int x, int y, int a, int b) { if (x==y && a<b) "
                    "{ x = 1; } return x; }");
  AnnotatedProgram ap = annotate(p, CriterionTag::mcc());
  EXPECT_EQ(predicates(ap),
            (Strings{"x == y && a < b", "!(x == y) && a < b",
                     "x == y && !(a < b)", "!(x == y) && !(a < b)"}));
}

TEST(Criteria, WeakMutationFigureExample) {
  Program p = parse("int f(int a, int b) { int x = 0; x = a+b; return x; }");
  AnnotatedProgram ap =
      annotate(p, CriterionTag::wm({WmOp::ABS, WmOp::AOR}));
  EXPECT_EQ(predicates(ap),
            (Strings{"a != abs(a)", "b != abs(b)", "a + b != a - b",
                     "a + b != a * b", "a + b != a / b"}));
  EXPECT_EQ(ap.labels[4].note, "AOR + -> /");
  EXPECT_EQ(ap.labels[0].criterion.str(), "WM:ABS");
}

TEST(Criteria, LimitFigureExample) {
  Program p = parse("int f(int a, int b) { if (a<b) { a = b; } return a; }");
  EXPECT_EQ(predicates(annotate(p, CriterionTag::limit_n(0))),
            (Strings{"a < b && abs(a - b + 1) <= 0"}));
}

TEST(Criteria, LimitBoundariesBySymmetry) {
  Program p = parse("int f(int a, int b) { if (a <= b || a > b + 1 || "
                    "a >= 2 || a == b) { a = b; } return a; }");
  EXPECT_EQ(predicates(annotate(p, CriterionTag::limit_n(2))),
            (Strings{"a <= b && abs(a - b) <= 2",
                     "a > b + 1 && abs(b + 1 - a + 1) <= 2",
                     "a >= 2 && abs(2 - a) <= 2"}));
}

TEST(Criteria, RelationalAndConnectorMutants) {
  Program p = parse("int f(int a, int b) { if (a < b && b > 0) { a = b; } "
                    "return a; }");
  AnnotatedProgram ap =
      annotate(p, CriterionTag::wm({WmOp::ROR, WmOp::COR}));
  ASSERT_EQ(ap.labels.size(), 11u);
  EXPECT_EQ(print(*ap.labels[0].predicate), "a < b != a <= b");
  EXPECT_EQ(print(*ap.labels[4].predicate), "a < b != (a != b)");
  EXPECT_EQ(print(*ap.labels[10].predicate),
            "(a < b && b > 0) != (a < b || b > 0)");
}

TEST(Criteria, ModuloGetsFourReplacements) {
  Program p = parse("int f(int a, int b) { int x = a % b; return x; }");
  EXPECT_EQ(annotate(p, CriterionTag::wm({WmOp::AOR})).labels.size(), 4u);
}

TEST(Criteria, PowerDecisionCoverage) {
  Program p = parse(fixtures::kPower);
  AnnotatedProgram ap = annotate(p, CriterionTag::dc());
  EXPECT_EQ(static_cast<int>(ap.labels.size()), 2 * count_decisions(p));
  EXPECT_EQ(ap.labels.size(), 4u);
}

TEST(Criteria, LabelTableAndSerialization) {
  Program p = parse(fixtures::kSearch);
  AnnotatedProgram ap = annotate(p, CriterionTag::mcc());
  EXPECT_EQ(label_table(ap).substr(0, 28), "1\t4:3\tMCC\tres && i < n\tTT\n2\t");
  std::string text = print_annotated(ap);
  std::size_t comments = 0;
  for (std::size_t pos = 0; (pos = text.find("// label ", pos)) !=
                            std::string::npos;
       ++pos)
    ++comments;
  // Loop decision: 4 labels; the inner if has a single atom: 2 more.
  EXPECT_EQ(comments, 6u);
  EXPECT_NE(text.find("  // label 4: !res && !(i < n)\n  while"),
            std::string::npos)
      << text;
  EXPECT_EQ(ap.labels[5].loc.line, 5);
}

TEST(Criteria, IdsAreDenseAndMatchStatements) {
  for (const char *src : {fixtures::kPower, fixtures::kSearch})
    for (auto c : {CriterionTag::dc(), CriterionTag::cc(), CriterionTag::mcc(),
                   parse_criterion("WM"), CriterionTag::limit_n(1)}) {
      AnnotatedProgram ap = annotate(parse(src), c);
      std::vector<int> ids;
      for_each_stmt(ap.program, [&](const Stmt &s) {
        if (const auto *l = s.as<LabelStmt>()) {
          ids.push_back(l->id);
          EXPECT_TRUE(s.loc.synthetic);
          EXPECT_EQ(l->predicate, ap.find(l->id)->predicate);
        }
      });
      ASSERT_EQ(ids.size(), ap.labels.size());
      for (std::size_t i = 0; i < ids.size(); ++i) {
        EXPECT_EQ(ids[i], static_cast<int>(i) + 1);
        EXPECT_EQ(ap.labels[i].id, static_cast<int>(i) + 1);
      }
      EXPECT_TRUE(typecheck(ap.program).empty());
    }
}

TEST(Criteria, AnnotateIsDeterministic) {
  Program p = parse(fixtures::kSearch);
  for (auto c : {CriterionTag::mcc(), parse_criterion("WM")})
    EXPECT_EQ(label_table(annotate(p, c)), label_table(annotate(p, c)));
}

TEST(Criteria, AtomCap) {
  Program p = parse("int f(int a) { if (a==1 || a==2 || a==3 || a==4 || "
                    "a==5 || a==6 || a==7) { a = 0; } return a; }");
  EXPECT_EQ(error_of([&] { annotate(p, CriterionTag::mcc()); }),
            ErrorKind::AtomCapExceeded);
  EXPECT_EQ(annotate(p, CriterionTag::mcc(), {7}).labels.size(), 128u);
  EXPECT_EQ(annotate(p, CriterionTag::cc()).labels.size(), 14u);
}

TEST(Criteria, StripRestoresBehaviour) {
  Program power = parse(fixtures::kPower);
  Program stripped = strip(annotate(power, CriterionTag::dc()));
  EXPECT_TRUE(same_shape(stripped, power));
  ExecResult r = interpret(stripped, {{"X", Int(3)}, {"N", Int(4)}});
  EXPECT_EQ(*std::get<outcome::Returned>(r.outcome).value, 81);

  Program flat = parse("int f(int a) { return a; }");
  AnnotatedProgram none = annotate(flat, CriterionTag::dc());
  EXPECT_TRUE(none.labels.empty());
  EXPECT_TRUE(same_shape(strip(none), flat));

  Program search = parse(fixtures::kSearch);
  Inputs in{{"n", Int(0)}, {"tab", std::vector<Int>{0, 0}}, {"val", Int(0)}};
  AnnotatedProgram ap = annotate(search, CriterionTag::mcc());
  EXPECT_EQ(interpret(strip(ap), in).visited, interpret(search, in).visited);
  // Labels themselves do not perturb the trace either.
  EXPECT_EQ(interpret(ap.program, in).visited, interpret(search, in).visited);
}

TEST(Criteria, StripRoundTripRandomized) {
  std::mt19937 rng(3);
  Program power = parse(fixtures::kPower);
  Program search = parse(fixtures::kSearch);
  for (auto c : {CriterionTag::dc(), CriterionTag::mcc(), parse_criterion("WM"),
                 CriterionTag::limit_n(0)}) {
    Program sp = strip(annotate(power, c));
    Program ss = strip(annotate(search, c));
    for (int i = 0; i < 1000; ++i) {
      Inputs a{{"X", Int(static_cast<int>(rng() % 9) - 4)},
               {"N", Int(static_cast<int>(rng() % 7))}};
      EXPECT_EQ(interpret(sp, a).visited, interpret(power, a).visited);
      Inputs b{{"n", Int(static_cast<int>(rng() % 3))},
               {"tab", std::vector<Int>{Int(rng() % 2), Int(rng() % 2)}},
               {"val", Int(rng() % 2)}};
      ExecResult x = interpret(ss, b), y = interpret(search, b);
      EXPECT_EQ(x.visited, y.visited);
      EXPECT_EQ(std::get<outcome::Returned>(x.outcome).value,
                std::get<outcome::Returned>(y.outcome).value);
    }
  }
}

TEST(Criteria, CustomLabels) {
  Program power = parse(fixtures::kPower);
  AnnotatedProgram ap = annotate(power, CriterionTag::dc());
  // `return S;` is on line 13, column 3.
  AnnotatedProgram with = add_custom_label(
      ap, Location{13, 3}, make_binary(BinOp::Gt, make_var("S"), make_int(100)));
  ASSERT_EQ(with.labels.size(), 5u);
  EXPECT_EQ(with.labels.back().id, 5);
  EXPECT_EQ(with.labels.back().criterion.str(), "CUSTOM");
  EXPECT_EQ(label_table(with).substr(label_table(ap).size()),
            "5\t13:3\tCUSTOM\tS > 100\t\n");
  auto hit = covered_by(with.program, {{"X", Int(3)}, {"N", Int(5)}});
  EXPECT_TRUE(hit.count(5));
  EXPECT_EQ(error_of([&] {
              add_custom_label(ap, Location{13, 3}, make_var("q"));
            }),
            ErrorKind::ScopeError);
  EXPECT_EQ(error_of([&] {
              add_custom_label(ap, Location{99, 1}, make_var("S"));
            }),
            ErrorKind::BadLocation);
  // A variable declared later in the block is not yet in scope.
  EXPECT_EQ(error_of([&] {
              add_custom_label(ap, Location{2, 3}, make_var("Y"));
            }),
            ErrorKind::ScopeError);
}

//===----------------------------------------------------------------------===//
// Properties
//===----------------------------------------------------------------------===//

namespace {

/// Evaluates a label predicate built from `atoms`, treating each atom as an
/// opaque boolean.
bool eval_over_atoms(const ExprPtr &e, const std::vector<ExprPtr> &as,
                     unsigned bits) {
  for (std::size_t i = 0; i < as.size(); ++i)
    if (e == as[i])
      return (bits >> i) & 1;
  if (const auto *b = e->as<Binary>()) {
    bool l = eval_over_atoms(b->lhs, as, bits);
    bool r = eval_over_atoms(b->rhs, as, bits);
    return b->op == BinOp::And ? l && r : l || r;
  }
  const auto *u = e->as<Unary>();
  return !eval_over_atoms(u->operand, as, bits);
}

} // namespace

TEST(CriteriaProperty, CcImpliedByMcc) {
  Program p = parse(R"(int f(int a, int b, int c) {
  if (a < b) { a = 1; }
  if (!(a == 1) || b > c && !(c == 0)) { a = 2; }
  while (a < 3 && !(b == c) && (c > 0 || a == 0 || b < 1)) { a = a + 1; }
  return a;
})");
  AnnotatedProgram cc = annotate(p, CriterionTag::cc());
  AnnotatedProgram mcc = annotate(p, CriterionTag::mcc());
  std::size_t ci = 0, mi = 0;
  for_each_stmt(p, [&](const Stmt &s) {
    ExprPtr d = s.as<If>() ? s.as<If>()->cond
                : s.as<While>() ? s.as<While>()->cond
                                : nullptr;
    if (!d)
      return;
    auto as = atoms(d);
    unsigned k = static_cast<unsigned>(as.size());
    for (unsigned bits = 0; bits < (1u << k); ++bits) {
      int true_mcc = 0;
      for (unsigned m = 0; m < (1u << k); ++m)
        true_mcc +=
            eval_over_atoms(mcc.labels[mi + m].predicate, as, bits) ? 1 : 0;
      EXPECT_EQ(true_mcc, 1);
      for (unsigned i = 0; i < k; ++i)
        for (int pol = 0; pol < 2; ++pol) {
          const Label &c = cc.labels[ci + 2 * i + pol];
          if (!eval_over_atoms(c.predicate, as, bits))
            continue;
          bool any = false;
          for (unsigned m = 0; m < (1u << k); ++m) {
            bool fixes = (((m >> i) & 1) != 0) == (pol == 1);
            if (fixes && eval_over_atoms(mcc.labels[mi + m].predicate, as, bits))
              any = true;
          }
          EXPECT_TRUE(any);
        }
    }
    ci += 2 * k;
    mi += 1u << k;
  });
  EXPECT_EQ(ci, cc.labels.size());
  EXPECT_EQ(mi, mcc.labels.size());
}

TEST(CriteriaProperty, DecisionCoverageMatchesBranchEdges) {
  const char *programs[] = {
      "int f(int a) { int r = 0; if (a > 1) { r = 1; } "
      "if (a % 3 == 0) { r = r + 2; } else { r = r - 1; } return r; }",
      "int f(int a) { int i = 0; while (i < a) { if (i == 2) { i = i + 2; } "
      "i = i + 1; } return i; }",
      "int f(int a) { if (a < 2 && a != 0) { a = 5; } if (a > 4 || a < 1) "
      "{ a = 0; } if (a == 3) { a = 1; } return a; }",
  };
  for (const char *src : programs) {
    Program p = parse(src);
    AnnotatedProgram ap = annotate(p, CriterionTag::dc());
    std::vector<std::set<int>> labels;
    std::vector<std::set<std::pair<std::uint32_t, bool>>> edges;
    for (int a = 0; a < 8; ++a) {
      labels.push_back(covered_by(ap.program, {{"a", Int(a)}}));
      std::set<std::pair<std::uint32_t, bool>> e;
      for (const auto &d : interpret(p, {{"a", Int(a)}}).decisions)
        e.insert({d.loc.seq, d.taken});
      edges.push_back(e);
    }
    std::size_t all_edges = 2 * static_cast<std::size_t>(count_decisions(p));
    for (unsigned suite = 0; suite < 256; ++suite) {
      std::set<int> l;
      std::set<std::pair<std::uint32_t, bool>> e;
      for (int a = 0; a < 8; ++a)
        if ((suite >> a) & 1) {
          l.insert(labels[a].begin(), labels[a].end());
          e.insert(edges[a].begin(), edges[a].end());
        }
      EXPECT_EQ(l.size() == ap.labels.size(), e.size() == all_edges)
          << src << " suite " << suite;
    }
  }
}
