//===-- labelcov.cpp - Command-line front end -----------------------------===//
//
// Part of labelcov, a label-driven test generation toolkit.
//
//===----------------------------------------------------------------------===//

#include "labelcov/bench.hpp"
#include "labelcov/coverage.hpp"
#include "labelcov/error.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

using namespace labelcov;
namespace fs = std::filesystem;

namespace {

/// Raised for flag combinations that make no sense; exits 1 like a parse
/// error.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string program;
  std::string entry;
  std::vector<std::string> criteria;
  unsigned limit_n = 0;
  bool has_limit_n = false;
  std::string mode = "optim";
  std::string harness;
  std::vector<std::string> bounds;
  std::string out;
  bool force = false;
  std::string emit;
  unsigned time_budget_ms = 10000;
  std::size_t max_paths = 1'000'000;
  std::size_t max_steps = 200'000;
  std::string strategy = "dfs";
  std::optional<bool> covering_new;
  std::size_t async_replay = 0;
  std::string store;
  std::string tests;
  std::string bench_dir;
  std::vector<std::string> programs;
  std::vector<std::string> modes;
  std::string format = "tsv";
  unsigned jobs = 1;
};

std::string read_text(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::IoError, "cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const fs::path &p, const std::string &text) {
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << text))
    throw Error(ErrorKind::IoError, "cannot write " + p.string());
}

bool owned_output(const fs::path &p) {
  static const std::regex kOwned(
      R"((test|kept)_[0-9]+\.kv|test_[0-9]+\.(assert|rte)\.err|)"
      R"(report\.tsv|stats\.txt|labels\.tsv|matrix\.tsv|matrix\.md|)"
      R"(annotated\.mc|instrumented\.mc|harness\.txt)");
  return std::regex_match(p.filename().string(), kOwned);
}

/// Creates `dir`. A non-empty directory is only reused with `--force`, and
/// then only files labelcov writes are removed.
fs::path prepare_out(const std::string &dir, bool force) {
  fs::path p(dir);
  if (fs::exists(p)) {
    if (!fs::is_directory(p))
      throw UsageError(dir + " exists and is not a directory");
    if (!fs::is_empty(p)) {
      if (!force)
        throw UsageError(dir + " is not empty (use --force to overwrite)");
      for (const auto &e : fs::directory_iterator(p))
        if (e.is_regular_file() && owned_output(e.path()))
          fs::remove(e.path());
    }
  }
  fs::create_directories(p);
  return p;
}

CriterionTag criterion_of(const Options &o, const std::string &spec) {
  if (!o.has_limit_n)
    return parse_criterion(spec);
  std::string upper;
  for (char c : spec)
    upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "LIMIT")
    return CriterionTag::limit_n(o.limit_n);
  CriterionTag c = parse_criterion(spec);
  if (c.kind != CriterionTag::Kind::LIMIT || c.limit != o.limit_n)
    throw UsageError("--limit-n only applies to the LIMIT criterion");
  return c;
}

CriterionTag single_criterion(const Options &o) {
  if (o.criteria.size() != 1)
    throw UsageError("exactly one --criterion is required");
  return criterion_of(o, o.criteria.front());
}

Program load_program(const Options &o) {
  return parse(read_text(o.program), o.entry);
}

std::pair<std::string, Interval> parse_bound(const std::string &b) {
  static const std::regex kBound(
      R"(([A-Za-z_][A-Za-z0-9_]*(?:\[[0-9]+\])?)=(-?[0-9]+):(-?[0-9]+))");
  std::smatch m;
  if (!std::regex_match(b, m, kBound))
    throw UsageError("--bound expects NAME=LO:HI, got '" + b + "'");
  return {m[1], {Int(m[2].str()), Int(m[3].str())}};
}

Harness load_harness(const Options &o, const Program &p) {
  Harness h = Harness::load(o.harness, p);
  for (const auto &b : o.bounds) {
    auto [name, iv] = parse_bound(b);
    set_bound(h, name, iv);
  }
  return h;
}

ExploreConfig explore_config(const Options &o) {
  ExploreConfig cfg;
  cfg.strategy = parse_strategy(o.strategy);
  cfg.time_budget = std::chrono::milliseconds(o.time_budget_ms);
  cfg.max_paths = o.max_paths;
  cfg.max_steps_per_path = o.max_steps;
  if (o.covering_new)
    cfg.covering_new = *o.covering_new;
  return cfg;
}

std::optional<fs::path> store_path(const Options &o) {
  if (!o.store.empty())
    return fs::path(o.store);
  if (const char *env = std::getenv("LABELCOV_STORE"); env && *env)
    return fs::path(env);
  return std::nullopt;
}

std::string summary_line(const SuiteReport &s) {
  std::ostringstream os;
  os << "coverage " << s.covered << '/' << s.total << ", " << s.kept.size()
     << " of " << s.generated.size() << " tests kept";
  return os.str();
}

//===----------------------------------------------------------------------===//
// Subcommands
//===----------------------------------------------------------------------===//

int cmd_annotate(const Options &o) {
  AnnotatedProgram ap = annotate(load_program(o), single_criterion(o));
  std::string annotated = print_annotated(ap);
  if (o.out.empty()) {
    std::cout << annotated;
    return 0;
  }
  fs::path dir = prepare_out(o.out, o.force);
  write_text(dir / "annotated.mc", annotated);
  write_text(dir / "labels.tsv", label_table(ap));
  std::cout << ap.labels.size() << " labels written to " << dir.string()
            << '\n';
  return 0;
}

int cmd_instrument(const Options &o) {
  Mode mode = parse_mode(o.mode);
  AnnotatedProgram ap = annotate(load_program(o), single_criterion(o));
  std::string text = print(transform(ap, mode));
  if (!o.emit.empty())
    write_text(o.emit, text);
  if (o.out.empty()) {
    if (o.emit.empty())
      std::cout << text;
    return 0;
  }
  fs::path dir = prepare_out(o.out, o.force);
  write_text(dir / "instrumented.mc", text);
  write_text(dir / "labels.tsv", label_table(ap));
  std::cout << to_string(mode) << " form of " << ap.labels.size()
            << " labels written to " << dir.string() << '\n';
  return 0;
}

int cmd_explore(const Options &o) {
  Program p = load_program(o);
  Program target = p;
  std::optional<AnnotatedProgram> ap;
  Mode mode = parse_mode(o.mode);
  if (!o.criteria.empty()) {
    ap = annotate(p, single_criterion(o));
    if (mode == Mode::Replayer)
      throw UsageError("the replayer form cannot be explored");
    target = transform(*ap, mode);
  }
  Harness h = load_harness(o, p);
  ExploreConfig cfg = explore_config(o);
  if (ap && (mode == Mode::Tight || mode == Mode::Optim))
    cfg.covering_new = false;
  fs::path dir = prepare_out(o.out, o.force);
  ExplorationReport r = explore(target, h, cfg);
  write_tests(dir, r);
  if (ap)
    write_text(dir / "labels.tsv", label_table(*ap));
  std::cout << r.tests.size() << " tests, " << r.paths_complete
            << " complete and " << r.paths_partial << " partial paths"
            << (r.timed_out ? ", timed out" : "") << '\n';
  return 0;
}

int cmd_replay(const Options &o) {
  AnnotatedProgram ap = annotate(load_program(o), single_criterion(o));
  std::vector<int> ids;
  for (const auto &l : ap.labels)
    ids.push_back(l.id);
  auto path = store_path(o);
  CoverageStore store = path ? CoverageStore::open(*path, ids)
                             : CoverageStore(ids);
  SuiteReport s = greedy_reduce(ap, read_tests(o.tests), store);
  if (!o.out.empty())
    write_suite(prepare_out(o.out, o.force), s);
  std::cout << summary_line(s) << '\n';
  return 0;
}

int cmd_cover(const Options &o) {
  Program p = load_program(o);
  AnnotatedProgram ap = annotate(p, single_criterion(o));
  Mode mode = parse_mode(o.mode);
  if (mode == Mode::Replayer)
    throw UsageError("--mode replayer cannot drive test generation");
  Harness h = load_harness(o, p);
  ExploreConfig cfg = explore_config(o);
  PipelineOptions popts;
  popts.async_delay = o.async_replay;
  popts.store_path = store_path(o);
  fs::path dir = prepare_out(o.out, o.force);
  PipelineResult r = run_pipeline(ap, h, mode, cfg, popts);
  write_suite(dir, r.suite);
  write_text(dir / "labels.tsv", label_table(ap));
  write_text(dir / "stats.txt", stats_text(r.exploration));
  std::cout << summary_line(r.suite) << '\n';
  return 0;
}

int cmd_bench(const Options &o) {
  std::vector<Benchmark> benches = o.bench_dir.empty()
                                       ? builtin_benchmarks()
                                       : load_benchmarks(o.bench_dir);
  if (!o.programs.empty()) {
    std::vector<Benchmark> picked;
    for (const auto &name : o.programs) {
      auto it = std::find_if(benches.begin(), benches.end(),
                             [&](const Benchmark &b) { return b.name == name; });
      if (it == benches.end())
        throw Error(ErrorKind::UnknownEntry, "no benchmark '" + name + "'");
      picked.push_back(*it);
    }
    benches = std::move(picked);
  }
  for (const auto &b : o.bounds) {
    auto [name, iv] = parse_bound(b);
    std::string base = name.substr(0, name.find('['));
    bool used = false;
    for (auto &bench : benches)
      if (bench.harness.scalars.count(base) || bench.harness.arrays.count(base)) {
        set_bound(bench.harness, name, iv);
        used = true;
      }
    if (!used)
      throw UsageError("--bound " + b + " matches no benchmark input");
  }
  std::vector<CriterionTag> criteria;
  for (const auto &c : o.criteria.empty()
                           ? std::vector<std::string>{"DC", "CC", "MCC", "WM"}
                           : o.criteria)
    criteria.push_back(criterion_of(o, c));
  std::vector<Mode> modes;
  for (const auto &m : o.modes.empty()
                           ? std::vector<std::string>{"ignore", "naive",
                                                      "tight", "optim"}
                           : o.modes) {
    modes.push_back(parse_mode(m));
    if (modes.back() == Mode::Replayer)
      throw UsageError("--mode replayer cannot drive test generation");
  }
  TableFormat fmt =
      o.format == "markdown" ? TableFormat::Markdown : TableFormat::Tsv;
  std::optional<fs::path> dir;
  if (!o.out.empty())
    dir = prepare_out(o.out, o.force);
  auto rows = run_matrix(benches, criteria, modes, explore_config(o), o.jobs);
  std::string table = render_table(rows, fmt);
  if (dir) {
    write_text(*dir / "matrix.tsv", render_table(rows, TableFormat::Tsv));
    if (fmt == TableFormat::Markdown)
      write_text(*dir / "matrix.md", table);
  }
  std::cout << table;
  for (const auto &r : rows)
    if (r.diagnostic)
      std::cerr << "labelcov: " << r.program << ' ' << r.criterion << ' '
                << r.mode << ": " << *r.diagnostic << '\n';
  return 0;
}

void report(const Options &o, const Error &e) {
  std::cerr << "labelcov: ";
  if (!o.program.empty() && e.location())
    std::cerr << o.program << ':' << e.location()->str() << ": ";
  else if (e.location())
    std::cerr << e.location()->str() << ": ";
  std::cerr << to_string(e.kind()) << ": " << e.message() << '\n';
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Label-driven test generation for MiniC programs"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  Options o;

  auto program = [&](CLI::App *c) {
    c->add_option("--program,-p", o.program, "MiniC source file")
        ->required()
        ->check(CLI::ExistingFile);
    c->add_option("--entry", o.entry, "Entry function (default: last one)");
  };
  auto criterion = [&](CLI::App *c, bool required) {
    auto *opt = c->add_option("--criterion,-c", o.criteria,
                              "DC | CC | MCC | WM:ABS,AOR,ROR,COR | LIMIT:N");
    if (required)
      opt->required();
    c->add_option("--limit-n", o.limit_n, "Distance for --criterion LIMIT")
        ->each([&](const std::string &) { o.has_limit_n = true; });
  };
  auto mode = [&](CLI::App *c) {
    c->add_option("--mode,-m", o.mode, "ignore | naive | tight | optim")
        ->check(CLI::IsMember({"ignore", "naive", "tight", "optim", "replayer"}))
        ->capture_default_str();
  };
  auto harness = [&](CLI::App *c) {
    c->add_option("--harness", o.harness, "Input domains, lines 'name lo hi'")
        ->required()
        ->check(CLI::ExistingFile);
    c->add_option("--bound", o.bounds, "Override a domain: NAME=LO:HI");
  };
  auto budgets = [&](CLI::App *c) {
    c->add_option("--time-budget", o.time_budget_ms, "Milliseconds")
        ->capture_default_str();
    c->add_option("--max-paths", o.max_paths)->capture_default_str();
    c->add_option("--max-steps", o.max_steps, "Steps per path")
        ->capture_default_str();
    c->add_option("--strategy", o.strategy)
        ->check(CLI::IsMember({"dfs", "bfs"}))
        ->capture_default_str();
  };
  auto out = [&](CLI::App *c, bool required) {
    auto *opt = c->add_option("--out,-o", o.out, "Output directory");
    if (required)
      opt->required();
    c->add_flag("--force", o.force, "Reuse a non-empty output directory");
  };

  auto *annotate_cmd = app.add_subcommand("annotate", "Print labels");
  program(annotate_cmd);
  criterion(annotate_cmd, true);
  out(annotate_cmd, false);

  auto *instrument_cmd =
      app.add_subcommand("instrument", "Print the instrumented program");
  program(instrument_cmd);
  criterion(instrument_cmd, true);
  mode(instrument_cmd);
  instrument_cmd->add_option("--emit", o.emit, "Also write the program here");
  out(instrument_cmd, false);

  auto *explore_cmd = app.add_subcommand("explore", "Generate tests");
  program(explore_cmd);
  criterion(explore_cmd, false);
  mode(explore_cmd);
  harness(explore_cmd);
  budgets(explore_cmd);
  explore_cmd->add_flag("--covering-new,!--no-covering-new", o.covering_new,
                        "Keep only complete paths covering new branches");
  out(explore_cmd, true);

  auto *replay_cmd = app.add_subcommand("replay", "Measure label coverage");
  program(replay_cmd);
  criterion(replay_cmd, true);
  replay_cmd->add_option("--tests", o.tests, "Directory of test files")
      ->required()
      ->check(CLI::ExistingDirectory);
  replay_cmd->add_option("--store", o.store, "Coverage store file");
  out(replay_cmd, false);

  auto *cover_cmd = app.add_subcommand("cover", "Generate and reduce tests");
  program(cover_cmd);
  criterion(cover_cmd, true);
  mode(cover_cmd);
  harness(cover_cmd);
  budgets(cover_cmd);
  cover_cmd->add_option("--async-replay", o.async_replay,
                        "Replay assertion tests this many forks late");
  cover_cmd->add_option("--store", o.store, "Coverage store file");
  out(cover_cmd, true);

  auto *bench_cmd = app.add_subcommand("bench", "Run the experiment matrix");
  bench_cmd->add_option("--dir", o.bench_dir,
                        "Directory of .mc and .harness files")
      ->check(CLI::ExistingDirectory);
  bench_cmd->add_option("--program,-p", o.programs, "Benchmark names");
  criterion(bench_cmd, false);
  bench_cmd->add_option("--mode,-m", o.modes, "Modes (default: all four)")
      ->check(CLI::IsMember({"ignore", "naive", "tight", "optim"}));
  bench_cmd->add_option("--bound", o.bounds, "Override a domain: NAME=LO:HI");
  budgets(bench_cmd);
  bench_cmd->add_option("--format", o.format)
      ->check(CLI::IsMember({"tsv", "markdown"}))
      ->capture_default_str();
  bench_cmd->add_option("--jobs,-j", o.jobs)->capture_default_str();
  out(bench_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (o.async_replay > 0 && o.mode != "optim")
      throw UsageError("--async-replay needs --mode optim");
    if (explore_cmd->parsed() && o.covering_new.value_or(false) &&
        (o.mode == "tight" || o.mode == "optim") && !o.criteria.empty())
      throw UsageError("--covering-new does not apply to " + o.mode);
    if (annotate_cmd->parsed())
      return cmd_annotate(o);
    if (instrument_cmd->parsed())
      return cmd_instrument(o);
    if (explore_cmd->parsed())
      return cmd_explore(o);
    if (replay_cmd->parsed())
      return cmd_replay(o);
    if (cover_cmd->parsed())
      return cmd_cover(o);
    return cmd_bench(o);
  } catch (const UsageError &e) {
    std::cerr << "labelcov: " << e.what() << '\n';
    return 1;
  } catch (const Error &e) {
    report(o, e);
    return 2;
  } catch (const fs::filesystem_error &e) {
    std::cerr << "labelcov: IoError: " << e.what() << '\n';
    return 2;
  }
}
