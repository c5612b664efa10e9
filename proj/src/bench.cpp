//===-- bench.cpp - Benchmark programs and the experiment matrix ----------===//
//
// Part of labelcov, a label-driven test generation toolkit.
//
//===----------------------------------------------------------------------===//

#include "labelcov/bench.hpp"
#include "labelcov/error.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

namespace labelcov {

namespace fs = std::filesystem;

const std::vector<BenchmarkSource> &builtin_sources() {
  static const std::vector<BenchmarkSource> sources = {
      {"power",
       R"(int power(int X, int N) {
  int S = 1;
  int Y = X;
  int P = N;
  while (P >= 1) {
    if (P % 2 == 1) {
      P = P - 1;
      S = S * Y;
    }
    Y = Y * Y;
    P = P / 2;
  }
  return S;
}
)",
       R"(X -4 4
N 0 6
)",
       "motivating example, transcribed"},
      {"search",
       R"(int search(int tab[2], int n, int val) {
  int res = 0;
  int i = 0;
  while (!res && i < n) {
    if (tab[i] == val) {
      res = 1;
    }
    i = i + 1;
  }
  return res;
}
)",
       R"(n 0 2
tab 0 1
val 0 1
)",
       "motivating example, transcribed"},
      {"tritype",
       R"(int tritype(int i, int j, int k) {
  int type = 0;
  if (i <= 0 || j <= 0 || k <= 0) {
    type = 4;
  } else {
    if (i == j) {
      type = type + 1;
    }
    if (i == k) {
      type = type + 2;
    }
    if (j == k) {
      type = type + 3;
    }
    if (type == 0) {
      if (i + j <= k || j + k <= i || i + k <= j) {
        type = 4;
      } else {
        type = 1;
      }
    } else {
      if (type > 3) {
        type = 3;
      } else {
        if (type == 1 && i + j > k) {
          type = 2;
        } else {
          if (type == 2 && i + k > j) {
            type = 2;
          } else {
            if (type == 3 && j + k > i) {
              type = 2;
            } else {
              type = 4;
            }
          }
        }
      }
    }
  }
  return type;
}
)",
       R"(i 0 4
j 0 4
k 0 4
)",
       "standard triangle classifier"},
      {"selection_sort",
       R"(int selection_sort(int a[4]) {
  int i = 0;
  int j = 0;
  int m = 0;
  int t = 0;
  while (i < 3) {
    m = i;
    j = i + 1;
    while (j < 4) {
      if (a[j] < a[m]) {
        m = j;
      }
      j = j + 1;
    }
    if (m != i) {
      t = a[i];
      a[i] = a[m];
      a[m] = t;
    }
    i = i + 1;
  }
  return a[0];
}
)",
       R"(a 0 3
)",
       "standard selection sort"},
      {"fourballs",
       R"(int fourballs(int a, int b, int c, int d) {
  int r = 0;
  if (a + b > c + d) {
    if (a > b) {
      r = 1;
    } else {
      r = 2;
    }
  } else {
    if (a + b < c + d) {
      if (c > d) {
        r = 3;
      } else {
        r = 4;
      }
    }
  }
  return r;
}
)",
       R"(a 0 3
b 0 3
c 0 3
d 0 3
)",
       "standard odd-ball weighing"},
      {"modulus",
       R"(int modulus(int x, int y) {
  int q = x / (y + 1);
  int r = -1;
  if (y != 0) {
    r = x % y;
    if (r < 0) {
      r = r + abs(y);
    }
  }
  return r + q;
}
)",
       R"(x -2 12
y -1 4
)",
       "non-negative remainder with a reachable division by zero"},
      {"boundary",
       R"(int boundary(int x, int y) {
  int r = 0;
  if (x < 5) {
    r = 1;
  }
  if (y >= 3 && x != y) {
    r = r + 2;
  }
  if (x + y == 7) {
    r = r + 4;
  }
  return r;
}
)",
       R"(x 0 9
y 0 9
)",
       "boundary-rich fixture for LIMIT"},
  };
  return sources;
}

Benchmark build_benchmark(const BenchmarkSource &src) {
  Benchmark b;
  b.name = src.name;
  b.program = parse(src.source);
  b.harness = Harness::parse(src.harness, b.program);
  b.notes = src.notes;
  return b;
}

std::vector<Benchmark> builtin_benchmarks() {
  std::vector<Benchmark> out;
  for (const auto &s : builtin_sources())
    out.push_back(build_benchmark(s));
  return out;
}

Benchmark builtin_benchmark(const std::string &name) {
  for (const auto &s : builtin_sources())
    if (s.name == name)
      return build_benchmark(s);
  throw Error(ErrorKind::UnknownEntry, "no builtin benchmark '" + name + "'");
}

namespace {

std::string read_text(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::IoError, "cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Metrics run_cell(const Benchmark &b, const CriterionTag &c, Mode m,
                 const ExploreConfig &cfg) {
  Metrics row;
  row.program = b.name;
  row.criterion = c.str();
  row.mode = to_string(m);
  auto start = std::chrono::steady_clock::now();
  try {
    AnnotatedProgram ap = annotate(b.program, c);
    row.labels = ap.labels.size();
    PipelineResult r = run_pipeline(ap, b.harness, m, cfg);
    row.covered = r.suite.covered;
    row.stmts_executed = r.exploration.stmts_executed;
    row.paths = r.exploration.paths_complete + r.exploration.paths_partial;
    row.tests_gen = r.exploration.tests.size();
    row.tests_kept = r.suite.kept.size();
    row.timed_out = r.exploration.timed_out;
  } catch (const Error &e) {
    row.diagnostic = e.what();
  }
  row.time_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  return row;
}

} // namespace

std::vector<Benchmark> load_benchmarks(const fs::path &dir) {
  std::vector<fs::path> sources;
  for (const auto &e : fs::directory_iterator(dir))
    if (e.path().extension() == ".mc")
      sources.push_back(e.path());
  std::sort(sources.begin(), sources.end());
  std::vector<Benchmark> out;
  for (const auto &p : sources) {
    fs::path h = p;
    h.replace_extension(".harness");
    if (!fs::exists(h))
      continue;
    out.push_back(build_benchmark(
        {p.stem().string(), read_text(p), read_text(h), p.string()}));
  }
  return out;
}

std::vector<Metrics> run_matrix(const std::vector<Benchmark> &benchmarks,
                                const std::vector<CriterionTag> &criteria,
                                const std::vector<Mode> &modes,
                                const ExploreConfig &cfg, unsigned jobs) {
  if (benchmarks.empty() || criteria.empty() || modes.empty())
    throw Error(ErrorKind::InputMissing,
                "the matrix needs benchmarks, criteria and modes");
  struct Cell {
    const Benchmark *b;
    const CriterionTag *c;
    Mode m;
  };
  std::vector<Cell> cells;
  for (const auto &b : benchmarks)
    for (const auto &c : criteria)
      for (Mode m : modes)
        cells.push_back({&b, &c, m});

  std::vector<Metrics> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < cells.size();)
      rows[i] = run_cell(*cells[i].b, *cells[i].c, cells[i].m, cfg);
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, cells.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j)
      pool.emplace_back(worker);
    for (auto &t : pool)
      t.join();
  }
  return rows;
}

std::string render_table(const std::vector<Metrics> &rows, TableFormat fmt) {
  static const char *const kColumns[] = {
      "program", "criterion",  "mode",       "labels",  "covered",
      "paths",   "tests_gen",  "tests_kept", "time_ms", "timed_out"};
  std::vector<std::vector<std::string>> cells;
  for (const auto &r : rows) {
    bool failed = r.diagnostic.has_value();
    auto num = [&](std::size_t v) {
      return failed ? std::string("—") : std::to_string(v);
    };
    std::ostringstream t;
    t.setf(std::ios::fixed);
    t.precision(1);
    t << r.time_ms;
    cells.push_back({r.program, r.criterion, r.mode, num(r.labels),
                     num(r.covered), num(r.paths), num(r.tests_gen),
                     num(r.tests_kept), r.timed_out ? "TO" : t.str(),
                     failed ? "—" : (r.timed_out ? "1" : "0")});
  }

  std::ostringstream os;
  const char *sep = fmt == TableFormat::Tsv ? "\t" : " | ";
  auto line = [&](const auto &fields) {
    if (fmt == TableFormat::Markdown)
      os << "| ";
    bool first = true;
    for (const auto &f : fields) {
      if (!first)
        os << sep;
      os << f;
      first = false;
    }
    os << (fmt == TableFormat::Markdown ? " |\n" : "\n");
  };
  line(kColumns);
  if (fmt == TableFormat::Markdown) {
    os << '|';
    for (std::size_t i = 0; i < std::size(kColumns); ++i)
      os << (i < 3 ? "---|" : "--:|");
    os << '\n';
  }
  for (const auto &c : cells)
    line(c);
  return os.str();
}

} // namespace labelcov
