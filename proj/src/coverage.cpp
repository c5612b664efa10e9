//===-- coverage.cpp - Label coverage store and test replay ---------------===//
//
// Part of labelcov, a label-driven test generation toolkit.
//
//===----------------------------------------------------------------------===//

#include "labelcov/coverage.hpp"
#include "labelcov/error.hpp"

#include <deque>
#include <fstream>
#include <sstream>

namespace labelcov {

namespace fs = std::filesystem;

//===----------------------------------------------------------------------===//
// CoverageStore
//===----------------------------------------------------------------------===//

CoverageStore::CoverageStore(const std::vector<int> &ids) {
  for (int id : ids)
    statuses_[id] = false;
}

std::map<int, bool> CoverageStore::read_file(const fs::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::StoreError, "cannot read " + path.string());
  std::map<int, bool> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty())
      continue;
    std::istringstream ls(line);
    int id = 0, flag = -1;
    std::string rest;
    if (!(ls >> id >> flag) || (flag != 0 && flag != 1) || (ls >> rest))
      throw Error(ErrorKind::StoreError, path.string() + ":" +
                                             std::to_string(lineno) +
                                             ": expected '<id> <0|1>'");
    out[id] = flag == 1;
  }
  return out;
}

CoverageStore CoverageStore::open(const fs::path &path,
                                  const std::vector<int> &ids) {
  CoverageStore s(ids);
  s.path_ = path;
  if (fs::exists(path))
    for (const auto &[id, flag] : read_file(path))
      s.statuses_[id] = s.statuses_[id] || flag;
  s.persist(s.statuses_);
  return s;
}

bool CoverageStore::covered(int id) const {
  auto it = statuses_.find(id);
  return it != statuses_.end() && it->second;
}

std::set<int> CoverageStore::covered_ids() const {
  std::set<int> out;
  for (const auto &[id, c] : statuses_)
    if (c)
      out.insert(id);
  return out;
}

std::size_t CoverageStore::covered_count() const {
  return covered_ids().size();
}

double CoverageStore::ratio() const {
  return total() == 0 ? 1.0 : static_cast<double>(covered_count()) / total();
}

void CoverageStore::persist(const std::map<int, bool> &next) {
  if (!path_)
    return;
  fs::path tmp = *path_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error(ErrorKind::StoreError, "cannot write " + tmp.string());
    for (const auto &[id, c] : next)
      out << id << ' ' << (c ? 1 : 0) << '\n';
    out.flush();
    if (!out)
      throw Error(ErrorKind::StoreError, "cannot write " + tmp.string());
  }
  if (seam_)
    seam_();
  std::error_code ec;
  fs::rename(tmp, *path_, ec);
  if (ec)
    throw Error(ErrorKind::StoreError,
                "cannot replace " + path_->string() + ": " + ec.message());
}

void CoverageStore::commit(const std::set<int> &ids) {
  std::map<int, bool> next = statuses_;
  bool changed = false;
  for (int id : ids) {
    bool &flag = next[id];
    changed = changed || !flag;
    flag = true;
  }
  if (!changed)
    return;
  persist(next);
  statuses_ = std::move(next);
}

//===----------------------------------------------------------------------===//
// Replay
//===----------------------------------------------------------------------===//

Replayer::Replayer(const AnnotatedProgram &ap)
    : program_(transform(ap, Mode::Replayer)) {}

ReplayResult Replayer::run(const TestCase &t, CoverageStore &store) const {
  ReplayBuffer buffer;
  ReplayResult r;
  r.exec = interpret(program_, to_inputs(t.assignment, program_),
                     [&](int id, bool truth) {
                       if (truth)
                         buffer.staged.insert(id);
                     });
  r.normal = r.exec.returned();
  if (r.normal) {
    r.covered = buffer.staged;
    store.commit(buffer.staged);
  }
  return r;
}

ReplayResult replay(const AnnotatedProgram &ap, const TestCase &t,
                    CoverageStore &store) {
  return Replayer(ap).run(t, store);
}

std::vector<TestCase> dedup_nondet(const std::vector<TestCase> &tests) {
  std::set<Model> seen;
  std::vector<TestCase> out;
  for (const auto &t : tests) {
    Model key;
    for (const auto &[name, v] : t.assignment)
      if (name.rfind("nondet_", 0) != 0)
        key[name] = v;
    if (seen.insert(std::move(key)).second)
      out.push_back(t);
  }
  return out;
}

namespace {

std::vector<int> label_ids(const AnnotatedProgram &ap) {
  std::vector<int> ids;
  for (const auto &l : ap.labels)
    ids.push_back(l.id);
  return ids;
}

SuiteReport reduce(const Replayer &rp, const std::vector<TestCase> &tests,
                   CoverageStore &store) {
  SuiteReport s;
  s.generated = tests;
  for (const auto &t : tests) {
    std::size_t before = store.covered_count();
    ReplayResult r = rp.run(t, store);
    if (r.normal && store.covered_count() > before)
      s.kept.push_back(t);
    s.progress.push_back(store.covered_count());
  }
  s.per_label = store.statuses();
  s.covered = store.covered_count();
  s.total = store.total();
  return s;
}

/// Replays assertion tests into the store the explorer's CoveredGuards read.
class LiveReplay : public ExplorationHook {
public:
  LiveReplay(const Replayer &rp, CoverageStore &store, std::size_t delay)
      : rp_(rp), store_(store), delay_(delay) {}

  void on_test(const TestCase &t) override {
    if (t.kind != TestKind::AssertErr)
      return;
    if (delay_ == 0)
      rp_.run(t, store_);
    else
      pending_.push_back({t, delay_});
  }

  void on_fork() override {
    for (auto &p : pending_)
      --p.second;
    while (!pending_.empty() && pending_.front().second == 0) {
      rp_.run(pending_.front().first, store_);
      pending_.pop_front();
    }
  }

  bool covered(int id) override { return store_.covered(id); }

  void flush() {
    for (const auto &p : pending_)
      rp_.run(p.first, store_);
    pending_.clear();
  }

private:
  const Replayer &rp_;
  CoverageStore &store_;
  std::size_t delay_;
  std::deque<std::pair<TestCase, std::size_t>> pending_;
};

} // namespace

SuiteReport greedy_reduce(const AnnotatedProgram &ap,
                          const std::vector<TestCase> &tests,
                          CoverageStore &store) {
  for (int id : label_ids(ap))
    if (!store.statuses().count(id))
      throw Error(ErrorKind::StoreError,
                  "store has no entry for label " + std::to_string(id));
  return reduce(Replayer(ap), tests, store);
}

PipelineResult run_pipeline(const AnnotatedProgram &ap, const Harness &h,
                            Mode mode, ExploreConfig cfg,
                            const PipelineOptions &opts) {
  if (mode == Mode::Replayer)
    throw Error(ErrorKind::ModeMismatch,
                "the replayer form cannot be explored");
  if (mode == Mode::Tight || mode == Mode::Optim)
    cfg.covering_new = false;
  Program p = transform(ap, mode);
  Replayer rp(ap);
  std::vector<int> ids = label_ids(ap);

  PipelineResult out;
  out.labels = ids.size();
  if (mode == Mode::Optim) {
    CoverageStore live = opts.store_path
                             ? CoverageStore::open(*opts.store_path, ids)
                             : CoverageStore(ids);
    LiveReplay hook(rp, live, opts.async_delay);
    out.exploration = explore(p, h, cfg, &hook);
    hook.flush();
  } else {
    out.exploration = explore(p, h, cfg);
  }
  std::vector<TestCase> kept =
      dedup_nondet(classify_tests(out.exploration, mode));
  CoverageStore fresh(ids);
  out.suite = reduce(rp, kept, fresh);
  return out;
}

std::string report_tsv(const SuiteReport &s) {
  std::ostringstream os;
  os << "label_id\tstatus\n";
  for (const auto &[id, c] : s.per_label)
    os << id << '\t' << (c ? "covered" : "uncovered") << '\n';
  os << "#coverage " << s.covered << '/' << s.total << '\n';
  return os.str();
}

void write_suite(const fs::path &dir, const SuiteReport &s) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw Error(ErrorKind::IoError, "cannot create " + dir.string());
  std::ofstream out(dir / "report.tsv", std::ios::binary);
  if (!out)
    throw Error(ErrorKind::IoError, "cannot write report.tsv");
  out << report_tsv(s);
  for (const auto &t : s.kept)
    write_test(dir / ("kept_" + std::to_string(t.id) + ".kv"), t.assignment);
}

} // namespace labelcov
