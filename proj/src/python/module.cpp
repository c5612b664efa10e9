//===-- module.cpp - Python bindings --------------------------------------===//
//
// Part of labelcov, a label-driven test generation toolkit.
//
//===----------------------------------------------------------------------===//

#include "labelcov/bench.hpp"
#include "labelcov/coverage.hpp"
#include "labelcov/error.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace labelcov;

namespace {

py::object to_py(const Int &v) {
  return py::reinterpret_steal<py::object>(
      PyLong_FromString(v.str().c_str(), nullptr, 10));
}

Int from_py(const py::handle &h) {
  return Int(py::str(h).cast<std::string>());
}

py::dict to_py(const Model &m) {
  py::dict d;
  for (const auto &[k, v] : m)
    d[py::str(k)] = to_py(v);
  return d;
}

Inputs inputs_from(const py::dict &d) {
  Inputs in;
  for (const auto &[k, v] : d) {
    std::string name = py::str(k);
    if (py::isinstance<py::list>(v) || py::isinstance<py::tuple>(v)) {
      std::vector<Int> arr;
      for (const auto &e : v)
        arr.push_back(from_py(e));
      in[name] = arr;
    } else {
      in[name] = from_py(v);
    }
  }
  return in;
}

py::dict test_to_py(const TestCase &t) {
  py::dict d;
  d["id"] = t.id;
  d["inputs"] = to_py(t.assignment);
  d["kind"] = to_string(t.kind);
  d["label_id"] = t.label_id;
  return d;
}

ExploreConfig config(const std::string &strategy, bool covering_new,
                     unsigned time_budget_ms) {
  ExploreConfig cfg;
  cfg.strategy = parse_strategy(strategy);
  cfg.covering_new = covering_new;
  cfg.time_budget = std::chrono::milliseconds(time_budget_ms);
  return cfg;
}

py::list labels(const std::string &source, const std::string &criterion) {
  AnnotatedProgram ap = annotate(parse(source), parse_criterion(criterion));
  py::list out;
  for (const auto &l : ap.labels) {
    py::dict d;
    d["id"] = l.id;
    d["line"] = l.loc.line;
    d["column"] = l.loc.column;
    d["predicate"] = print(*l.predicate);
    d["note"] = l.note;
    out.append(d);
  }
  return out;
}

py::dict run(const std::string &source, const py::dict &inputs) {
  ExecResult r = interpret(parse(source), inputs_from(inputs));
  py::dict d;
  std::visit(
      [&](const auto &o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, outcome::Returned>) {
          d["outcome"] = "returned";
          d["value"] = o.value ? to_py(*o.value) : py::none();
        } else if constexpr (std::is_same_v<T, outcome::RuntimeError>) {
          d["outcome"] = "rte";
          d["kind"] = to_string(o.kind);
          d["location"] = o.loc.str();
        } else if constexpr (std::is_same_v<T, outcome::SilentExited>) {
          d["outcome"] = "silent_exit";
        } else if constexpr (std::is_same_v<T, outcome::AssertFailed>) {
          d["outcome"] = "assert";
          d["label_id"] = o.label_id;
        } else {
          d["outcome"] = "step_limit";
        }
      },
      r.outcome);
  d["steps"] = r.steps;
  return d;
}

py::dict explore_py(const std::string &source, const std::string &harness,
                    const std::string &strategy, bool covering_new,
                    unsigned time_budget_ms) {
  Program p = parse(source);
  ExplorationReport r = explore(p, Harness::parse(harness, p),
                                config(strategy, covering_new, time_budget_ms));
  py::list tests;
  for (const auto &t : r.tests)
    tests.append(test_to_py(t));
  py::dict d;
  d["tests"] = tests;
  d["paths_complete"] = r.paths_complete;
  d["paths_partial"] = r.paths_partial;
  d["forks"] = r.forks;
  d["timed_out"] = r.timed_out;
  return d;
}

py::dict cover(const std::string &source, const std::string &criterion,
               const std::string &harness, const std::string &mode,
               const std::string &strategy, std::size_t async_replay,
               unsigned time_budget_ms) {
  Program p = parse(source);
  AnnotatedProgram ap = annotate(p, parse_criterion(criterion));
  PipelineOptions opts;
  opts.async_delay = async_replay;
  PipelineResult r =
      run_pipeline(ap, Harness::parse(harness, p), parse_mode(mode),
                   config(strategy, true, time_budget_ms), opts);
  py::list kept;
  for (const auto &t : r.suite.kept)
    kept.append(test_to_py(t));
  py::dict d;
  d["covered"] = r.suite.covered;
  d["total"] = r.suite.total;
  d["per_label"] = r.suite.per_label;
  d["kept"] = kept;
  d["generated"] = r.suite.generated.size();
  d["report"] = report_tsv(r.suite);
  return d;
}

py::list bench(const std::vector<std::string> &programs,
               const std::vector<std::string> &criteria,
               const std::vector<std::string> &modes,
               const std::string &strategy) {
  std::vector<Benchmark> benches;
  if (programs.empty())
    benches = builtin_benchmarks();
  for (const auto &n : programs)
    benches.push_back(builtin_benchmark(n));
  std::vector<CriterionTag> cs;
  for (const auto &c : criteria)
    cs.push_back(parse_criterion(c));
  std::vector<Mode> ms;
  for (const auto &m : modes)
    ms.push_back(parse_mode(m));
  py::list out;
  for (const auto &r :
       run_matrix(benches, cs, ms, config(strategy, true, 10000))) {
    py::dict d;
    d["program"] = r.program;
    d["criterion"] = r.criterion;
    d["mode"] = r.mode;
    d["labels"] = r.labels;
    d["covered"] = r.covered;
    d["paths"] = r.paths;
    d["tests_gen"] = r.tests_gen;
    d["tests_kept"] = r.tests_kept;
    d["time_ms"] = r.time_ms;
    d["timed_out"] = r.timed_out;
    d["diagnostic"] = r.diagnostic ? py::cast(*r.diagnostic) : py::none();
    out.append(d);
  }
  return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "labelcov: label-driven test generation for MiniC";

  static PyObject *error_type = nullptr;
  py::object type = py::exception<Error>(m, "LabelcovError");
  error_type = type.release().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p)
        std::rethrow_exception(p);
    } catch (const Error &e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("kind") = to_string(e.kind());
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  m.def(
      "annotate",
      [](const std::string &source, const std::string &criterion) {
        return print_annotated(
            annotate(parse(source), parse_criterion(criterion)));
      },
      py::arg("source"), py::arg("criterion"));
  m.def("labels", &labels, py::arg("source"), py::arg("criterion"));
  m.def(
      "instrument",
      [](const std::string &source, const std::string &criterion,
         const std::string &mode) {
        return print(transform(annotate(parse(source),
                                        parse_criterion(criterion)),
                               parse_mode(mode)));
      },
      py::arg("source"), py::arg("criterion"), py::arg("mode") = "optim");
  m.def("run", &run, py::arg("source"), py::arg("inputs"));
  m.def("explore", &explore_py, py::arg("source"), py::arg("harness"),
        py::arg("strategy") = "dfs", py::arg("covering_new") = true,
        py::arg("time_budget_ms") = 10000);
  m.def("cover", &cover, py::arg("source"), py::arg("criterion"),
        py::arg("harness"), py::arg("mode") = "optim",
        py::arg("strategy") = "dfs", py::arg("async_replay") = 0,
        py::arg("time_budget_ms") = 10000);
  m.def("bench", &bench, py::arg("programs") = std::vector<std::string>{},
        py::arg("criteria") = std::vector<std::string>{"DC"},
        py::arg("modes") =
            std::vector<std::string>{"ignore", "naive", "tight", "optim"},
        py::arg("strategy") = "dfs");
  m.def("benchmark_names", [] {
    std::vector<std::string> out;
    for (const auto &s : builtin_sources())
      out.push_back(s.name);
    return out;
  });
  m.def(
      "benchmark_source",
      [](const std::string &name) {
        for (const auto &s : builtin_sources())
          if (s.name == name)
            return py::make_tuple(s.source, s.harness);
        throw Error(ErrorKind::UnknownEntry, "no builtin benchmark '" + name +
                                                 "'");
      },
      py::arg("name"));
}
