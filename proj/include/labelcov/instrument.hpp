//===-- instrument.hpp - Label instrumentation modes ------------*- C++ -*-===//
//
// Part of labelcov, a label-driven test generation toolkit.
//
//===----------------------------------------------------------------------===//

#ifndef LABELCOV_INSTRUMENT_HPP
#define LABELCOV_INSTRUMENT_HPP

#include "labelcov/criteria.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace labelcov {

enum class Mode { Ignore, Naive, Tight, Optim, Replayer };

const char *to_string(Mode m);
/// Accepts the lower-case names printed by to_string. Throws
/// UnsupportedCriterion on anything else.
Mode parse_mode(std::string_view name);

/// Name of the variable that holds the entry function's result once returns
/// are replaced by silent exits.
inline constexpr const char *kResultVar = "__result";

/// Rewrites every LabelStmt of `ap` according to `m`. Tight and Optim also
/// turn each return of the entry function into a silent exit.
Program transform(const AnnotatedProgram &ap, Mode m);

struct StaticPaths {
  std::uint64_t count = 0;
  bool saturated = false;
};

/// Counts acyclic statement-level paths through the entry function,
/// saturating at `max`. Loops are unrolled up to `unroll` iterations; without
/// a bound a loop raises UnboundedLoop.
StaticPaths count_static_paths(const Program &p, std::uint64_t max,
                               std::optional<unsigned> unroll = std::nullopt);

} // namespace labelcov

#endif // LABELCOV_INSTRUMENT_HPP
