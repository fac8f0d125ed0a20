#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace povkit {

// Every failure the toolkit can report. The CLI maps each kind to its own
// exit code (see exit_code()), so append new kinds at the end only.
enum class ErrorKind {
  MissingColumn,
  BadNumeric,
  RangeViolation,
  DuplicateKey,
  InvalidCountryCode,
  ConflictingValue,
  UnknownIncomeLevel,
  UnknownField,
  EmptyVariable,
  NonpositiveLine,
  ZeroIncomeAmongPoor,
  ZeroMean,
  InvalidSample,
  InvalidLorenz,
  DegenerateColumn,
  ConvergenceFailure,
  InsufficientRows,
  RankDeficient,
  TooFewClusters,
  NoObservations,
  MissingModeratorValue,
  InvalidModelSpec,
  MissingCoefficient,
  NoBaseValue,
  MissingPopulation,
  InvalidScenario,
  LayoutMismatch,
  IoError,
  InvalidArgument,
};

inline constexpr std::array<std::string_view, 29> kErrorNames = {
    "MissingColumn",       "BadNumeric",         "RangeViolation",
    "DuplicateKey",        "InvalidCountryCode", "ConflictingValue",
    "UnknownIncomeLevel",  "UnknownField",       "EmptyVariable",
    "NonpositiveLine",     "ZeroIncomeAmongPoor", "ZeroMean",
    "InvalidSample",       "InvalidLorenz",      "DegenerateColumn",
    "ConvergenceFailure",  "InsufficientRows",   "RankDeficient",
    "TooFewClusters",      "NoObservations",     "MissingModeratorValue",
    "InvalidModelSpec",    "MissingCoefficient", "NoBaseValue",
    "MissingPopulation",   "InvalidScenario",    "LayoutMismatch",
    "IoError",             "InvalidArgument",
};

inline std::string_view error_name(ErrorKind kind) {
  return kErrorNames[static_cast<std::size_t>(kind)];
}

// 0 is success, 1 is reserved for command-line usage errors.
inline int exit_code(ErrorKind kind) { return 10 + static_cast<int>(kind); }

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace povkit
