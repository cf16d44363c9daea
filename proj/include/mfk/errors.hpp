#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mfk {

enum class ErrorCode {
  InvalidArgument,
  InvalidBox,
  DimensionMismatch,
  NegativeWeight,
  WeightSumOffByMoreThanTolerance,
  EmptySupport,
  AtomOutsideDomain,
  NonFiniteValue,
  SupportTooLarge,
  SupportTooLargeForBruteForce,
  DimensionNotOne,
  InvalidMetric,
  NegativeRadicand,
  EmptyCandidates,
  ModulusNotConcave,
  KernelSpecMismatch,
  NegativeSquaredNorm,
  SingularSystem,
  NonSymmetricInput,
  HeterogeneousConfigs,
  UnknownLimit,
  QuadratureNotConverged,
  NoAnalyticModulus,
  ConfigParse,
  ConfigInvalid,
  Io,
};

// Machine-parseable tag, e.g. "DIMENSION_MISMATCH".
std::string_view error_tag(ErrorCode code);

// Validation errors map to CLI exit code 1, numerical/runtime errors to 2.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }
  std::string_view tag() const { return error_tag(code_); }

 private:
  ErrorCode code_;
};

}  // namespace mfk
