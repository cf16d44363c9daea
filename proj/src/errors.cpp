#include "mfk/errors.hpp"

namespace mfk {

std::string_view error_tag(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::InvalidBox: return "INVALID_BOX";
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::NegativeWeight: return "NEGATIVE_WEIGHT";
    case ErrorCode::WeightSumOffByMoreThanTolerance: return "WEIGHT_SUM_OFF";
    case ErrorCode::EmptySupport: return "EMPTY_SUPPORT";
    case ErrorCode::AtomOutsideDomain: return "ATOM_OUTSIDE_DOMAIN";
    case ErrorCode::NonFiniteValue: return "NON_FINITE";
    case ErrorCode::SupportTooLarge: return "SUPPORT_TOO_LARGE";
    case ErrorCode::SupportTooLargeForBruteForce: return "SUPPORT_TOO_LARGE_FOR_BRUTE_FORCE";
    case ErrorCode::DimensionNotOne: return "DIMENSION_NOT_ONE";
    case ErrorCode::InvalidMetric: return "INVALID_METRIC";
    case ErrorCode::NegativeRadicand: return "NEGATIVE_RADICAND";
    case ErrorCode::EmptyCandidates: return "EMPTY_CANDIDATES";
    case ErrorCode::ModulusNotConcave: return "MODULUS_NOT_CONCAVE";
    case ErrorCode::KernelSpecMismatch: return "KERNEL_SPEC_MISMATCH";
    case ErrorCode::NegativeSquaredNorm: return "NEGATIVE_SQUARED_NORM";
    case ErrorCode::SingularSystem: return "SINGULAR_SYSTEM";
    case ErrorCode::NonSymmetricInput: return "NON_SYMMETRIC_INPUT";
    case ErrorCode::HeterogeneousConfigs: return "HETEROGENEOUS_CONFIGS";
    case ErrorCode::UnknownLimit: return "UNKNOWN_LIMIT";
    case ErrorCode::QuadratureNotConverged: return "QUADRATURE_NOT_CONVERGED";
    case ErrorCode::NoAnalyticModulus: return "NO_ANALYTIC_MODULUS";
    case ErrorCode::ConfigParse: return "CONFIG_PARSE";
    case ErrorCode::ConfigInvalid: return "CONFIG_INVALID";
    case ErrorCode::Io: return "IO_ERROR";
  }
  return "UNKNOWN";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeRadicand:
    case ErrorCode::NegativeSquaredNorm:
    case ErrorCode::SingularSystem:
    case ErrorCode::QuadratureNotConverged:
    case ErrorCode::Io:
      return false;
    default:
      return true;
  }
}

}  // namespace mfk
