#include "stochgm/error.hpp"

namespace stochgm {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::io_error: return "IoError";
    case Errc::malformed_header: return "MalformedHeader";
    case Errc::count_mismatch: return "CountMismatch";
    case Errc::non_finite_sample: return "NonFiniteSample";
    case Errc::manifest_error: return "ManifestError";
    case Errc::no_solution: return "NoSolution";
    case Errc::unstable_discretization: return "UnstableDiscretization";
    case Errc::degenerate_realization: return "DegenerateRealization";
    case Errc::zero_spread: return "ZeroSpread";
    case Errc::too_few_records: return "TooFewRecords";
    case Errc::zero_variance_column: return "ZeroVarianceColumn";
    case Errc::degenerate_record: return "DegenerateRecord";
    case Errc::rank_deficient: return "RankDeficient";
    case Errc::out_of_support: return "OutOfSupport";
    case Errc::degenerate_sample: return "DegenerateSample";
    case Errc::excessive_rejection: return "ExcessiveRejection";
  }
  return "Unknown";
}

ErrorKind kind_of(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument:
      return ErrorKind::usage;
    case Errc::io_error:
    case Errc::malformed_header:
    case Errc::count_mismatch:
    case Errc::non_finite_sample:
    case Errc::manifest_error:
    case Errc::too_few_records:
    case Errc::degenerate_record:
    case Errc::out_of_support:
    case Errc::degenerate_sample:
    case Errc::zero_variance_column:
      return ErrorKind::data;
    default:
      return ErrorKind::numerical;
  }
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void rethrow_with_context(const Error& e, const std::string& context) {
  std::string what = e.what();
  // Strip the "Code: " prefix so it is not repeated.
  const std::string prefix = std::string(to_string(e.code())) + ": ";
  if (what.rfind(prefix, 0) == 0) what.erase(0, prefix.size());
  throw Error(e.code(), context + ": " + what);
}

}  // namespace stochgm
