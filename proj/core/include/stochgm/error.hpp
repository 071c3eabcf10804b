#pragma once

#include <stdexcept>
#include <string>

namespace stochgm {

enum class Errc {
  invalid_argument,
  io_error,
  malformed_header,
  count_mismatch,
  non_finite_sample,
  manifest_error,
  no_solution,
  unstable_discretization,
  degenerate_realization,
  zero_spread,
  too_few_records,
  zero_variance_column,
  degenerate_record,
  rank_deficient,
  out_of_support,
  degenerate_sample,
  excessive_rejection,
};

/// Coarse grouping used by the CLI to pick an exit code.
enum class ErrorKind { usage, data, numerical };

const char* to_string(Errc code) noexcept;
ErrorKind kind_of(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return kind_of(code_); }

 private:
  Errc code_;
};

/// Rethrows `e` with `context` prepended to its message, keeping the code.
[[noreturn]] void rethrow_with_context(const Error& e, const std::string& context);

}  // namespace stochgm
