#pragma once

#include <stdexcept>
#include <string>

namespace lftraj {

enum class ErrorCode {
  invalid_argument,
  out_of_range,
  degree_cap,
  insufficient_moments,
  marginal_violation,
  mass_violation,
  box_violation,
  missing_entries,
  basis_mismatch,
  singular_hankel,
  ill_conditioned,
  non_finite,
  parse_error,
  io_error,
};

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status without
/// string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lftraj
