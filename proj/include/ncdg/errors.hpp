#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ncdg {

enum class ErrorCode {
  invalid_argument,
  out_of_range,
  insufficient_quadrature,
  location_failure,
  interface_coverage,
  internal,
  diverged_state,
  invalid_state,
  vacuum,
  solver_failure,
  parse,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::out_of_range: return "out-of-range";
    case ErrorCode::insufficient_quadrature: return "insufficient-quadrature";
    case ErrorCode::location_failure: return "location-failure";
    case ErrorCode::interface_coverage: return "interface-coverage-error";
    case ErrorCode::internal: return "internal-error";
    case ErrorCode::diverged_state: return "diverged-state";
    case ErrorCode::invalid_state: return "invalid-state";
    case ErrorCode::vacuum: return "vacuum-error";
    case ErrorCode::solver_failure: return "solver-failure";
    case ErrorCode::parse: return "parse-error";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the harness in particular) can tell divergence from misuse.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// True for failures that indicate the numerical state blew up rather than a
/// configuration or programming error.
inline bool is_divergence(ErrorCode code) {
  return code == ErrorCode::diverged_state || code == ErrorCode::invalid_state ||
         code == ErrorCode::vacuum || code == ErrorCode::solver_failure;
}

}  // namespace ncdg
