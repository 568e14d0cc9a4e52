#pragma once

#include <stdexcept>
#include <string>

namespace gomet {

/// Machine-readable reason for a thrown gomet::Error. Mathematical negatives
/// (a metric failing the geodesic-orbit check) are never exceptions; they are
/// ordinary results. Every error here is a usage, input, or precondition
/// problem and maps to CLI exit code 2.
enum class errc {
  invalid_dimension,
  algebra_mismatch,
  not_in_algebra,
  parse_error,
  constraint_violation,
  invariance_violation,
  coverage_error,
  positivity_error,
  unsupported_family,
  domain_error,
  shape_error,
  config_error,
  precondition_error,
  io_error,
};

std::string to_string(errc code);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message);
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] void fail(errc code, const std::string& message);

}  // namespace gomet
