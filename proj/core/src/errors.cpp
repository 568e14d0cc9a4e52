#include "gomet/errors.hpp"

namespace gomet {

std::string to_string(errc code) {
  switch (code) {
    case errc::invalid_dimension: return "invalid-dimension";
    case errc::algebra_mismatch: return "algebra-mismatch";
    case errc::not_in_algebra: return "not-in-algebra";
    case errc::parse_error: return "parse-error";
    case errc::constraint_violation: return "constraint-violation";
    case errc::invariance_violation: return "invariance-violation";
    case errc::coverage_error: return "coverage-error";
    case errc::positivity_error: return "positivity-error";
    case errc::unsupported_family: return "unsupported-family";
    case errc::domain_error: return "domain-error";
    case errc::shape_error: return "shape-error";
    case errc::config_error: return "config-error";
    case errc::precondition_error: return "precondition-error";
    case errc::io_error: return "io-error";
  }
  return "unknown";
}

Error::Error(errc code, const std::string& message)
    : std::runtime_error(to_string(code) + ": " + message), code_(code) {}

void fail(errc code, const std::string& message) { throw Error(code, message); }

}  // namespace gomet
