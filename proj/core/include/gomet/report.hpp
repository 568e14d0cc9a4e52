#pragma once

#include <nlohmann/json.hpp>
#include <string>

namespace gomet {

class Decomposition;

/// Serializes with sorted object keys (nlohmann's default object ordering)
/// and every floating-point number printed as %.17g, so identical documents
/// produce identical bytes.
std::string canonical_dump(const nlohmann::json& doc);

/// Parsed command line shared by the CLI and report echo.
struct CommandConfig {
  std::string subcommand;
  std::string spec;
  std::string metric;   // "normal:<lam>" | "gmu:<mu>" | inline JSON | file path
  std::string theorem;  // verify only
  double tol = 1e-9;
  int samples = 1000;
  std::uint64_t seed = 0;
  std::string output = "-";
  std::string format = "json";
};

nlohmann::json config_echo(const CommandConfig& config);
CommandConfig config_from_echo(const nlohmann::json& echo);

/// One emitted report: version, config echo, decomposition summary and the
/// per-subcommand results payload. Wall-clock timing appears only in the
/// text rendering; the JSON bytes stay reproducible.
struct ReportDocument {
  std::string version;
  CommandConfig config;
  nlohmann::json decomposition;
  nlohmann::json results;
  double elapsed_ms = 0.0;
};

nlohmann::json decomposition_summary(const Decomposition& dec);

/// format is "json" (canonical bytes) or "text" (human-readable summary).
std::string emit_report(const ReportDocument& doc, const std::string& format);

}  // namespace gomet
