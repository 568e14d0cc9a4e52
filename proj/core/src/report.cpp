#include "gomet/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

#include "gomet/decomposition.hpp"
#include "gomet/errors.hpp"

namespace gomet {

namespace {

void dump_value(const nlohmann::json& v, std::string& out) {
  switch (v.type()) {
    case nlohmann::json::value_t::number_float: {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", v.get<double>());
      out += buf;
      break;
    }
    case nlohmann::json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += nlohmann::json(it.key()).dump();
        out += ':';
        dump_value(it.value(), out);
      }
      out += '}';
      break;
    }
    case nlohmann::json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += ',';
        first = false;
        dump_value(item, out);
      }
      out += ']';
      break;
    }
    default:
      out += v.dump();
  }
}

void render_text(const nlohmann::json& v, const std::string& indent, std::ostringstream& out) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (it.value().is_object() || it.value().is_array()) {
        out << indent << it.key() << ":\n";
        render_text(it.value(), indent + "  ", out);
      } else {
        std::string scalar;
        dump_value(it.value(), scalar);
        out << indent << it.key() << ": " << scalar << "\n";
      }
    }
  } else if (v.is_array()) {
    for (const auto& item : v) {
      if (item.is_object() || item.is_array()) {
        out << indent << "-\n";
        render_text(item, indent + "  ", out);
      } else {
        std::string scalar;
        dump_value(item, scalar);
        out << indent << "- " << scalar << "\n";
      }
    }
  } else {
    std::string scalar;
    dump_value(v, scalar);
    out << indent << scalar << "\n";
  }
}

}  // namespace

std::string canonical_dump(const nlohmann::json& doc) {
  std::string out;
  dump_value(doc, out);
  out += '\n';
  return out;
}

nlohmann::json config_echo(const CommandConfig& config) {
  nlohmann::json echo{{"subcommand", config.subcommand}, {"spec", config.spec},
                      {"tol", config.tol},               {"samples", config.samples},
                      {"seed", config.seed},             {"output", config.output},
                      {"format", config.format}};
  if (!config.metric.empty()) echo["metric"] = config.metric;
  if (!config.theorem.empty()) echo["theorem"] = config.theorem;
  return echo;
}

CommandConfig config_from_echo(const nlohmann::json& echo) {
  CommandConfig config;
  config.subcommand = echo.at("subcommand").get<std::string>();
  config.spec = echo.at("spec").get<std::string>();
  config.tol = echo.at("tol").get<double>();
  config.samples = echo.at("samples").get<int>();
  config.seed = echo.at("seed").get<std::uint64_t>();
  config.output = echo.at("output").get<std::string>();
  config.format = echo.at("format").get<std::string>();
  if (echo.contains("metric")) config.metric = echo.at("metric").get<std::string>();
  if (echo.contains("theorem")) config.theorem = echo.at("theorem").get<std::string>();
  return config;
}

nlohmann::json decomposition_summary(const Decomposition& dec) {
  nlohmann::json coarse = nlohmann::json::array();
  for (const Submodule& s : dec.coarse_catalog()) {
    coarse.push_back({{"id", s.id}, {"dim", s.dim()}});
  }
  nlohmann::json fine = nlohmann::json::array();
  for (const Submodule& s : dec.fine_catalog()) {
    fine.push_back({{"id", s.id}, {"dim", s.dim()}, {"kind", to_string(s.kind)}});
  }
  return nlohmann::json{{"spec", dec.spec().str()},
                        {"family", to_string(dec.spec().family)},
                        {"n", dec.spec().n},
                        {"parts", dec.spec().parts},
                        {"n0", dec.spec().n0()},
                        {"algebra_dim", dec.algebra()->dim()},
                        {"h_dim", dec.h_dim()},
                        {"m_dim", dec.m_dim()},
                        {"coarse", coarse},
                        {"fine", fine}};
}

std::string emit_report(const ReportDocument& doc, const std::string& format) {
  nlohmann::json payload{{"version", doc.version},
                         {"config", config_echo(doc.config)},
                         {"decomposition", doc.decomposition},
                         {"results", doc.results}};
  if (format == "json") return canonical_dump(payload);
  if (format != "text") fail(errc::config_error, "unknown format '" + format + "'");

  std::ostringstream out;
  out << "go-metric-lab " << doc.version << " " << doc.config.subcommand << " "
      << doc.config.spec << "\n";
  render_text(payload["results"], "", out);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", doc.elapsed_ms);
  out << "elapsed_ms: " << buf << "\n";
  return out.str();
}

}  // namespace gomet
