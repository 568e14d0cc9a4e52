#include "gomet/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gomet/errors.hpp"
#include "gomet/report.hpp"
#include "gomet/verifier.hpp"
#include "gomet/version.hpp"

namespace gomet {

namespace {

using nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& bytes) {
  if (path == "-") {
    std::cout << bytes;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_error, "cannot write '" + path + "'");
  out << bytes;
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    size_t used = 0;
    double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    fail(errc::parse_error, "invalid " + what + " '" + text + "'");
  }
}

MetricOperator parse_metric_source(const Decomposition& dec, const std::string& source) {
  if (source.empty()) fail(errc::config_error, "this subcommand needs --metric");
  if (source.rfind("normal:", 0) == 0) {
    return normal_metric(dec, parse_number(source.substr(7), "normal metric parameter"));
  }
  if (source.rfind("gmu:", 0) == 0) {
    return gmu_metric(dec, parse_number(source.substr(4), "g_mu parameter"));
  }

  std::string text = source;
  if (source.find_first_not_of(" \t\n") != std::string::npos &&
      source[source.find_first_not_of(" \t\n")] != '{') {
    text = slurp(source);
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(errc::parse_error, std::string("metric JSON: ") + e.what());
  }

  if (doc.is_object() && doc.contains("matrix")) {
    // raw operator: {"basis": [m labels...], "matrix": [row-major floats]}
    std::vector<std::string> expected = dec.m_labels();
    if (doc.contains("basis")) {
      auto given = doc.at("basis").get<std::vector<std::string>>();
      if (given != expected) {
        fail(errc::config_error, "declared basis ordering does not match the decomposition");
      }
    }
    auto flat = doc.at("matrix").get<std::vector<double>>();
    const int d = dec.m_dim();
    if (static_cast<int>(flat.size()) != d * d) {
      fail(errc::shape_error, "matrix has " + std::to_string(flat.size()) +
                                  " entries, expected " + std::to_string(d * d));
    }
    Eigen::MatrixXd m(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) m(r, c) = flat[static_cast<size_t>(r * d + c)];
    return metric_from_matrix(dec, std::move(m));
  }

  if (!doc.is_object()) fail(errc::parse_error, "metric JSON must be an object");
  EigMap eig;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!it.value().is_number()) {
      fail(errc::parse_error, "eigenvalue for '" + it.key() + "' must be a number");
    }
    eig[it.key()] = it.value().get<double>();
  }
  return diagonal_metric(dec, eig);
}

json validation_json(const ValidationReport& v) {
  return json{{"symmetric", v.symmetric},
              {"positive_definite", v.positive_definite},
              {"equivariant", v.equivariant},
              {"symmetry_residual", v.symmetry_residual},
              {"min_eigenvalue", v.min_eigenvalue},
              {"equivariance_residual", v.equivariance_residual},
              {"pass", v.pass()}};
}

json element_m_coeffs(const Decomposition& dec, const Element& x) {
  json coeffs = json::array();
  for (int k = 0; k < dec.algebra()->dim(); ++k) {
    if (dec.label_in_m(k)) coeffs.push_back(x.coeffs[k]);
  }
  return coeffs;
}

json classes_json(const EigenvalueClasses& classes) {
  json out = json::array();
  for (const auto& cls : classes.classes()) out.push_back(cls);
  return out;
}

json merge_log_json(const EigenvalueClasses& classes) {
  json log = json::array();
  for (const MergeEvent& event : classes.merges) {
    log.push_back({{"merged", event.merged},
                   {"rule", to_string(event.rule)},
                   {"witness", event.witness},
                   {"magnitude", event.magnitude}});
  }
  return log;
}

struct CommandOutcome {
  json results;
  int exit_code = 0;
};

CommandOutcome do_decompose(const Decomposition& dec) {
  auto catalog_json = [&](const std::vector<Submodule>& catalog, bool with_kind) {
    json out = json::array();
    for (const Submodule& s : catalog) {
      json basis = json::array();
      for (const Element& b : s.basis) basis.push_back(b.str());
      json entry{{"id", s.id}, {"dim", s.dim()}, {"basis", basis}};
      if (with_kind) entry["kind"] = to_string(s.kind);
      out.push_back(entry);
    }
    return out;
  };

  std::vector<std::string> h_labels;
  for (const Element& h : dec.h_basis()) h_labels.push_back(h.str());

  CommandOutcome outcome;
  outcome.results = json{{"coarse", catalog_json(dec.coarse_catalog(), false)},
                         {"fine", catalog_json(dec.fine_catalog(), true)},
                         {"h_basis", h_labels},
                         {"m_basis", dec.m_labels()},
                         {"normalizer_dim", static_cast<int>(normalizer(dec.spec()).size())}};
  return outcome;
}

CommandOutcome do_validate(const Decomposition& dec, const CommandConfig& config) {
  MetricOperator metric = parse_metric_source(dec, config.metric);
  ValidationReport report = validate_metric(dec, metric);
  return {validation_json(report), report.pass() ? 0 : 1};
}

CommandOutcome do_check_go(const Decomposition& dec, const CommandConfig& config) {
  MetricOperator metric = parse_metric_source(dec, config.metric);
  ValidationReport validation = validate_metric(dec, metric);

  CommandOutcome outcome;
  outcome.results["validation"] = validation_json(validation);
  if (!validation.pass()) {
    outcome.results["pass"] = false;
    outcome.results["verdict_kind"] = "invalid-metric";
    outcome.exit_code = 1;
    return outcome;
  }

  ProbeSet probes = ProbeSet::build(dec, {config.samples, config.seed});
  GoVerdict verdict = check_go(dec, metric, probes, config.tol);

  outcome.results["tol"] = verdict.tol;
  outcome.results["probes"] = json{{"deterministic", verdict.deterministic_count},
                                   {"random", verdict.random_count},
                                   {"seed", verdict.seed}};
  outcome.results["max_relative_residual"] = verdict.max_relative_residual;
  outcome.results["pass"] = verdict.pass;
  outcome.results["verdict_kind"] = verdict.pass ? "evidence" : "refutation";
  if (verdict.counterexample.has_value()) {
    outcome.results["counterexample"] = json{
        {"label", verdict.counterexample_label},
        {"labels", dec.m_labels()},
        {"coeffs", element_m_coeffs(dec, *verdict.counterexample)}};
  } else {
    outcome.results["counterexample"] = nullptr;
  }

  // For g_mu metrics the closed-form solver element is checked alongside the
  // least-squares route on every deterministic probe.
  if (config.metric.rfind("gmu:", 0) == 0) {
    double mu = parse_number(config.metric.substr(4), "g_mu parameter");
    json checks = json::array();
    for (const Probe& probe : probes.deterministic) {
      Element a = explicit_witness(dec, mu, probe.x);
      Eigen::VectorXd xm = dec.to_m(probe.x);
      Element ax = dec.from_m(metric.matrix * xm);
      double residual = bracket(a + probe.x, ax).norm() / std::max(xm.squaredNorm(), 1e-300);
      checks.push_back({{"label", probe.label}, {"residual", residual}});
    }
    outcome.results["witness_checks"] = checks;
  } else {
    outcome.results["witness_checks"] = json::array();
  }

  outcome.exit_code = verdict.pass ? 0 : 1;
  return outcome;
}

CommandOutcome do_derive_constraints(const Decomposition& dec) {
  EigenvalueClasses classes = derive_constraints(dec);
  CommandOutcome outcome;
  outcome.results = json{{"classes", classes_json(classes)},
                         {"class_count", classes.class_count()},
                         {"merge_log", merge_log_json(classes)}};
  return outcome;
}

CommandOutcome do_verify(const SpaceSpec& spec, const CommandConfig& config) {
  Theorem theorem = theorem_from_string(config.theorem);
  Decomposition dec = decompose(spec);
  TheoremGrid grid = TheoremGrid::default_for(dec, theorem);
  TheoremReport report =
      reproduce_theorem(spec, theorem, grid, {config.samples, config.seed}, config.tol);

  json cases = json::array();
  for (const TheoremCase& c : report.cases) {
    cases.push_back({{"metric", c.metric_label},
                     {"expected_pass", c.expected_pass},
                     {"predicted_pass", c.predicted_pass},
                     {"pass", c.pass},
                     {"max_relative_residual", c.max_relative_residual}});
  }
  CommandOutcome outcome;
  outcome.results = json{{"theorem", to_string(report.theorem)},
                         {"reproduced", report.reproduced},
                         {"consistent", report.consistent},
                         {"classes", classes_json(report.classes)},
                         {"cases", cases}};
  outcome.exit_code = (report.reproduced && report.consistent) ? 0 : 1;
  return outcome;
}

}  // namespace

int run_command(const std::vector<std::string>& argv) {
  CLI::App app{"geodesic-orbit metric laboratory for SO(n)/U(n) quotients"};
  app.name("go-metric-lab");
  app.require_subcommand(1);

  CommandConfig config;
  auto add_common = [&](CLI::App* cmd, bool with_metric, bool with_probes) {
    cmd->add_option("--spec", config.spec, "space description, e.g. SO(7)/SO(2)xSO(3)")
        ->required();
    if (with_metric) {
      cmd->add_option("--metric", config.metric,
                      "normal:<lam> | gmu:<mu> | inline eigenvalue JSON | file path")
          ->required();
    }
    if (with_probes) {
      cmd->add_option("--tol", config.tol, "relative residual tolerance");
      cmd->add_option("--samples", config.samples, "random probe count");
      cmd->add_option("--seed", config.seed, "random probe seed");
    }
    cmd->add_option("--output", config.output, "report path, or - for stdout");
    cmd->add_option("--format", config.format, "json | text")
        ->check(CLI::IsMember({"json", "text"}));
  };

  add_common(app.add_subcommand("decompose", "build the submodule catalogs"), false, false);
  add_common(app.add_subcommand("validate-metric", "check the metric operator contract"), true,
             false);
  add_common(app.add_subcommand("check-go", "decide the geodesic-orbit condition"), true, true);
  add_common(app.add_subcommand("derive-constraints", "derive forced eigenvalue classes"), false,
             false);
  CLI::App* verify = app.add_subcommand("verify", "reproduce a classification at desk scale");
  add_common(verify, false, true);
  verify->add_option("--theorem", config.theorem, "so-normal | u-gmu")->required();

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "go-metric-lab: " << e.what() << "\n";
    return 2;
  }
  config.subcommand = app.get_subcommands().front()->get_name();

  try {
    if (const char* env_seed = std::getenv("GO_METRIC_LAB_SEED")) {
      try {
        config.seed = std::stoull(env_seed);
      } catch (const std::exception&) {
        fail(errc::config_error, std::string("GO_METRIC_LAB_SEED='") + env_seed +
                                     "' is not an integer");
      }
    }
    if (config.tol <= 0) fail(errc::config_error, "--tol must be positive");
    if (config.samples < 0) fail(errc::config_error, "--samples must be >= 0");

    auto start = std::chrono::steady_clock::now();
    SpaceSpec spec = parse_spec(config.spec);
    Decomposition dec = decompose(spec);

    CommandOutcome outcome;
    if (config.subcommand == "decompose") {
      outcome = do_decompose(dec);
    } else if (config.subcommand == "validate-metric") {
      outcome = do_validate(dec, config);
    } else if (config.subcommand == "check-go") {
      outcome = do_check_go(dec, config);
    } else if (config.subcommand == "derive-constraints") {
      outcome = do_derive_constraints(dec);
    } else {
      outcome = do_verify(spec, config);
    }

    ReportDocument doc;
    doc.version = kVersion;
    doc.config = config;
    doc.decomposition = decomposition_summary(dec);
    doc.results = std::move(outcome.results);
    doc.elapsed_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    write_output(config.output, emit_report(doc, config.format));
    return outcome.exit_code;
  } catch (const Error& e) {
    std::cerr << "go-metric-lab: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "go-metric-lab: internal error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace gomet
