#include "gomet/verifier.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <random>

#include "gomet/errors.hpp"

namespace gomet {

namespace {

// Portable seeded gaussians: mt19937_64 bits through Box-Muller, so reports
// are byte-identical across standard library implementations.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

  double operator()() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  std::mt19937_64 rng_;
};

std::string paren(const std::string& term) {
  bool compound = term.find('+', 1) != std::string::npos || term.find('-', 1) != std::string::npos;
  return compound ? "(" + term + ")" : term;
}

}  // namespace

ProbeSet ProbeSet::build(const Decomposition& dec, const ProbeConfig& config) {
  ProbeSet set;
  set.seed = config.seed;

  for (const Element& u : dec.m_basis()) set.deterministic.push_back({u, u.str()});

  const auto& fine = dec.fine_catalog();
  for (size_t i = 0; i < fine.size(); ++i) {
    for (size_t j = i + 1; j < fine.size(); ++j) {
      for (const Element& u : fine[i].basis) {
        for (const Element& v : fine[j].basis) {
          set.deterministic.push_back({u + v, paren(u.str()) + "+" + paren(v.str())});
        }
      }
    }
  }

  GaussianSampler gauss(config.seed);
  if (dec.m_dim() > 0) {
    for (int k = 0; k < config.random_count; ++k) {
      Eigen::VectorXd coords(dec.m_dim());
      for (int c = 0; c < dec.m_dim(); ++c) coords[c] = gauss();
      set.random.push_back({dec.from_m(coords), "rng:" + std::to_string(k)});
    }
  }
  return set;
}

GeodesicSolution geodesic_residual(const Decomposition& dec, const MetricOperator& a,
                                   const Element& x, double op_norm_hint) {
  if (a.dec != &dec) fail(errc::precondition_error, "metric bound to a different decomposition");
  Eigen::VectorXd xm = dec.to_m(x);

  const int hd = dec.h_dim();
  double x_norm2 = xm.squaredNorm();
  if (x_norm2 == 0.0) {
    return {dec.from_h(Eigen::VectorXd::Zero(hd)), 0.0, 0.0};
  }

  Eigen::VectorXd axm = a.matrix * xm;
  Element ax = dec.from_m(axm);
  Element xax = bracket(x, ax);
  Eigen::VectorXd bm = dec.project_m(xax);
  double bh2 = dec.project_h(xax).squaredNorm();

  // Columns: [h_r, AX] in the m-frame over the orthonormal h basis.
  Eigen::MatrixXd sys(dec.m_dim(), hd);
  for (int r = 0; r < hd; ++r) sys.col(r) = dec.h_action(r) * axm;

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(hd);
  if (hd > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    alpha = svd.solve(-bm);
  }

  double residual = std::sqrt((sys * alpha + bm).squaredNorm() + bh2);
  double op = op_norm_hint >= 0.0 ? op_norm_hint : a.op_norm();
  double relative = residual / std::max(x_norm2 * op, 1e-300);
  return {dec.from_h(alpha), residual, relative};
}

GoVerdict check_go(const Decomposition& dec, const MetricOperator& a, const ProbeSet& probes,
                   double tol) {
  if (probes.size() == 0) fail(errc::config_error, "empty probe set");
  ValidationReport validation = validate_metric(dec, a);
  if (!validation.pass()) {
    fail(errc::precondition_error,
         "metric operator failed validation (symmetry " +
             std::to_string(validation.symmetry_residual) + ", min eigenvalue " +
             std::to_string(validation.min_eigenvalue) + ", equivariance " +
             std::to_string(validation.equivariance_residual) + ")");
  }

  GoVerdict verdict;
  verdict.tol = tol;
  verdict.deterministic_count = static_cast<int>(probes.deterministic.size());
  verdict.random_count = static_cast<int>(probes.random.size());
  verdict.seed = probes.seed;

  double op = a.op_norm();
  const Element* worst = nullptr;
  auto run = [&](const Probe& probe) {
    GeodesicSolution sol = geodesic_residual(dec, a, probe.x, op);
    verdict.per_probe.push_back({probe.label, sol.relative_residual, sol.a_star.coeffs});
    if (sol.relative_residual > verdict.max_relative_residual) {
      verdict.max_relative_residual = sol.relative_residual;
      worst = &probe.x;
      verdict.counterexample_label = probe.label;
    }
  };
  for (const Probe& p : probes.deterministic) run(p);
  for (const Probe& p : probes.random) run(p);

  verdict.pass = verdict.max_relative_residual < tol;
  if (!verdict.pass && worst != nullptr) {
    verdict.counterexample = *worst;
  } else {
    verdict.counterexample_label.clear();
  }
  return verdict;
}

Element explicit_witness(const Decomposition& dec, double mu, const Element& x) {
  const SpaceSpec& spec = dec.spec();
  if (spec.family != Family::U || spec.n0() < 1) {
    fail(errc::unsupported_family,
         "explicit witness exists only for U(n) quotients with n0 >= 1, spec is " + spec.str());
  }
  dec.to_m(x);  // domain check

  const Element& z = dec.fine("z(n)").basis[0];
  double r = inner(x, z) / inner(z, z);

  const Algebra& alg = *dec.algebra();
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(alg.dim());
  for (int i = spec.n0() + 1; i <= spec.n; ++i) {
    coeffs[alg.index_of({BasisLabel::Kind::f, i, i})] = r * (1.0 - mu);
  }
  return alg.from_coeffs(std::move(coeffs));
}

std::string to_string(Theorem theorem) {
  return theorem == Theorem::so_normal ? "so-normal" : "u-gmu";
}

Theorem theorem_from_string(const std::string& name) {
  if (name == "so-normal") return Theorem::so_normal;
  if (name == "u-gmu") return Theorem::u_gmu;
  fail(errc::config_error, "unknown theorem '" + name + "' (expected so-normal or u-gmu)");
}

TheoremGrid TheoremGrid::default_for(const Decomposition& dec, Theorem theorem) {
  TheoremGrid grid;
  const auto& fine = dec.fine_catalog();
  auto bump = [&](const std::string& id, double value) {
    EigMap eig;
    for (const Submodule& s : fine) eig[s.id] = s.id == id ? value : 1.0;
    return eig;
  };

  if (theorem == Theorem::so_normal) {
    grid.normal_lams = {1.0};
    for (const Submodule& s : fine) grid.diagonals.push_back(bump(s.id, 2.0));
    return grid;
  }

  if (dec.spec().n0() >= 1) {
    grid.mus = {0.25, 1.0, 4.0};
    std::string first_nonz;
    for (const Submodule& s : fine) {
      if (s.id == "z(n)") continue;
      if (first_nonz.empty()) first_nonz = s.id;
      grid.diagonals.push_back(bump(s.id, 2.0));
    }
    if (!first_nonz.empty()) {
      EigMap offray = bump(first_nonz, 2.0);
      offray["z(n)"] = 4.0;
      grid.diagonals.push_back(offray);
    }
  } else {
    grid.normal_lams = {1.0, 2.0};
    for (const Submodule& s : fine) grid.diagonals.push_back(bump(s.id, 2.0));
  }
  return grid;
}

namespace {

bool expected_from_theorem(Theorem theorem, const EigMap& fine_values) {
  bool first = true;
  double ref = 0.0;
  for (const auto& [id, value] : fine_values) {
    if (theorem == Theorem::u_gmu && id == "z(n)") continue;
    if (first) {
      ref = value;
      first = false;
    } else if (std::abs(value - ref) > 1e-12) {
      return false;
    }
  }
  return true;
}

bool predicted_from_classes(const EigenvalueClasses& classes, const EigMap& fine_values) {
  for (const auto& cls : classes.classes()) {
    double ref = fine_values.at(cls.front());
    for (const std::string& id : cls) {
      if (std::abs(fine_values.at(id) - ref) > 1e-12) return false;
    }
  }
  return true;
}

std::string eigmap_label(const EigMap& eig) {
  std::string out = "diag{";
  bool first = true;
  for (const auto& [id, value] : eig) {
    if (!first) out += ",";
    first = false;
    out += id + ":" + std::to_string(value);
  }
  return out + "}";
}

}  // namespace

TheoremReport reproduce_theorem(const SpaceSpec& spec, Theorem theorem, const TheoremGrid& grid,
                                const ProbeConfig& probes, double tol) {
  if ((theorem == Theorem::so_normal) != (spec.family == Family::SO)) {
    fail(errc::config_error, "theorem " + to_string(theorem) + " does not apply to " + spec.str());
  }

  Decomposition dec = decompose(spec);
  if (dec.m_dim() == 0) fail(errc::config_error, "trivial quotient " + spec.str() + " has m = 0");
  ProbeSet set = ProbeSet::build(dec, probes);

  TheoremReport report{theorem, {}, derive_constraints(dec), true, true};

  auto run_case = [&](const std::string& label, const MetricOperator& metric,
                      const EigMap& fine_values) {
    GoVerdict verdict = check_go(dec, metric, set, tol);
    TheoremCase c;
    c.metric_label = label;
    c.expected_pass = expected_from_theorem(theorem, fine_values);
    c.predicted_pass = predicted_from_classes(report.classes, fine_values);
    c.pass = verdict.pass;
    c.max_relative_residual = verdict.max_relative_residual;
    report.cases.push_back(c);
    report.reproduced = report.reproduced && (c.pass == c.expected_pass);
    report.consistent = report.consistent && (c.pass == c.predicted_pass);
  };

  auto uniform_values = [&](double v) {
    EigMap values;
    for (const Submodule& s : dec.fine_catalog()) values[s.id] = v;
    return values;
  };

  for (double lam : grid.normal_lams) {
    run_case("normal:" + std::to_string(lam), normal_metric(dec, lam), uniform_values(lam));
  }
  for (double mu : grid.mus) {
    EigMap values = uniform_values(1.0);
    values["z(n)"] = mu;
    run_case("gmu:" + std::to_string(mu), gmu_metric(dec, mu), values);
  }
  for (const EigMap& eig : grid.diagonals) {
    EigMap fine_values = expand_eigmap(dec, eig);
    run_case(eigmap_label(eig), diagonal_metric(dec, eig), fine_values);
  }
  return report;
}

}  // namespace gomet
