#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gomet/metric.hpp"
#include "gomet/structure.hpp"

namespace gomet {

struct ProbeConfig {
  int random_count = 1000;
  std::uint64_t seed = 0;
};

struct Probe {
  Element x;
  std::string label;
};

/// Deterministic probes are a function of the decomposition alone: every
/// m-basis vector, plus every pairwise sum of catalog basis vectors drawn
/// from two distinct fine submodules (the directions the two-module
/// eigenvalue arguments exploit). Random probes are reproducible from the
/// seed via a portable Box-Muller generator.
struct ProbeSet {
  std::vector<Probe> deterministic;
  std::vector<Probe> random;
  std::uint64_t seed = 0;

  static ProbeSet build(const Decomposition& dec, const ProbeConfig& config);
  size_t size() const { return deterministic.size() + random.size(); }
};

/// Solution of min over a in h of |[a + X, AX]|_B.
struct GeodesicSolution {
  Element a_star;           // minimum-B-norm minimizer (pseudoinverse convention)
  double residual;          // B-norm at the minimizer
  double relative_residual; // residual / (|X|_B^2 * |A|_op)
};

/// The map a -> [a, AX] is linear, so this is one least-squares solve.
/// X must lie in m (h-component below 1e-10), else domain_error.
GeodesicSolution geodesic_residual(const Decomposition& dec, const MetricOperator& a,
                                   const Element& x, double op_norm_hint = -1.0);

struct ProbeResult {
  std::string label;
  double relative_residual = 0.0;
  Eigen::VectorXd a_coeffs;  // labeled-basis coefficients of the minimizer
};

/// Outcome of a probe sweep. A pass is sampling evidence for the universal
/// quantifier; a failure is a certificate, since the least-squares minimum
/// over a is global.
struct GoVerdict {
  double tol = 0.0;
  double max_relative_residual = 0.0;
  bool pass = false;
  std::vector<ProbeResult> per_probe;
  std::optional<Element> counterexample;
  std::string counterexample_label;
  int deterministic_count = 0;
  int random_count = 0;
  std::uint64_t seed = 0;
};

GoVerdict check_go(const Decomposition& dec, const MetricOperator& a, const ProbeSet& probes,
                   double tol);

/// The closed-form solver element for g_mu metrics on U(n) quotients:
/// a = r (1 - mu) * sum_{i > n0} f_ii, where r is the z(n)-coordinate of X.
/// Satisfies |[a + X, g_mu X]| < 1e-12 |X|^2 identically.
Element explicit_witness(const Decomposition& dec, double mu, const Element& x);

enum class Theorem { so_normal, u_gmu };

std::string to_string(Theorem theorem);
Theorem theorem_from_string(const std::string& name);

struct TheoremGrid {
  std::vector<double> normal_lams;  // scalar metrics, expected to pass
  std::vector<double> mus;          // g_mu metrics (U with n0 >= 1 only)
  std::vector<EigMap> diagonals;    // expected pass iff on the classified ray

  static TheoremGrid default_for(const Decomposition& dec, Theorem theorem);
};

struct TheoremCase {
  std::string metric_label;
  bool expected_pass = false;   // from the classification statement
  bool predicted_pass = false;  // from the derived eigenvalue classes
  bool pass = false;            // from the probe sweep
  double max_relative_residual = 0.0;
};

struct TheoremReport {
  Theorem theorem;
  std::vector<TheoremCase> cases;
  EigenvalueClasses classes;
  bool reproduced = false;  // expected == actual on every case
  bool consistent = false;  // predicted == actual on every case
};

/// Runs the grid of candidate metrics against check_go and cross-checks the
/// pass/fail pattern against both the classification statement and the
/// derived eigenvalue classes.
TheoremReport reproduce_theorem(const SpaceSpec& spec, Theorem theorem, const TheoremGrid& grid,
                                const ProbeConfig& probes, double tol);

}  // namespace gomet
