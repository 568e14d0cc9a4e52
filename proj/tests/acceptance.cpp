// Acceptance suite: one criterion per function, one [PASS]/[FAIL] line each,
// nonzero exit when anything fails. Run via ctest or directly.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "gomet/cli.hpp"
#include "gomet/verifier.hpp"
#include "testutil.hpp"

using namespace gomet;
using namespace testutil;

namespace {

struct Criterion {
  std::string name;
  std::function<bool(std::string&)> run;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Element random_m_element(const Decomposition& dec, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXd coords(dec.m_dim());
  for (int c = 0; c < coords.size(); ++c) coords[c] = gauss(rng);
  return dec.from_m(coords);
}

// 1. Exhaustive bracket fidelity for so(n), n <= 8, against the
//    index-pattern prediction and the raw matrix commutator; under 1 second.
bool c1_bracket_fidelity(std::string& detail) {
  auto start = std::chrono::steady_clock::now();
  long checked = 0;
  long mismatches = 0;
  for (int n = 2; n <= 8; ++n) {
    AlgebraPtr alg = build_algebra(Family::SO, n);
    for (int i = 0; i < alg->dim(); ++i) {
      for (int j = 0; j < alg->dim(); ++j) {
        const BasisLabel& li = alg->label(i);
        const BasisLabel& lj = alg->label(j);
        Element br = bracket(alg->basis_element(i), alg->basis_element(j));
        ++checked;
        if (!coeff_maps_match(predicted_ee(li.a, li.b, lj.a, lj.b), coeff_map_of(br))) ++mismatches;
        Eigen::MatrixXcd oracle = commutator(oracle_e(n, li.a, li.b), oracle_e(n, lj.a, lj.b));
        if ((br.matrix - oracle).cwiseAbs().maxCoeff() > 0.0) ++mismatches;
      }
    }
  }
  double elapsed = seconds_since(start);
  std::ostringstream os;
  os << checked << " brackets, " << mismatches << " mismatches, " << elapsed << " s";
  detail = os.str();
  return mismatches == 0 && elapsed < 1.0;
}

// 2. Catalog correctness over the whole grid: dimension sums, trivial-line
//    counts (ideal pair at n0 = 4), n-block dimension, pairwise
//    B-orthogonality; under 10 seconds.
bool c2_catalogs(std::string& detail) {
  auto start = std::chrono::steady_clock::now();
  int specs = 0;
  for (const std::string& text : full_grid()) {
    SpaceSpec spec = parse_spec(text);
    Decomposition dec = decompose(spec);
    const int n0 = spec.n0();
    ++specs;

    int fine_total = 0;
    for (const Submodule& s : dec.fine_catalog()) fine_total += s.dim();
    if (fine_total != dec.m_dim()) {
      detail = text + ": fine catalog dim " + std::to_string(fine_total) + " != m_dim";
      return false;
    }

    if (spec.family == Family::SO) {
      int lines = 0;
      for (const Submodule& s : dec.fine_catalog())
        if (s.kind == Submodule::Kind::trivial_line) ++lines;
      if (n0 == 4) {
        if (!(lines == 0 && dec.fine("n1(so4)").dim() == 3 && dec.fine("n2(so4)").dim() == 3)) {
          detail = text + ": so(4) ideal pair missing";
          return false;
        }
      } else if (lines != n0 * (n0 - 1) / 2) {
        detail = text + ": trivial-line count " + std::to_string(lines);
        return false;
      }
    } else if (n0 >= 1) {
      if (dec.coarse("n").dim() != n0 * n0) {
        detail = text + ": dim n != n0^2";
        return false;
      }
    }

    for (const Submodule& s1 : dec.fine_catalog()) {
      for (const Submodule& s2 : dec.fine_catalog()) {
        if (s1.id == s2.id) continue;
        if ((s1.onb.transpose() * s2.onb).cwiseAbs().maxCoeff() >= 1e-12) {
          detail = text + ": " + s1.id + " not B-orthogonal to " + s2.id;
          return false;
        }
      }
    }
  }
  double elapsed = seconds_since(start);
  detail = std::to_string(specs) + " specs, " + std::to_string(elapsed) + " s";
  return elapsed < 10.0;
}

// 3. The normalizer nullspace spans h (+) n on every grid spec.
bool c3_normalizer(std::string& detail) {
  for (const std::string& text : full_grid()) {
    SpaceSpec spec = parse_spec(text);
    Decomposition dec = decompose(spec);
    if (!spans_match(dec, normalizer(spec), dec.h_plus_n_basis())) {
      detail = text + ": normalizer span mismatch";
      return false;
    }
  }
  detail = std::to_string(full_grid().size()) + " specs";
  return true;
}

// 4. Normal metrics pass with residual < 1e-9 over 1000+ probes.
bool c4_sufficiency_so(std::string& detail) {
  std::ostringstream os;
  for (const std::string& text : {"SO(7)/SO(2)xSO(3)", "SO(9)/SO(2)xSO(3)"}) {
    Decomposition dec = decompose(parse_spec(text));
    ProbeSet probes = ProbeSet::build(dec, {1000, 0});
    GoVerdict verdict = check_go(dec, normal_metric(dec, 1.0), probes, 1e-9);
    os << text << ": " << probes.size() << " probes, max " << verdict.max_relative_residual
       << "; ";
    if (!verdict.pass || probes.size() < 1000) {
      detail = os.str();
      return false;
    }
  }
  detail = os.str();
  return true;
}

// 5. Every eigenvalue split (ratios 2 and 0.5) on SO(7)/SO(2)xSO(3) is
//    refuted with a counterexample above 1e-3.
bool c5_necessity_so(std::string& detail) {
  Decomposition dec = decompose(parse_spec("SO(7)/SO(2)xSO(3)"));
  ProbeSet probes = ProbeSet::build(dec, {200, 1});
  int refuted = 0;
  int total = 0;
  double weakest = 1.0;
  for (double ratio : {2.0, 0.5}) {
    for (const Submodule& bumped : dec.fine_catalog()) {
      EigMap eig;
      for (const Submodule& s : dec.fine_catalog()) eig[s.id] = s.id == bumped.id ? ratio : 1.0;
      GoVerdict verdict = check_go(dec, diagonal_metric(dec, eig), probes, 1e-9);
      ++total;
      if (!verdict.pass && verdict.max_relative_residual > 1e-3 &&
          verdict.counterexample.has_value()) {
        ++refuted;
        weakest = std::min(weakest, verdict.max_relative_residual);
      }
    }
  }
  std::ostringstream os;
  os << refuted << "/" << total << " split metrics refuted, weakest residual " << weakest;
  detail = os.str();
  return total >= 6 && refuted == total;
}

// 6. U classification: the g_mu ray passes, everything off it fails, and at
//    n0 = 0 only scalars pass.
bool c6_u_classification(std::string& detail) {
  std::ostringstream os;
  for (const std::string& text : {"U(4)/U(1)xU(2)", "U(5)/U(2)xU(2)"}) {
    Decomposition dec = decompose(parse_spec(text));
    ProbeSet probes = ProbeSet::build(dec, {300, 3});
    for (double mu : {0.25, 1.0, 4.0}) {
      GoVerdict verdict = check_go(dec, gmu_metric(dec, mu), probes, 1e-9);
      if (!verdict.pass) {
        detail = text + ": g_mu(" + std::to_string(mu) + ") failed, residual " +
                 std::to_string(verdict.max_relative_residual);
        return false;
      }
    }
    int off_ray = 0;
    for (double ratio : {2.0, 0.5}) {
      for (const Submodule& bumped : dec.fine_catalog()) {
        if (bumped.id == "z(n)") continue;
        EigMap eig;
        for (const Submodule& s : dec.fine_catalog()) eig[s.id] = s.id == bumped.id ? ratio : 1.0;
        GoVerdict verdict = check_go(dec, diagonal_metric(dec, eig), probes, 1e-9);
        if (verdict.pass || verdict.max_relative_residual <= 1e-3) {
          detail = text + ": off-ray metric bumping " + bumped.id + " not refuted";
          return false;
        }
        ++off_ray;
      }
    }
    os << text << ": 3 on-ray pass, " << off_ray << " off-ray fail; ";
  }

  // n0 = 0: only the scalar metrics pass
  Decomposition flag = decompose(parse_spec("U(3)/U(1)xU(1)xU(1)"));
  ProbeSet probes = ProbeSet::build(flag, {300, 3});
  for (double lam : {1.0, 2.0}) {
    if (!check_go(flag, normal_metric(flag, lam), probes, 1e-9).pass) {
      detail = "U(3) flag: scalar metric failed";
      return false;
    }
  }
  for (const Submodule& bumped : flag.fine_catalog()) {
    EigMap eig;
    for (const Submodule& s : flag.fine_catalog()) eig[s.id] = s.id == bumped.id ? 2.0 : 1.0;
    GoVerdict verdict = check_go(flag, diagonal_metric(flag, eig), probes, 1e-9);
    if (verdict.pass || verdict.max_relative_residual <= 1e-3) {
      detail = "U(3) flag: non-scalar metric not refuted";
      return false;
    }
  }
  os << "U(3) flag: scalars only";
  detail = os.str();
  return true;
}

// 7. The closed-form solver element satisfies the bracket identity to
//    1e-12 |X|^2 on 100 random probes for mu in {0.25, 4}.
bool c7_explicit_witness(std::string& detail) {
  Decomposition dec = decompose(parse_spec("U(4)/U(1)xU(2)"));
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (double mu : {0.25, 4.0}) {
    MetricOperator g = gmu_metric(dec, mu);
    for (int trial = 0; trial < 100; ++trial) {
      Element x = random_m_element(dec, rng);
      Element a = explicit_witness(dec, mu, x);
      Element ax = dec.from_m(g.matrix * dec.to_m(x));
      double x2 = dec.to_g(x).squaredNorm();
      double ratio = bracket(a + x, ax).norm() / x2;
      worst = std::max(worst, ratio);
      if (ratio >= 1e-12) {
        detail = "witness identity ratio " + std::to_string(ratio);
        return false;
      }
    }
  }
  std::ostringstream os;
  os << "200 probes, worst |[a+X, AX]| / |X|^2 = " << worst;
  detail = os.str();
  return true;
}

// 8. Derived eigenvalue classes match the two classifications.
bool c8_constraints(std::string& detail) {
  for (const std::string& text :
       {"SO(7)/SO(2)xSO(3)", "SO(6)/SO(2)xSO(2)", "SO(9)/SO(2)xSO(3)"}) {
    Decomposition dec = decompose(parse_spec(text));
    EigenvalueClasses classes = derive_constraints(dec);
    if (classes.class_count() != 1) {
      detail = text + ": " + std::to_string(classes.class_count()) + " classes";
      return false;
    }
  }
  {
    Decomposition dec = decompose(parse_spec("SO(6)/SO(2)xSO(2)"));
    if (!derive_constraints(dec).same_class("V1_{1,2}", "V2_{1,2}")) {
      detail = "V-splits not merged";
      return false;
    }
  }
  {
    Decomposition dec = decompose(parse_spec("SO(9)/SO(2)xSO(3)"));
    if (!derive_constraints(dec).same_class("n1(so4)", "n2(so4)")) {
      detail = "so(4) ideals not merged";
      return false;
    }
  }
  Decomposition u = decompose(parse_spec("U(4)/U(1)xU(2)"));
  EigenvalueClasses classes = derive_constraints(u);
  auto parts = classes.classes();
  if (classes.class_count() != 2 || parts[0] != std::vector<std::string>{"z(n)"}) {
    detail = "U(4)/U(1)xU(2) classes wrong";
    return false;
  }
  detail = "SO: single class x3 (V-splits, so(4) ideals merged); U: {z(n)} apart";
  return true;
}

// 9. The relative residual is invariant under X -> cX to 1e-10.
bool c9_scaling(std::string& detail) {
  Decomposition dec = decompose(parse_spec("SO(7)/SO(2)xSO(3)"));
  MetricOperator failing = diagonal_metric(
      dec, EigMap{{"m_{0,1}", 2.0}, {"m_{0,2}", 1.0}, {"m_{1,2}", 1.0}, {"n", 1.0}});
  MetricOperator passing = normal_metric(dec, 1.0);
  std::mt19937_64 rng(99);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Element x = random_m_element(dec, rng);
    for (const MetricOperator* a : {&failing, &passing}) {
      double base = geodesic_residual(dec, *a, x).relative_residual;
      for (double c : {0.1, 10.0}) {
        double drift = std::abs(geodesic_residual(dec, *a, c * x).relative_residual - base);
        worst = std::max(worst, drift);
        if (drift >= 1e-10) {
          detail = "drift " + std::to_string(drift) + " at c = " + std::to_string(c);
          return false;
        }
      }
    }
  }
  std::ostringstream os;
  os << "100 probes x {0.1, 10}, worst drift " << worst;
  detail = os.str();
  return true;
}

// 10. Same seed, same bytes: reports are reproducible.
bool c10_determinism(std::string& detail) {
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  std::string out = std::string(GOMET_BINARY_DIR) + "/acceptance_repro.json";

  std::vector<std::vector<std::string>> commands = {
      {"check-go", "--spec", "U(4)/U(1)xU(2)", "--metric", "gmu:2.0", "--samples", "200", "--seed",
       "7", "--output", out},
      {"derive-constraints", "--spec", "SO(6)/SO(2)xSO(2)", "--output", out},
      {"verify", "--spec", "U(4)/U(1)xU(2)", "--theorem", "u-gmu", "--samples", "60", "--seed",
       "3", "--output", out}};
  for (const auto& argv : commands) {
    if (run_command(argv) != 0) {
      detail = argv[0] + " exited nonzero";
      return false;
    }
    std::string first = slurp(out);
    if (run_command(argv) != 0 || slurp(out) != first) {
      detail = argv[0] + " not byte-identical";
      return false;
    }
  }
  detail = std::to_string(commands.size()) + " commands, byte-identical reruns";
  return true;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {"bracket fidelity so(n<=8) vs commutator oracle", c1_bracket_fidelity},
      {"catalog dimensions and B-orthogonality over the grid", c2_catalogs},
      {"normalizer spans h+n over the grid", c3_normalizer},
      {"SO sufficiency: normal metrics pass at 1e-9", c4_sufficiency_so},
      {"SO necessity: split metrics refuted above 1e-3", c5_necessity_so},
      {"U classification: g_mu ray exactly", c6_u_classification},
      {"explicit witness identity at 1e-12", c7_explicit_witness},
      {"derived constraints match the classifications", c8_constraints},
      {"residual scale invariance at 1e-10", c9_scaling},
      {"byte-identical reports for identical configs", c10_determinism},
  };

  int failures = 0;
  for (size_t k = 0; k < criteria.size(); ++k) {
    std::string detail;
    bool ok = false;
    try {
      ok = criteria[k].run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %zu: %s (%s)\n", ok ? "PASS" : "FAIL", k + 1,
                criteria[k].name.c_str(), detail.c_str());
    if (!ok) ++failures;
  }
  if (failures > 0) std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
