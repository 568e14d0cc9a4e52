#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>
#include <random>

#include "gomet/errors.hpp"
#include "gomet/verifier.hpp"
#include "testutil.hpp"

using namespace gomet;
using namespace testutil;

namespace {

Element random_m_element(const Decomposition& dec, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXd coords(dec.m_dim());
  for (int c = 0; c < coords.size(); ++c) coords[c] = gauss(rng);
  return dec.from_m(coords);
}

// Independent least-squares route: assemble the system from raw matrix
// commutators over the labeled h-basis and solve with a QR factorization.
double oracle_relative_residual(const Decomposition& dec, const MetricOperator& a,
                                const Element& x) {
  Element ax = dec.from_m(a.matrix * dec.to_m(x));
  Eigen::MatrixXd sys(dec.algebra()->dim(), dec.h_dim());
  for (int r = 0; r < dec.h_dim(); ++r) {
    sys.col(r) = dec.to_g(bracket(dec.h_basis()[static_cast<size_t>(r)], ax));
  }
  Eigen::VectorXd rhs = -dec.to_g(bracket(x, ax));
  Eigen::VectorXd alpha = sys.colPivHouseholderQr().solve(rhs);
  double residual = (sys * alpha - rhs).norm();
  return residual / (dec.to_g(x).squaredNorm() * a.op_norm());
}

}  // namespace

TEST_SUITE("go_verifier") {
  TEST_CASE("identity metric has zero residual and zero minimizer") {
    Decomposition dec = decompose(parse_spec("SO(7)/SO(2)xSO(3)"));
    MetricOperator id = normal_metric(dec, 1.0);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
      GeodesicSolution sol = geodesic_residual(dec, id, random_m_element(dec, rng));
      CHECK(sol.residual == 0.0);
      CHECK(sol.relative_residual == 0.0);
      CHECK(sol.a_star.is_zero());
    }
  }

  TEST_CASE("g_mu on U(3)/U(2): least squares finds the closed-form solution") {
    Decomposition dec = decompose(parse_spec("U(3)/U(2)"));
    const double mu = 2.5;
    MetricOperator g = gmu_metric(dec, mu);
    const Algebra& alg = *dec.algebra();
    Element x = alg.basis_element(BasisLabel{BasisLabel::Kind::f, 1, 1}) +
                alg.basis_element(BasisLabel{BasisLabel::Kind::e, 1, 2});

    GeodesicSolution sol = geodesic_residual(dec, g, x);
    CHECK(sol.relative_residual < 1e-12);

    // the specific element (1 - mu)(f_22 + f_33) also annihilates the bracket
    Element a0 = (1.0 - mu) * (alg.basis_element(BasisLabel{BasisLabel::Kind::f, 2, 2}) +
                               alg.basis_element(BasisLabel{BasisLabel::Kind::f, 3, 3}));
    Element ax = dec.from_m(g.matrix * dec.to_m(x));
    CHECK(bracket(a0 + x, ax).norm() < 1e-12);
  }

  TEST_CASE("strand-splitting metric is refuted on SO(5)/SO(3)") {
    Decomposition dec = decompose(parse_spec("SO(5)/SO(3)"));
    MetricOperator a = diagonal_metric(dec, EigMap{{"n", 2.0}, {"m_{0,1}", 1.0}});
    const Algebra& alg = *dec.algebra();
    Element x = alg.basis_element(BasisLabel{BasisLabel::Kind::e, 1, 2}) +
                alg.basis_element(BasisLabel{BasisLabel::Kind::e, 1, 3});

    GeodesicSolution sol = geodesic_residual(dec, a, x);
    CHECK(sol.relative_residual > 1e-3);
    CHECK(std::abs(sol.relative_residual - oracle_relative_residual(dec, a, x)) < 1e-9);
  }

  TEST_CASE("least-squares solver agrees with the QR oracle") {
    Decomposition dec = decompose(parse_spec("SO(7)/SO(2)xSO(3)"));
    MetricOperator a = diagonal_metric(dec, EigMap{{"n", 0.5}, {"m_{0,1}", 2.0}, {"m_{0,2}", 1.0},
                                                   {"m_{1,2}", 1.0}});
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 25; ++trial) {
      Element x = random_m_element(dec, rng);
      GeodesicSolution sol = geodesic_residual(dec, a, x);
      CHECK(sol.relative_residual == doctest::Approx(oracle_relative_residual(dec, a, x)).epsilon(1e-6));
    }
  }

  TEST_CASE("geodesic_residual rejects vectors outside m") {
    Decomposition dec = decompose(parse_spec("SO(5)/SO(3)"));
    MetricOperator id = normal_metric(dec, 1.0);
    CHECK_THROWS_WITH_AS(geodesic_residual(dec, id, dec.h_basis()[0]),
                         doctest::Contains("h-component"), Error);
  }

  TEST_CASE("check_go passes normal metrics and refutes split metrics") {
    Decomposition dec = decompose(parse_spec("SO(7)/SO(2)xSO(3)"));
    ProbeSet probes = ProbeSet::build(dec, {250, 42});

    GoVerdict good = check_go(dec, normal_metric(dec, 1.0), probes, 1e-9);
    CHECK(good.pass);
    CHECK(good.max_relative_residual < 1e-9);
    CHECK_FALSE(good.counterexample.has_value());
    CHECK(good.per_probe.size() == probes.size());

    MetricOperator bad = diagonal_metric(
        dec, EigMap{{"m_{0,1}", 1.0}, {"m_{0,2}", 2.0}, {"m_{1,2}", 1.0}, {"n", 1.0}});
    GoVerdict refuted = check_go(dec, bad, probes, 1e-9);
    CHECK_FALSE(refuted.pass);
    CHECK(refuted.max_relative_residual > 1e-3);
    REQUIRE(refuted.counterexample.has_value());
    // the worst probe is one of the cross-module sums
    CHECK(refuted.counterexample_label.find('+') != std::string::npos);
    // and the counterexample suffers the reported residual when re-checked
    GeodesicSolution recheck = geodesic_residual(dec, bad, *refuted.counterexample);
    CHECK(recheck.relative_residual == doctest::Approx(refuted.max_relative_residual));
  }

  TEST_CASE("check_go validates inputs") {
    Decomposition dec = decompose(parse_spec("SO(5)/SO(3)"));
    MetricOperator id = normal_metric(dec, 1.0);
    CHECK_THROWS_WITH_AS(check_go(dec, id, ProbeSet{}, 1e-9), doctest::Contains("empty"), Error);

    Eigen::MatrixXd coupled = Eigen::MatrixXd::Identity(dec.m_dim(), dec.m_dim());
    Eigen::VectorXd u = dec.fine("triv_{1,2}").onb.col(0);
    Eigen::VectorXd v = dec.fine("m^{1}_{1}").onb.col(0);
    coupled += 0.3 * (u * v.transpose() + v * u.transpose());
    ProbeSet probes = ProbeSet::build(dec, {5, 0});
    CHECK_THROWS_WITH_AS(check_go(dec, metric_from_matrix(dec, coupled), probes, 1e-9),
                         doctest::Contains("validation"), Error);
  }

  TEST_CASE("probe sets are deterministic functions of seed and catalog") {
    Decomposition dec = decompose(parse_spec("U(4)/U(1)xU(2)"));
    ProbeSet a = ProbeSet::build(dec, {50, 9});
    ProbeSet b = ProbeSet::build(dec, {50, 9});
    REQUIRE(a.size() == b.size());
    for (size_t k = 0; k < a.random.size(); ++k) {
      CHECK((a.random[k].x.coeffs - b.random[k].x.coeffs).lpNorm<Eigen::Infinity>() == 0.0);
    }
    ProbeSet c = ProbeSet::build(dec, {50, 10});
    CHECK((a.random[0].x.coeffs - c.random[0].x.coeffs).lpNorm<Eigen::Infinity>() > 0.0);

    // deterministic probes: one per m-basis label plus all cross-module pairs
    size_t pair_count = 0;
    const auto& fine = dec.fine_catalog();
    for (size_t i = 0; i < fine.size(); ++i)
      for (size_t j = i + 1; j < fine.size(); ++j)
        pair_count += fine[i].basis.size() * fine[j].basis.size();
    CHECK(a.deterministic.size() == static_cast<size_t>(dec.m_dim()) + pair_count);
  }

  TEST_CASE("explicit witness: closed form and edge cases") {
    Decomposition dec = decompose(parse_spec("U(3)/U(2)"));
    const Algebra& alg = *dec.algebra();
    Element x = alg.basis_element(BasisLabel{BasisLabel::Kind::f, 1, 1}) +
                alg.basis_element(BasisLabel{BasisLabel::Kind::e, 1, 2});

    CHECK(explicit_witness(dec, 1.0, x).is_zero(1e-14));

    Element a = explicit_witness(dec, 3.0, x);
    Element expected = -2.0 * (alg.basis_element(BasisLabel{BasisLabel::Kind::f, 2, 2}) +
                               alg.basis_element(BasisLabel{BasisLabel::Kind::f, 3, 3}));
    CHECK(element_near(a, expected));

    // the center-bracket identity behind the cancellation
    Element xz = alg.basis_element(BasisLabel{BasisLabel::Kind::f, 1, 1});
    Element x1 = alg.basis_element(BasisLabel{BasisLabel::Kind::e, 1, 2});
    CHECK(element_near(bracket(xz, x1),
                       2.0 * alg.basis_element(BasisLabel{BasisLabel::Kind::f, 1, 2})));

    MetricOperator g3 = gmu_metric(dec, 3.0);
    Element ax = dec.from_m(g3.matrix * dec.to_m(x));
    CHECK(bracket(a + x, ax).norm() < 1e-12 * dec.to_g(x).squaredNorm());

    CHECK_THROWS_AS(explicit_witness(decompose(parse_spec("SO(5)/SO(3)")), 2.0, x), Error);
  }

  TEST_CASE("explicit witness vanishes on the h-block cross modules") {
    Decomposition dec = decompose(parse_spec("U(5)/U(2)xU(2)"));
    Element x = dec.coarse("m_{1,2}").basis[0] + dec.coarse("m_{1,2}").basis[3];
    Element a = explicit_witness(dec, 4.0, x);
    CHECK(a.is_zero(1e-14));
    MetricOperator g = gmu_metric(dec, 4.0);
    Element ax = dec.from_m(g.matrix * dec.to_m(x));
    CHECK(bracket(a + x, ax).norm() < 1e-12);
  }

  TEST_CASE("witness residual over random probes at desk scale") {
    Decomposition dec = decompose(parse_spec("U(4)/U(1)xU(2)"));
    std::mt19937_64 rng(23);
    for (double mu : {0.25, 4.0}) {
      MetricOperator g = gmu_metric(dec, mu);
      for (int trial = 0; trial < 50; ++trial) {
        Element x = random_m_element(dec, rng);
        Element a = explicit_witness(dec, mu, x);
        Element ax = dec.from_m(g.matrix * dec.to_m(x));
        double x2 = dec.to_g(x).squaredNorm();
        CHECK(bracket(a + x, ax).norm() < 1e-12 * x2);
        // the least-squares minimum can only improve on the closed form
        GeodesicSolution sol = geodesic_residual(dec, g, x);
        CHECK(sol.residual <= bracket(a + x, ax).norm() + 1e-13 * x2);
        CHECK(sol.relative_residual < 1e-12);
      }
    }
  }

  TEST_CASE("relative residual is invariant under probe rescaling") {
    Decomposition dec = decompose(parse_spec("SO(7)/SO(2)xSO(3)"));
    MetricOperator failing = diagonal_metric(
        dec, EigMap{{"m_{0,1}", 2.0}, {"m_{0,2}", 1.0}, {"m_{1,2}", 1.0}, {"n", 1.0}});
    MetricOperator passing = normal_metric(dec, 1.5);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
      Element x = random_m_element(dec, rng);
      for (const MetricOperator* a : {&failing, &passing}) {
        double base = geodesic_residual(dec, *a, x).relative_residual;
        for (double c : {0.1, 10.0, scale(rng)}) {
          double scaled = geodesic_residual(dec, *a, c * x).relative_residual;
          CHECK(std::abs(scaled - base) < 1e-10);
        }
      }
    }
  }

  TEST_CASE("residual is invariant under the isotropy rotation of the probe") {
    Decomposition dec = decompose(parse_spec("SO(7)/SO(2)xSO(3)"));
    MetricOperator a = diagonal_metric(
        dec, EigMap{{"m_{0,1}", 2.0}, {"m_{0,2}", 1.0}, {"m_{1,2}", 1.0}, {"n", 1.0}});
    std::mt19937_64 rng(37);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 10; ++trial) {
      Element x = random_m_element(dec, rng);

      Eigen::VectorXd hc(dec.h_dim());
      for (int k = 0; k < hc.size(); ++k) hc[k] = 0.5 * gauss(rng);
      Element h = dec.from_h(hc);
      Eigen::MatrixXcd rot = h.matrix.exp();
      Element x_rot = express(dec.algebra(), rot * x.matrix * rot.adjoint());

      double before = geodesic_residual(dec, a, x).relative_residual;
      double after = geodesic_residual(dec, a, x_rot).relative_residual;
      CHECK(std::abs(before - after) < 1e-9);
    }
  }

  TEST_CASE("normal metrics pass on every constructible quotient") {
    for (const std::string& text : full_grid()) {
      CAPTURE(text);
      Decomposition dec = decompose(parse_spec(text));
      if (dec.m_dim() == 0) continue;
      ProbeSet probes = ProbeSet::build(dec, {50, 1});
      GoVerdict verdict = check_go(dec, normal_metric(dec, 2.0), probes, 1e-9);
      CHECK(verdict.pass);
    }
  }

  TEST_CASE("derived merges are sound against the checker") {
    // a diagonal metric separating any two merged submodules must fail
    for (const std::string& text : {"SO(7)/SO(2)xSO(3)", "SO(6)/SO(2)xSO(2)", "U(4)/U(2)"}) {
      CAPTURE(text);
      Decomposition dec = decompose(parse_spec(text));
      EigenvalueClasses classes = derive_constraints(dec);
      ProbeSet probes = ProbeSet::build(dec, {100, 2});
      for (const Submodule& s : dec.fine_catalog()) {
        EigMap eig;
        for (const Submodule& t : dec.fine_catalog()) eig[t.id] = t.id == s.id ? 2.0 : 1.0;
        bool splits_a_class = false;
        for (const Submodule& t : dec.fine_catalog()) {
          if (t.id != s.id && classes.same_class(s.id, t.id)) splits_a_class = true;
        }
        GoVerdict verdict = check_go(dec, diagonal_metric(dec, eig), probes, 1e-9);
        if (splits_a_class) {
          CHECK_FALSE(verdict.pass);
          CHECK(verdict.max_relative_residual > 1e-3);
        } else {
          CHECK(verdict.pass);
        }
      }
    }
  }

  TEST_CASE("reproduce_theorem on the flagship quotients") {
    ProbeConfig probes{200, 11};

    TheoremReport so = reproduce_theorem(parse_spec("SO(7)/SO(2)xSO(3)"), Theorem::so_normal,
                                         TheoremGrid::default_for(
                                             decompose(parse_spec("SO(7)/SO(2)xSO(3)")),
                                             Theorem::so_normal),
                                         probes, 1e-9);
    CHECK(so.reproduced);
    CHECK(so.consistent);
    CHECK(so.cases.size() == 7);
    int passes = 0;
    for (const TheoremCase& c : so.cases) passes += c.pass ? 1 : 0;
    CHECK(passes == 1);

    Decomposition u = decompose(parse_spec("U(4)/U(1)xU(2)"));
    TheoremReport ur = reproduce_theorem(parse_spec("U(4)/U(1)xU(2)"), Theorem::u_gmu,
                                         TheoremGrid::default_for(u, Theorem::u_gmu), probes, 1e-9);
    CHECK(ur.reproduced);
    CHECK(ur.consistent);
    CHECK(ur.cases.size() == 7);  // three on-ray, four off-ray
    passes = 0;
    for (const TheoremCase& c : ur.cases) passes += c.pass ? 1 : 0;
    CHECK(passes == 3);

    // n0 = 0: only scalar metrics survive
    Decomposition flag = decompose(parse_spec("U(3)/U(1)xU(1)xU(1)"));
    TheoremReport fr = reproduce_theorem(parse_spec("U(3)/U(1)xU(1)xU(1)"), Theorem::u_gmu,
                                         TheoremGrid::default_for(flag, Theorem::u_gmu), probes,
                                         1e-9);
    CHECK(fr.reproduced);
    CHECK(fr.consistent);
    for (const TheoremCase& c : fr.cases) {
      CHECK(c.pass == (c.metric_label.rfind("normal:", 0) == 0));
    }
  }

  TEST_CASE("reproduce_theorem rejects mismatched families") {
    CHECK_THROWS_AS(reproduce_theorem(parse_spec("U(4)/U(1)xU(2)"), Theorem::so_normal, {}, {10, 0},
                                      1e-9),
                    Error);
    CHECK_THROWS_AS(reproduce_theorem(parse_spec("SO(5)/SO(3)"), Theorem::u_gmu, {}, {10, 0}, 1e-9),
                    Error);
  }
}
