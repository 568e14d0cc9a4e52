#include "gomet/metric.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "gomet/errors.hpp"

namespace gomet {

double MetricOperator::op_norm() const {
  if (matrix.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

MetricOperator normal_metric(const Decomposition& dec, double lam) {
  if (lam <= 0.0) fail(errc::positivity_error, "normal metric needs lam > 0, got " + std::to_string(lam));
  return MetricOperator{&dec, lam * Eigen::MatrixXd::Identity(dec.m_dim(), dec.m_dim())};
}

EigMap expand_eigmap(const Decomposition& dec, const EigMap& eig) {
  EigMap fine;
  for (const auto& [id, value] : eig) {
    for (const std::string& fid : dec.expand_id(id)) {
      if (fine.count(fid)) {
        fail(errc::coverage_error, "submodule '" + fid + "' assigned twice (via '" + id + "')");
      }
      fine[fid] = value;
    }
  }
  for (const Submodule& s : dec.fine_catalog()) {
    if (!fine.count(s.id)) fail(errc::coverage_error, "no eigenvalue for submodule '" + s.id + "'");
  }
  if (fine.size() != dec.fine_catalog().size()) {
    fail(errc::coverage_error, "eigenvalue map does not match the fine catalog");
  }
  return fine;
}

MetricOperator diagonal_metric(const Decomposition& dec, const EigMap& eig) {
  EigMap fine = expand_eigmap(dec, eig);
  for (const auto& [id, lam] : fine) {
    if (lam <= 0.0) {
      fail(errc::positivity_error,
           "eigenvalue for '" + id + "' must be positive, got " + std::to_string(lam));
    }
  }

  // A constant assignment is the normal metric; return lam * Id exactly
  // rather than a sum of projectors.
  bool constant = true;
  for (const auto& [id, lam] : fine) constant = constant && lam == fine.begin()->second;
  if (constant && !fine.empty()) return normal_metric(dec, fine.begin()->second);

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dec.m_dim(), dec.m_dim());
  for (const Submodule& s : dec.fine_catalog()) {
    m += fine.at(s.id) * (s.onb * s.onb.transpose());
  }
  MetricOperator a{&dec, std::move(m)};
  ValidationReport report = validate_metric(dec, a);
  if (!report.pass()) {
    fail(errc::precondition_error, "diagonal metric failed validation (equivariance residual " +
                                       std::to_string(report.equivariance_residual) + ")");
  }
  return a;
}

MetricOperator gmu_metric(const Decomposition& dec, double mu) {
  if (dec.spec().family != Family::U || dec.spec().n0() < 1) {
    fail(errc::unsupported_family,
         "g_mu metrics exist only for U(n) quotients with n0 >= 1, spec is " + dec.spec().str());
  }
  if (mu <= 0.0) fail(errc::positivity_error, "g_mu needs mu > 0, got " + std::to_string(mu));
  EigMap eig;
  for (const Submodule& s : dec.fine_catalog()) eig[s.id] = s.id == "z(n)" ? mu : 1.0;
  return diagonal_metric(dec, eig);
}

MetricOperator metric_from_matrix(const Decomposition& dec, Eigen::MatrixXd matrix) {
  if (matrix.rows() != dec.m_dim() || matrix.cols() != dec.m_dim()) {
    fail(errc::shape_error, "operator is " + std::to_string(matrix.rows()) + "x" +
                                std::to_string(matrix.cols()) + ", expected " +
                                std::to_string(dec.m_dim()) + "x" + std::to_string(dec.m_dim()));
  }
  return MetricOperator{&dec, std::move(matrix)};
}

ValidationReport validate_metric(const Decomposition& dec, const MetricOperator& a,
                                 const MetricTolerances& tol) {
  if (a.matrix.rows() != dec.m_dim() || a.matrix.cols() != dec.m_dim()) {
    fail(errc::shape_error, "operator is " + std::to_string(a.matrix.rows()) + "x" +
                                std::to_string(a.matrix.cols()) + ", expected " +
                                std::to_string(dec.m_dim()) + "x" + std::to_string(dec.m_dim()));
  }

  ValidationReport report;
  report.symmetry_residual =
      a.matrix.rows() == 0 ? 0.0 : (a.matrix - a.matrix.transpose()).cwiseAbs().maxCoeff();
  report.symmetric = report.symmetry_residual <= tol.symmetry;

  if (a.matrix.rows() == 0) {
    report.min_eigenvalue = 0.0;
    report.positive_definite = true;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a.matrix + a.matrix.transpose()),
                                                      Eigen::EigenvaluesOnly);
    report.min_eigenvalue = es.eigenvalues().minCoeff();
    report.positive_definite = report.min_eigenvalue > tol.eig_floor;
  }

  // ad(h)-equivariance, checked infinitesimally over the h basis.
  double worst = 0.0;
  for (int r = 0; r < dec.h_dim(); ++r) {
    const Eigen::MatrixXd& ad = dec.h_action(r);
    worst = std::max(worst, (ad * a.matrix - a.matrix * ad).cwiseAbs().maxCoeff());
  }
  report.equivariance_residual = worst;
  report.equivariant = worst <= tol.equivariance;
  return report;
}

}  // namespace gomet
