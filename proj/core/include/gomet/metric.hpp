#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>

#include "gomet/decomposition.hpp"

namespace gomet {

/// Assignment of a positive eigenvalue to each submodule id. Keys may be
/// coarse ids; they expand to their fine constituents. std::map keeps the
/// serialization order deterministic.
using EigMap = std::map<std::string, double>;

struct MetricTolerances {
  double symmetry = 1e-12;
  double equivariance = 1e-10;
  double eig_floor = 1e-12;
};

/// An invariant metric as its endomorphism on m, stored in the orthonormal
/// m-frame where B-self-adjointness is plain matrix symmetry.
struct MetricOperator {
  const Decomposition* dec = nullptr;
  Eigen::MatrixXd matrix;

  /// Largest |eigenvalue| (the operator B-norm; matrix is symmetric).
  double op_norm() const;
};

struct ValidationReport {
  bool symmetric = false;
  bool positive_definite = false;
  bool equivariant = false;
  double symmetry_residual = 0.0;
  double min_eigenvalue = 0.0;
  double equivariance_residual = 0.0;

  bool pass() const { return symmetric && positive_definite && equivariant; }
};

/// A = lam * Id on m. lam <= 0 is a positivity error.
MetricOperator normal_metric(const Decomposition& dec, double lam);

/// Block-scalar operator over the fine catalog. The map must cover every
/// fine id exactly once after coarse expansion; values must be positive.
/// The result is validated before return.
MetricOperator diagonal_metric(const Decomposition& dec, const EigMap& eig);

/// The one-parameter deformation of the normal metric along the center:
/// mu on z(n), 1 on su(n0) and p. Requires family U with n0 >= 1.
MetricOperator gmu_metric(const Decomposition& dec, double mu);

/// Wraps a raw matrix (orthonormal m-frame) without validating it, so that
/// arbitrary candidates can be fed to the checker and refuted.
MetricOperator metric_from_matrix(const Decomposition& dec, Eigen::MatrixXd matrix);

ValidationReport validate_metric(const Decomposition& dec, const MetricOperator& a,
                                 const MetricTolerances& tol = {});

/// Expands coarse ids and checks exact coverage of the fine catalog.
EigMap expand_eigmap(const Decomposition& dec, const EigMap& eig);

}  // namespace gomet
