#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <string>
#include <vector>

namespace gomet {

enum class Family { SO, U };

std::string to_string(Family family);

/// Label of one basis vector: e_{a,b} = E_ab - E_ba (a < b), or
/// f_{a,b} = i (E_ab + E_ba) (a <= b, U family only). Indices are 1-based.
struct BasisLabel {
  enum class Kind { e, f };
  Kind kind;
  int a;
  int b;

  std::string str() const;
  friend bool operator==(const BasisLabel&, const BasisLabel&) = default;
  friend auto operator<=>(const BasisLabel&, const BasisLabel&) = default;
};

class Algebra;
using AlgebraPtr = std::shared_ptr<const Algebra>;

/// Element of so(n) or u(n): real coefficient vector over the labeled basis
/// together with its n x n matrix realization (real antisymmetric for SO,
/// complex skew-Hermitian for U). Immutable by convention.
struct Element {
  AlgebraPtr algebra;
  Eigen::VectorXd coeffs;
  Eigen::MatrixXcd matrix;

  /// sqrt(B(X, X)) with B(X, Y) = -Trace(XY).
  double norm() const;
  bool is_zero(double tol = 0.0) const;

  /// Renders the coefficient expansion, e.g. "e_{1,2}+2*f_{1,1}".
  /// Coefficients within coeff_tol of an integer print as integers.
  std::string str(double coeff_tol = 1e-12) const;
};

Element operator+(const Element& x, const Element& y);
Element operator-(const Element& x, const Element& y);
Element operator-(const Element& x);
Element operator*(double c, const Element& x);

/// The compact Lie algebra so(n) or u(n) carrying the labeled matrix basis
/// and the inner product B(X, Y) = -Trace(XY). The basis is B-orthogonal;
/// the Gram diagonal is computed from the trace formula at construction.
class Algebra {
 public:
  Family family() const { return family_; }
  int n() const { return n_; }
  int dim() const { return static_cast<int>(labels_.size()); }

  const std::vector<BasisLabel>& basis() const { return labels_; }
  const Eigen::VectorXd& gram() const { return gram_; }
  const BasisLabel& label(int k) const { return labels_[k]; }
  const Eigen::MatrixXcd& basis_matrix(int k) const { return matrices_[k]; }

  /// Index of a label in the basis; throws not_in_algebra for foreign labels.
  int index_of(const BasisLabel& label) const;
  bool has_label(const BasisLabel& label) const;

  Element zero() const;
  Element basis_element(int k) const;
  Element basis_element(const BasisLabel& label) const;
  Element from_coeffs(Eigen::VectorXd coeffs) const;

  bool same_as(const Algebra& other) const {
    return family_ == other.family_ && n_ == other.n_;
  }

 private:
  friend AlgebraPtr build_algebra(Family family, int n);
  Algebra() = default;

  Family family_ = Family::SO;
  int n_ = 0;
  std::vector<BasisLabel> labels_;
  std::vector<Eigen::MatrixXcd> matrices_;
  Eigen::VectorXd gram_;
  // back-pointer handed to Elements; set once by build_algebra
  std::weak_ptr<const Algebra> self_;
};

/// Builds so(n) (dim n(n-1)/2) or u(n) (dim n^2) with the deterministic
/// lexicographic basis order: all e before all f, each kind sorted by (a,b).
AlgebraPtr build_algebra(Family family, int n);

/// Lie bracket: the matrix commutator XY - YX re-expressed in coordinates.
Element bracket(const Element& x, const Element& y);

/// B(X, Y) = -Trace(XY); always real (imaginary part asserted < 1e-12).
double inner(const Element& x, const Element& y);

/// Inverse of the matrix realization. The input must be antisymmetric (SO)
/// resp. skew-Hermitian (U) within 1e-10, else not_in_algebra is thrown with
/// the largest violation magnitude in the message.
Element express(const AlgebraPtr& algebra, const Eigen::MatrixXcd& m);

}  // namespace gomet
