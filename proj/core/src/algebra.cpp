#include "gomet/algebra.hpp"

#include <cmath>
#include <sstream>

#include "gomet/errors.hpp"

namespace gomet {

namespace {

constexpr std::complex<double> kImag{0.0, 1.0};

void check_same_algebra(const Element& x, const Element& y) {
  if (!x.algebra || !y.algebra) fail(errc::precondition_error, "element without algebra");
  if (!x.algebra->same_as(*y.algebra)) {
    fail(errc::algebra_mismatch,
         to_string(x.algebra->family()) + "(" + std::to_string(x.algebra->n()) + ") vs " +
             to_string(y.algebra->family()) + "(" + std::to_string(y.algebra->n()) + ")");
  }
}

std::string format_coeff(double c, double tol) {
  double r = std::round(c);
  if (std::abs(c - r) <= tol) {
    long long i = static_cast<long long>(r);
    return std::to_string(i);
  }
  std::ostringstream os;
  os.precision(12);
  os << c;
  return os.str();
}

}  // namespace

std::string to_string(Family family) { return family == Family::SO ? "SO" : "U"; }

std::string BasisLabel::str() const {
  return std::string(kind == Kind::e ? "e" : "f") + "_{" + std::to_string(a) + "," +
         std::to_string(b) + "}";
}

double Element::norm() const {
  double s = 0.0;
  for (int k = 0; k < coeffs.size(); ++k) s += coeffs[k] * coeffs[k] * algebra->gram()[k];
  return std::sqrt(s);
}

bool Element::is_zero(double tol) const {
  return coeffs.lpNorm<Eigen::Infinity>() <= tol;
}

std::string Element::str(double coeff_tol) const {
  std::string out;
  for (int k = 0; k < coeffs.size(); ++k) {
    double c = coeffs[k];
    if (std::abs(c) <= coeff_tol) continue;
    std::string mag = format_coeff(std::abs(c), coeff_tol);
    std::string term = (mag == "1") ? algebra->label(k).str() : mag + "*" + algebra->label(k).str();
    if (out.empty()) {
      out = (c < 0 ? "-" : "") + term;
    } else {
      out += (c < 0 ? "-" : "+") + term;
    }
  }
  return out.empty() ? "0" : out;
}

Element operator+(const Element& x, const Element& y) {
  check_same_algebra(x, y);
  return x.algebra->from_coeffs(x.coeffs + y.coeffs);
}

Element operator-(const Element& x, const Element& y) {
  check_same_algebra(x, y);
  return x.algebra->from_coeffs(x.coeffs - y.coeffs);
}

Element operator-(const Element& x) { return x.algebra->from_coeffs(-x.coeffs); }

Element operator*(double c, const Element& x) { return x.algebra->from_coeffs(c * x.coeffs); }

int Algebra::index_of(const BasisLabel& label) const {
  // labels are in lexicographic (kind, a, b) order, so binary search applies
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || !(*it == label)) {
    fail(errc::not_in_algebra, "no basis label " + label.str() + " in " + to_string(family_) +
                                   "(" + std::to_string(n_) + ")");
  }
  return static_cast<int>(it - labels_.begin());
}

bool Algebra::has_label(const BasisLabel& label) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  return it != labels_.end() && *it == label;
}

Element Algebra::zero() const {
  return from_coeffs(Eigen::VectorXd::Zero(dim()));
}

Element Algebra::basis_element(int k) const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(dim());
  c[k] = 1.0;
  return Element{self_.lock(), std::move(c), matrices_[k]};
}

Element Algebra::basis_element(const BasisLabel& label) const {
  return basis_element(index_of(label));
}

Element Algebra::from_coeffs(Eigen::VectorXd coeffs) const {
  if (coeffs.size() != dim()) {
    fail(errc::shape_error, "coefficient vector has length " + std::to_string(coeffs.size()) +
                                ", expected " + std::to_string(dim()));
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n_, n_);
  for (int k = 0; k < dim(); ++k) {
    if (coeffs[k] != 0.0) m += coeffs[k] * matrices_[k];
  }
  return Element{self_.lock(), std::move(coeffs), std::move(m)};
}

AlgebraPtr build_algebra(Family family, int n) {
  if (n < 2) fail(errc::invalid_dimension, "need n >= 2, got n = " + std::to_string(n));

  auto alg = std::shared_ptr<Algebra>(new Algebra());
  alg->family_ = family;
  alg->n_ = n;

  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b) alg->labels_.push_back({BasisLabel::Kind::e, a, b});
  if (family == Family::U) {
    for (int a = 1; a <= n; ++a)
      for (int b = a; b <= n; ++b) alg->labels_.push_back({BasisLabel::Kind::f, a, b});
  }

  alg->matrices_.reserve(alg->labels_.size());
  for (const BasisLabel& l : alg->labels_) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    if (l.kind == BasisLabel::Kind::e) {
      m(l.a - 1, l.b - 1) = 1.0;
      m(l.b - 1, l.a - 1) = -1.0;
    } else {
      m(l.a - 1, l.b - 1) += kImag;
      m(l.b - 1, l.a - 1) += kImag;
    }
    alg->matrices_.push_back(std::move(m));
  }

  // Gram diagonal from the trace formula, not hardcoded.
  alg->gram_.resize(alg->labels_.size());
  for (size_t k = 0; k < alg->matrices_.size(); ++k) {
    std::complex<double> t = -(alg->matrices_[k] * alg->matrices_[k]).trace();
    alg->gram_[static_cast<int>(k)] = t.real();
  }

  alg->self_ = alg;
  return alg;
}

Element bracket(const Element& x, const Element& y) {
  check_same_algebra(x, y);
  Eigen::MatrixXcd c = x.matrix * y.matrix - y.matrix * x.matrix;
  return express(x.algebra, c);
}

double inner(const Element& x, const Element& y) {
  check_same_algebra(x, y);
  std::complex<double> t = -(x.matrix * y.matrix).trace();
  if (std::abs(t.imag()) >= 1e-12) {
    fail(errc::precondition_error, "B(X,Y) has imaginary part " + std::to_string(t.imag()));
  }
  return t.real();
}

Element express(const AlgebraPtr& algebra, const Eigen::MatrixXcd& m) {
  if (!algebra) fail(errc::precondition_error, "null algebra");
  const int n = algebra->n();
  if (m.rows() != n || m.cols() != n) {
    fail(errc::shape_error, "matrix is " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + ", expected " + std::to_string(n) +
                                "x" + std::to_string(n));
  }
  double skew_violation = (m + m.adjoint()).cwiseAbs().maxCoeff();
  double real_violation =
      algebra->family() == Family::SO ? m.imag().cwiseAbs().maxCoeff() : 0.0;
  if (skew_violation > 1e-10 || real_violation > 1e-10) {
    fail(errc::not_in_algebra,
         "matrix not in " + to_string(algebra->family()) + "(" + std::to_string(n) +
             "): max skew violation " + std::to_string(skew_violation) +
             (algebra->family() == Family::SO
                  ? ", max imaginary entry " + std::to_string(real_violation)
                  : ""));
  }

  // Entrywise extraction: M(a,b) = c_e + i c_f for a < b, M(a,a) = 2i c_f.
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(algebra->dim());
  const auto& labels = algebra->basis();
  for (int k = 0; k < algebra->dim(); ++k) {
    const BasisLabel& l = labels[k];
    std::complex<double> entry = m(l.a - 1, l.b - 1);
    if (l.kind == BasisLabel::Kind::e) {
      coeffs[k] = entry.real();
    } else if (l.a == l.b) {
      coeffs[k] = entry.imag() / 2.0;
    } else {
      coeffs[k] = entry.imag();
    }
  }

  // Store the canonical realization (the exact skew completion of the upper
  // triangle) so coefficients and matrix always agree bit-for-bit.
  Eigen::MatrixXcd canon = Eigen::MatrixXcd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    if (algebra->family() == Family::U) canon(a, a) = kImag * m(a, a).imag();
    for (int b = a + 1; b < n; ++b) {
      std::complex<double> entry =
          algebra->family() == Family::SO ? std::complex<double>(m(a, b).real(), 0.0) : m(a, b);
      canon(a, b) = entry;
      canon(b, a) = -std::conj(entry);
    }
  }
  return Element{algebra, std::move(coeffs), std::move(canon)};
}

}  // namespace gomet
