#include "gomet/structure.hpp"

#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "gomet/errors.hpp"

namespace gomet {

namespace {

std::vector<Element> action_basis(const Decomposition& dec, ActionAlgebra under) {
  return under == ActionAlgebra::h ? dec.h_basis() : dec.h_plus_n_basis();
}

int nullspace_dim(const Eigen::MatrixXd& m, double rel_cutoff = 1e-10) {
  if (m.rows() == 0) return static_cast<int>(m.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  double cutoff = rel_cutoff * std::max(1.0, sv.size() > 0 ? sv[0] : 0.0);
  int rank = 0;
  for (int k = 0; k < sv.size(); ++k)
    if (sv[k] > cutoff) ++rank;
  return static_cast<int>(m.cols()) - rank;
}

Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& m, double rel_cutoff = 1e-10) {
  if (m.rows() == 0) return Eigen::MatrixXd::Identity(m.cols(), m.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double cutoff = rel_cutoff * std::max(1.0, sv.size() > 0 ? sv[0] : 0.0);
  int rank = 0;
  for (int k = 0; k < sv.size(); ++k)
    if (sv[k] > cutoff) ++rank;
  return svd.matrixV().rightCols(static_cast<int>(m.cols()) - rank);
}

// The m-frame coordinates of [x, y] over all basis pairs of two submodules,
// computed once and reused by every projection target.
struct PairBrackets {
  std::vector<Eigen::VectorXd> coords;
  std::vector<std::pair<std::string, std::string>> labels;
  std::vector<double> norm_products;
};

PairBrackets pair_brackets(const Decomposition& dec, const Submodule& s1, const Submodule& s2) {
  PairBrackets out;
  out.coords.reserve(s1.basis.size() * s2.basis.size());
  for (const Element& x : s1.basis) {
    for (const Element& y : s2.basis) {
      out.coords.push_back(dec.project_m(bracket(x, y)));
      out.labels.emplace_back(x.str(), y.str());
      out.norm_products.push_back(x.norm() * y.norm());
    }
  }
  return out;
}

struct PairScan {
  double magnitude = 0.0;
  std::string witness_x;
  std::string witness_y;
};

template <typename Projector>
PairScan best_projection(const PairBrackets& brackets, Projector project) {
  PairScan best;
  for (size_t k = 0; k < brackets.coords.size(); ++k) {
    double rel = project(brackets.coords[k]).norm() / brackets.norm_products[k];
    if (rel > best.magnitude) {
      best.magnitude = rel;
      best.witness_x = brackets.labels[k].first;
      best.witness_y = brackets.labels[k].second;
    }
  }
  return best;
}

template <typename Projector>
PairScan scan_pairs(const Decomposition& dec, const Submodule& s1, const Submodule& s2,
                    Projector project) {
  return best_projection(pair_brackets(dec, s1, s2), project);
}

}  // namespace

int hom_dimension(const Decomposition& dec, const Submodule& s1, const Submodule& s2,
                  ActionAlgebra under) {
  const int d1 = s1.dim();
  const int d2 = s2.dim();
  std::vector<Element> basis = action_basis(dec, under);

  Eigen::MatrixXd sys(static_cast<Eigen::Index>(basis.size()) * d1 * d2, d1 * d2);
  Eigen::Index row = 0;
  for (const Element& a : basis) {
    Eigen::MatrixXd m1 = action_matrix(dec, a, s1);
    Eigen::MatrixXd m2 = action_matrix(dec, a, s2);
    // vec(phi) for phi: s1 -> s2 with m2 phi - phi m1 = 0
    sys.block(row, 0, d1 * d2, d1 * d2) =
        Eigen::kroneckerProduct(Eigen::MatrixXd::Identity(d1, d1), m2) -
        Eigen::kroneckerProduct(m1.transpose(), Eigen::MatrixXd::Identity(d2, d2));
    row += d1 * d2;
  }
  return nullspace_dim(sys);
}

std::optional<Element> inequivalence_witness(const Decomposition& dec, const Submodule& s1,
                                             const Submodule& s2, const Element& x,
                                             const Element& y) {
  (void)s1;
  (void)s2;
  if (x.is_zero(1e-14) || y.is_zero(1e-14)) {
    fail(errc::precondition_error, "witness search needs nonzero X and Y");
  }

  const int hd = dec.h_dim();
  if (hd == 0) return std::nullopt;

  // [a, v] is linear in a; columns over the orthonormal h-frame.
  auto bracket_map = [&](const Element& v) {
    Eigen::MatrixXd m(dec.m_dim(), hd);
    for (int r = 0; r < hd; ++r) {
      const Element& h = dec.h_basis()[static_cast<size_t>(r)];
      m.col(r) = dec.project_m(bracket(h, v)) / h.norm();
    }
    return m;
  };

  Eigen::MatrixXd lx = bracket_map(x);
  Eigen::MatrixXd kernel = nullspace_basis(lx);
  if (kernel.cols() == 0) return std::nullopt;

  // Strongest direction of a -> [a, y] within the annihilator of x.
  Eigen::MatrixXd ly = bracket_map(y) * kernel;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ly, Eigen::ComputeFullV);
  if (svd.singularValues().size() == 0) return std::nullopt;
  Eigen::VectorXd alpha = kernel * svd.matrixV().col(0);

  Element a = dec.from_h(alpha);
  double ann = bracket(a, x).norm();
  double sep = bracket(a, y).norm();
  if (ann < 1e-10 && sep > 1e-3 * a.norm() * y.norm()) return a;
  return std::nullopt;
}

double bracket_projection(const Decomposition& dec, const Submodule& s1, const Submodule& s2) {
  if (s1.id == s2.id) fail(errc::precondition_error, "bracket projection needs distinct submodules");
  auto complement = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out = v;
    out -= s1.onb * (s1.onb.transpose() * v);
    out -= s2.onb * (s2.onb.transpose() * v);
    return out;
  };
  return scan_pairs(dec, s1, s2, complement).magnitude;
}

double bracket_projection(const Decomposition& dec, const Submodule& s1, const Submodule& s2,
                          const Submodule& target) {
  if (s1.id == s2.id) fail(errc::precondition_error, "bracket projection needs distinct submodules");
  auto onto = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return target.onb * (target.onb.transpose() * v);
  };
  return scan_pairs(dec, s1, s2, onto).magnitude;
}

std::string to_string(MergeEvent::Rule rule) {
  return rule == MergeEvent::Rule::pair ? "pair" : "triple";
}

EigenvalueClasses::EigenvalueClasses(std::vector<std::string> ids) : ids_(std::move(ids)) {
  parent_.resize(ids_.size());
  std::iota(parent_.begin(), parent_.end(), 0);
}

int EigenvalueClasses::find(int k) const {
  while (parent_[static_cast<size_t>(k)] != k) {
    parent_[static_cast<size_t>(k)] = parent_[static_cast<size_t>(parent_[static_cast<size_t>(k)])];
    k = parent_[static_cast<size_t>(k)];
  }
  return k;
}

int EigenvalueClasses::index(const std::string& id) const {
  auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) fail(errc::coverage_error, "unknown submodule id '" + id + "'");
  return static_cast<int>(it - ids_.begin());
}

bool EigenvalueClasses::merge(const std::string& a, const std::string& b) {
  int ra = find(index(a));
  int rb = find(index(b));
  if (ra == rb) return false;
  // smaller catalog index becomes the root, keeping the partition canonical
  if (rb < ra) std::swap(ra, rb);
  parent_[static_cast<size_t>(rb)] = ra;
  return true;
}

bool EigenvalueClasses::same_class(const std::string& a, const std::string& b) const {
  return find(index(a)) == find(index(b));
}

int EigenvalueClasses::class_count() const {
  int count = 0;
  for (size_t k = 0; k < parent_.size(); ++k)
    if (find(static_cast<int>(k)) == static_cast<int>(k)) ++count;
  return count;
}

std::vector<std::vector<std::string>> EigenvalueClasses::classes() const {
  std::vector<std::vector<std::string>> out;
  std::vector<int> root_slot(parent_.size(), -1);
  for (size_t k = 0; k < ids_.size(); ++k) {
    int r = find(static_cast<int>(k));
    if (root_slot[static_cast<size_t>(r)] < 0) {
      root_slot[static_cast<size_t>(r)] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[static_cast<size_t>(root_slot[static_cast<size_t>(r)])].push_back(ids_[k]);
  }
  return out;
}

EigenvalueClasses derive_constraints(const Decomposition& dec, const std::vector<int>& scan_order) {
  const auto& fine = dec.fine_catalog();
  std::vector<std::string> ids;
  ids.reserve(fine.size());
  for (const Submodule& s : fine) ids.push_back(s.id);
  EigenvalueClasses classes(ids);

  std::vector<int> order(fine.size());
  std::iota(order.begin(), order.end(), 0);
  if (!scan_order.empty()) {
    if (scan_order.size() != fine.size()) {
      fail(errc::config_error, "scan order must be a permutation of the fine catalog");
    }
    order = scan_order;
  }

  // The merge conditions depend only on the fixed bracket geometry, so one
  // pass plus union-find closure reaches the fixpoint; nothing rescanned.
  for (size_t oi = 0; oi < order.size(); ++oi) {
    for (size_t oj = oi + 1; oj < order.size(); ++oj) {
      const Submodule& s1 = fine[static_cast<size_t>(order[oi])];
      const Submodule& s2 = fine[static_cast<size_t>(order[oj])];
      PairBrackets brackets = pair_brackets(dec, s1, s2);

      auto complement = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd out = v;
        out -= s1.onb * (s1.onb.transpose() * v);
        out -= s2.onb * (s2.onb.transpose() * v);
        return out;
      };
      PairScan pair = best_projection(brackets, complement);
      if (pair.magnitude > kProjectionThreshold) {
        if (classes.merge(s1.id, s2.id)) {
          classes.merges.push_back({{s1.id, s2.id},
                                    MergeEvent::Rule::pair,
                                    {pair.witness_x, pair.witness_y},
                                    pair.magnitude});
        }
      }

      for (size_t ok = 0; ok < order.size(); ++ok) {
        if (ok == oi || ok == oj) continue;
        const Submodule& s3 = fine[static_cast<size_t>(order[ok])];
        auto onto = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
          return s3.onb * (s3.onb.transpose() * v);
        };
        PairScan triple = best_projection(brackets, onto);
        if (triple.magnitude > kProjectionThreshold) {
          bool changed = classes.merge(s1.id, s2.id);
          changed = classes.merge(s1.id, s3.id) || changed;
          if (changed) {
            classes.merges.push_back({{s1.id, s2.id, s3.id},
                                      MergeEvent::Rule::triple,
                                      {triple.witness_x, triple.witness_y},
                                      triple.magnitude});
          }
        }
      }
    }
  }
  return classes;
}

}  // namespace gomet
