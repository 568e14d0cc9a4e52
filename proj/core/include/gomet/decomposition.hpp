#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gomet/algebra.hpp"

namespace gomet {

/// A quotient description SO(n)/SO(n1)x...xSO(ns) or U(n)/U(n1)x...xU(ns).
/// The identity block occupies indices 1..n0, then the H blocks follow in
/// the given part order.
struct SpaceSpec {
  Family family;
  int n;
  std::vector<int> parts;

  int n0() const;
  std::string str() const;
};

/// Parses "SO(7)/SO(2)xSO(3)" style descriptions (a single family on both
/// sides) and validates the block constraints.
SpaceSpec parse_spec(const std::string& text);
void validate_spec(const SpaceSpec& spec);

/// One block of the submodule catalog. The stored basis consists of
/// integer-coefficient combinations of labeled basis vectors; `onb` holds the
/// same subspace as B-orthonormal columns in the orthonormal m-frame.
struct Submodule {
  enum class Kind { center_n, simple_n, so4_ideal, trivial_line, m_ij, strand_m0j, v_split };

  std::string id;
  Kind kind;
  int i = 0;  // block pair (i,j); strand (j,l); trivial line (a,b)
  int j = 0;
  std::vector<Element> basis;
  Eigen::MatrixXd onb;

  int dim() const { return static_cast<int>(basis.size()); }
};

std::string to_string(Submodule::Kind kind);

/// The B-orthogonal reductive splitting g = h (+) m for a SpaceSpec, with the
/// coarse catalog (the n block plus every cross block m_{i,j}) and the fine
/// catalog (strands, V-splits, so(4) ideals, trivial lines, z(n), su(n0)).
/// Immutable after construction; safe for concurrent reads.
class Decomposition {
 public:
  const SpaceSpec& spec() const { return spec_; }
  const AlgebraPtr& algebra() const { return algebra_; }

  const std::vector<Element>& h_basis() const { return h_basis_; }
  const std::vector<Element>& m_basis() const { return m_basis_; }
  int h_dim() const { return static_cast<int>(h_basis_.size()); }
  int m_dim() const { return static_cast<int>(m_basis_.size()); }

  const std::vector<Submodule>& coarse_catalog() const { return coarse_; }
  const std::vector<Submodule>& fine_catalog() const { return fine_; }
  const Submodule& fine(const std::string& id) const;
  const Submodule& coarse(const std::string& id) const;
  bool has_fine(const std::string& id) const;
  bool has_coarse(const std::string& id) const;

  /// Fine-catalog ids covered by a coarse id (strands of m_{0,j}, V splits,
  /// the n-block pieces); the identity for ids that are already fine.
  std::vector<std::string> expand_id(const std::string& id) const;

  /// 1-based column range [first, last] of part block j (j = 1..s); block 0
  /// is the identity block [1, n0].
  std::pair<int, int> block_range(int j) const;

  // Coordinates in the B-orthonormal frames (labeled basis scaled by
  // 1/sqrt(gram)); B-norms become Euclidean norms there.
  Eigen::VectorXd to_g(const Element& x) const;
  Eigen::VectorXd project_m(const Element& x) const;        // drops the h part
  Eigen::VectorXd to_m(const Element& x, double tol = 1e-10) const;  // h part must vanish
  Eigen::VectorXd project_h(const Element& x) const;
  Element from_m(const Eigen::VectorXd& m_coords) const;
  Element from_h(const Eigen::VectorXd& h_coords) const;

  /// m-basis labels in frame order (for reports and probe labeling).
  std::vector<std::string> m_labels() const;

  /// Whether algebra basis index k belongs to h (resp. m).
  bool label_in_h(int k) const { return h_index_[static_cast<size_t>(k)] >= 0; }
  bool label_in_m(int k) const { return m_index_[static_cast<size_t>(k)] >= 0; }

  /// Basis of h (+) n taken from the catalogs (used as the normalizer
  /// subalgebra by the structure analysis).
  std::vector<Element> h_plus_n_basis() const;

  /// Matrix of ad(h_r / |h_r|) restricted to m, in the orthonormal m-frame.
  /// Precomputed once; indexed like h_basis().
  const Eigen::MatrixXd& h_action(int r) const { return h_ad_m_[static_cast<size_t>(r)]; }

 private:
  friend Decomposition decompose(const SpaceSpec& spec);
  Decomposition() = default;

  SpaceSpec spec_{};
  AlgebraPtr algebra_;
  std::vector<Element> h_basis_;
  std::vector<Element> m_basis_;
  std::vector<Submodule> coarse_;
  std::vector<Submodule> fine_;
  std::vector<int> m_index_;  // algebra basis index -> m-frame index or -1
  std::vector<int> h_index_;  // algebra basis index -> h-frame index or -1
  std::vector<Eigen::MatrixXd> h_ad_m_;
};

Decomposition decompose(const SpaceSpec& spec);

/// Basis of the normalizer subalgebra n_g(h) = {Y : [Y, h] in h}, computed
/// as the nullspace of Y -> proj_m [Y, a_k] stacked over the h basis. Spans
/// h (+) n; the identity is checked by rank in the test suites.
std::vector<Element> normalizer(const SpaceSpec& spec);

/// Matrix of X -> [a, X] on submodule s in its orthonormal basis. Requires
/// a in h (+) n and [a, s] in s within tolerance, else invariance_violation.
Eigen::MatrixXd action_matrix(const Decomposition& dec, const Element& a, const Submodule& s,
                              double tol = 1e-10);

}  // namespace gomet
