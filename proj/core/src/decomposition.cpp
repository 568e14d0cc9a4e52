#include "gomet/decomposition.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cctype>
#include <cmath>

#include "gomet/errors.hpp"

namespace gomet {

namespace {

struct Cursor {
  const std::string& text;
  size_t pos = 0;

  bool eat(const std::string& token) {
    if (text.compare(pos, token.size(), token) == 0) {
      pos += token.size();
      return true;
    }
    return false;
  }
  int integer() {
    size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) fail(errc::parse_error, "expected integer at position " + std::to_string(start) + " in '" + text + "'");
    return std::stoi(text.substr(start, pos - start));
  }
};

Family parse_family(Cursor& c) {
  if (c.eat("SO")) return Family::SO;
  if (c.eat("U")) return Family::U;
  fail(errc::parse_error, "expected family SO or U at position " + std::to_string(c.pos) + " in '" + c.text + "'");
}

int parse_group(Cursor& c, Family expected) {
  Family f = parse_family(c);
  if (f != expected) fail(errc::parse_error, "mixed families in '" + c.text + "'");
  if (!c.eat("(")) fail(errc::parse_error, "expected '(' in '" + c.text + "'");
  int n = c.integer();
  if (!c.eat(")")) fail(errc::parse_error, "expected ')' in '" + c.text + "'");
  return n;
}

}  // namespace

int SpaceSpec::n0() const {
  int sum = 0;
  for (int p : parts) sum += p;
  return n - sum;
}

std::string SpaceSpec::str() const {
  std::string out = to_string(family) + "(" + std::to_string(n) + ")/";
  for (size_t k = 0; k < parts.size(); ++k) {
    if (k > 0) out += "x";
    out += to_string(family) + "(" + std::to_string(parts[k]) + ")";
  }
  return out;
}

void validate_spec(const SpaceSpec& spec) {
  if (spec.n < 2) fail(errc::invalid_dimension, "need n >= 2, got n = " + std::to_string(spec.n));
  if (spec.parts.empty()) fail(errc::constraint_violation, "need at least one factor (s >= 1)");
  int sum = 0;
  for (int p : spec.parts) {
    if (spec.family == Family::SO && p < 2) {
      fail(errc::constraint_violation,
           "n_j>1 required for every SO factor, got SO(" + std::to_string(p) + ")");
    }
    if (spec.family == Family::U && p < 1) {
      fail(errc::constraint_violation, "U factors need n_j >= 1, got U(" + std::to_string(p) + ")");
    }
    sum += p;
  }
  if (sum > spec.n) {
    fail(errc::constraint_violation, "factor sizes sum to " + std::to_string(sum) +
                                         " > n = " + std::to_string(spec.n));
  }
}

SpaceSpec parse_spec(const std::string& text) {
  Cursor c{text};
  SpaceSpec spec;
  spec.family = parse_family(c);
  c.pos = 0;
  spec.n = parse_group(c, spec.family);
  if (!c.eat("/")) fail(errc::parse_error, "expected '/' in '" + text + "'");
  spec.parts.push_back(parse_group(c, spec.family));
  while (c.pos < text.size()) {
    if (!c.eat("x")) fail(errc::parse_error, "expected 'x' at position " + std::to_string(c.pos) + " in '" + text + "'");
    spec.parts.push_back(parse_group(c, spec.family));
  }
  validate_spec(spec);
  return spec;
}

std::string to_string(Submodule::Kind kind) {
  switch (kind) {
    case Submodule::Kind::center_n: return "center_n";
    case Submodule::Kind::simple_n: return "simple_n";
    case Submodule::Kind::so4_ideal: return "so4_ideal";
    case Submodule::Kind::trivial_line: return "trivial_line";
    case Submodule::Kind::m_ij: return "m_ij";
    case Submodule::Kind::strand_m0j: return "strand_m0j";
    case Submodule::Kind::v_split: return "v_split";
  }
  return "unknown";
}

const Submodule& Decomposition::fine(const std::string& id) const {
  for (const Submodule& s : fine_)
    if (s.id == id) return s;
  fail(errc::coverage_error, "no fine submodule '" + id + "' in " + spec_.str());
}

const Submodule& Decomposition::coarse(const std::string& id) const {
  for (const Submodule& s : coarse_)
    if (s.id == id) return s;
  fail(errc::coverage_error, "no coarse submodule '" + id + "' in " + spec_.str());
}

bool Decomposition::has_fine(const std::string& id) const {
  return std::any_of(fine_.begin(), fine_.end(), [&](const Submodule& s) { return s.id == id; });
}

bool Decomposition::has_coarse(const std::string& id) const {
  return std::any_of(coarse_.begin(), coarse_.end(),
                     [&](const Submodule& s) { return s.id == id; });
}

std::vector<std::string> Decomposition::expand_id(const std::string& id) const {
  if (has_fine(id)) return {id};
  if (!has_coarse(id)) fail(errc::coverage_error, "unknown submodule id '" + id + "' in " + spec_.str());

  std::vector<std::string> out;
  if (id == "n") {
    for (const Submodule& s : fine_) {
      switch (s.kind) {
        case Submodule::Kind::center_n:
        case Submodule::Kind::simple_n:
        case Submodule::Kind::so4_ideal:
        case Submodule::Kind::trivial_line:
          out.push_back(s.id);
          break;
        default:
          break;
      }
    }
    return out;
  }
  const Submodule& c = coarse(id);
  if (c.i == 0) {
    for (const Submodule& s : fine_)
      if (s.kind == Submodule::Kind::strand_m0j && s.i == c.j) out.push_back(s.id);
  } else {
    for (const Submodule& s : fine_)
      if (s.kind == Submodule::Kind::v_split && s.i == c.i && s.j == c.j) out.push_back(s.id);
  }
  if (out.empty()) fail(errc::coverage_error, "submodule '" + id + "' has no fine constituents");
  return out;
}

std::pair<int, int> Decomposition::block_range(int j) const {
  const int n0 = spec_.n0();
  if (j == 0) return {1, n0};
  int first = n0 + 1;
  for (int k = 1; k < j; ++k) first += spec_.parts[static_cast<size_t>(k - 1)];
  return {first, first + spec_.parts[static_cast<size_t>(j - 1)] - 1};
}

Eigen::VectorXd Decomposition::to_g(const Element& x) const {
  const Eigen::VectorXd& g = algebra_->gram();
  Eigen::VectorXd y(x.coeffs.size());
  for (int k = 0; k < y.size(); ++k) y[k] = x.coeffs[k] * std::sqrt(g[k]);
  return y;
}

Eigen::VectorXd Decomposition::project_m(const Element& x) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m_dim());
  const Eigen::VectorXd& g = algebra_->gram();
  for (int k = 0; k < x.coeffs.size(); ++k) {
    int idx = m_index_[static_cast<size_t>(k)];
    if (idx >= 0) y[idx] = x.coeffs[k] * std::sqrt(g[k]);
  }
  return y;
}

Eigen::VectorXd Decomposition::project_h(const Element& x) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(h_dim());
  const Eigen::VectorXd& g = algebra_->gram();
  for (int k = 0; k < x.coeffs.size(); ++k) {
    int idx = h_index_[static_cast<size_t>(k)];
    if (idx >= 0) y[idx] = x.coeffs[k] * std::sqrt(g[k]);
  }
  return y;
}

Eigen::VectorXd Decomposition::to_m(const Element& x, double tol) const {
  double h_part = project_h(x).norm();
  double scale = std::max(1.0, to_g(x).norm());
  if (h_part > tol * scale) {
    fail(errc::domain_error, "element has h-component of B-norm " + std::to_string(h_part) +
                                 ", not in m");
  }
  return project_m(x);
}

Element Decomposition::from_m(const Eigen::VectorXd& m_coords) const {
  if (m_coords.size() != m_dim()) {
    fail(errc::shape_error, "m-frame vector has length " + std::to_string(m_coords.size()) +
                                ", expected " + std::to_string(m_dim()));
  }
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(algebra_->dim());
  const Eigen::VectorXd& g = algebra_->gram();
  for (int k = 0; k < coeffs.size(); ++k) {
    int idx = m_index_[static_cast<size_t>(k)];
    if (idx >= 0) coeffs[k] = m_coords[idx] / std::sqrt(g[k]);
  }
  return algebra_->from_coeffs(std::move(coeffs));
}

Element Decomposition::from_h(const Eigen::VectorXd& h_coords) const {
  if (h_coords.size() != h_dim()) {
    fail(errc::shape_error, "h-frame vector has length " + std::to_string(h_coords.size()) +
                                ", expected " + std::to_string(h_dim()));
  }
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(algebra_->dim());
  const Eigen::VectorXd& g = algebra_->gram();
  for (int k = 0; k < coeffs.size(); ++k) {
    int idx = h_index_[static_cast<size_t>(k)];
    if (idx >= 0) coeffs[k] = h_coords[idx] / std::sqrt(g[k]);
  }
  return algebra_->from_coeffs(std::move(coeffs));
}

std::vector<std::string> Decomposition::m_labels() const {
  std::vector<std::string> out(static_cast<size_t>(m_dim()));
  for (int k = 0; k < algebra_->dim(); ++k) {
    int idx = m_index_[static_cast<size_t>(k)];
    if (idx >= 0) out[static_cast<size_t>(idx)] = algebra_->label(k).str();
  }
  return out;
}

std::vector<Element> Decomposition::h_plus_n_basis() const {
  std::vector<Element> out = h_basis_;
  if (has_coarse("n")) {
    const Submodule& nb = coarse("n");
    out.insert(out.end(), nb.basis.begin(), nb.basis.end());
  }
  return out;
}

namespace {

// B-orthonormal coordinates of a submodule basis in the m-frame, via
// modified Gram-Schmidt (the catalog bases are already B-orthogonal, so
// this mostly just rescales).
Eigen::MatrixXd orthonormalize(const Decomposition& dec, const std::vector<Element>& basis) {
  Eigen::MatrixXd onb(dec.m_dim(), static_cast<int>(basis.size()));
  for (size_t k = 0; k < basis.size(); ++k) {
    Eigen::VectorXd v = dec.to_m(basis[k]);
    for (int p = 0; p < static_cast<int>(k); ++p) v -= onb.col(p).dot(v) * onb.col(p);
    double nrm = v.norm();
    if (nrm < 1e-12) fail(errc::precondition_error, "degenerate submodule basis");
    onb.col(static_cast<int>(k)) = v / nrm;
  }
  return onb;
}

bool in_block(int index, std::pair<int, int> range) {
  return index >= range.first && index <= range.second;
}

}  // namespace

Decomposition decompose(const SpaceSpec& spec) {
  validate_spec(spec);

  Decomposition dec;
  dec.spec_ = spec;
  dec.algebra_ = build_algebra(spec.family, spec.n);
  const Algebra& alg = *dec.algebra_;
  const int n0 = spec.n0();
  const int s = static_cast<int>(spec.parts.size());

  // Block index of a matrix row/column: 0 for the identity block, 1..s for
  // the H blocks.
  auto block_of = [&](int index) {
    if (index <= n0) return 0;
    int upper = n0;
    for (int j = 1; j <= s; ++j) {
      upper += spec.parts[static_cast<size_t>(j - 1)];
      if (index <= upper) return j;
    }
    fail(errc::precondition_error, "index out of range");
  };

  // h = block-diagonal so(n_j) / u(n_j); m = the B-orthogonal rest.
  dec.m_index_.assign(static_cast<size_t>(alg.dim()), -1);
  dec.h_index_.assign(static_cast<size_t>(alg.dim()), -1);
  for (int k = 0; k < alg.dim(); ++k) {
    const BasisLabel& l = alg.label(k);
    int ba = block_of(l.a);
    int bb = block_of(l.b);
    bool in_h = (ba == bb && ba >= 1);
    if (in_h) {
      dec.h_index_[static_cast<size_t>(k)] = static_cast<int>(dec.h_basis_.size());
      dec.h_basis_.push_back(alg.basis_element(k));
    } else {
      dec.m_index_[static_cast<size_t>(k)] = static_cast<int>(dec.m_basis_.size());
      dec.m_basis_.push_back(alg.basis_element(k));
    }
  }

  // Labels with row index in block bi and column index in block bj; callers
  // pass bi <= bj, and every label has a <= b, so the test is direct.
  auto labels_in_blocks = [&](int bi, int bj) {
    std::vector<Element> out;
    auto ri = dec.block_range(bi);
    auto rj = dec.block_range(bj);
    for (int k = 0; k < alg.dim(); ++k) {
      const BasisLabel& l = alg.label(k);
      if (in_block(l.a, ri) && in_block(l.b, rj)) out.push_back(alg.basis_element(k));
    }
    return out;
  };

  // Coarse catalog: the n block (when present) followed by every m_{i,j}.
  if (n0 >= 1) {
    Submodule nblock;
    nblock.id = "n";
    nblock.kind = spec.family == Family::SO ? Submodule::Kind::trivial_line
                                            : Submodule::Kind::center_n;
    nblock.i = 0;
    nblock.j = 0;
    nblock.basis = labels_in_blocks(0, 0);
    if (!nblock.basis.empty()) dec.coarse_.push_back(std::move(nblock));
  }
  for (int i = 0; i <= s; ++i) {
    for (int j = std::max(1, i + 1); j <= s; ++j) {
      if (i == 0 && n0 == 0) continue;
      Submodule m;
      m.id = "m_{" + std::to_string(i) + "," + std::to_string(j) + "}";
      m.kind = i == 0 ? Submodule::Kind::strand_m0j : Submodule::Kind::m_ij;
      m.i = i;
      m.j = j;
      m.basis = labels_in_blocks(i, j);
      dec.coarse_.push_back(std::move(m));
    }
  }

  // Fine catalog: pieces of n, then the strands of each m_{0,j}, then the
  // cross blocks m_{i,j} (split into V-spans when SO and n_i = n_j = 2).
  if (spec.family == Family::SO && n0 == 4) {
    auto e = [&](int a, int b) { return alg.basis_element({BasisLabel::Kind::e, a, b}); };
    Submodule n1;
    n1.id = "n1(so4)";
    n1.kind = Submodule::Kind::so4_ideal;
    n1.basis = {e(1, 2) + e(3, 4), -1.0 * e(1, 3) + e(2, 4), e(2, 3) + e(1, 4)};
    Submodule n2;
    n2.id = "n2(so4)";
    n2.kind = Submodule::Kind::so4_ideal;
    n2.basis = {e(1, 2) - e(3, 4), -1.0 * e(1, 3) - e(2, 4), e(2, 3) - e(1, 4)};
    dec.fine_.push_back(std::move(n1));
    dec.fine_.push_back(std::move(n2));
  } else if (spec.family == Family::SO && n0 >= 2) {
    for (int a = 1; a <= n0; ++a) {
      for (int b = a + 1; b <= n0; ++b) {
        Submodule t;
        t.id = "triv_{" + std::to_string(a) + "," + std::to_string(b) + "}";
        t.kind = Submodule::Kind::trivial_line;
        t.i = a;
        t.j = b;
        t.basis = {alg.basis_element({BasisLabel::Kind::e, a, b})};
        dec.fine_.push_back(std::move(t));
      }
    }
  } else if (spec.family == Family::U && n0 >= 1) {
    Submodule z;
    z.id = "z(n)";
    z.kind = Submodule::Kind::center_n;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(alg.dim());
    for (int a = 1; a <= n0; ++a) c[alg.index_of({BasisLabel::Kind::f, a, a})] = 1.0;
    z.basis = {alg.from_coeffs(std::move(c))};
    dec.fine_.push_back(std::move(z));
    if (n0 >= 2) {
      Submodule su;
      su.id = "su(n0)";
      su.kind = Submodule::Kind::simple_n;
      for (int a = 1; a <= n0; ++a)
        for (int b = a + 1; b <= n0; ++b)
          su.basis.push_back(alg.basis_element({BasisLabel::Kind::e, a, b}));
      for (int a = 1; a <= n0; ++a)
        for (int b = a + 1; b <= n0; ++b)
          su.basis.push_back(alg.basis_element({BasisLabel::Kind::f, a, b}));
      // traceless diagonal directions f_11 + ... + f_kk - k f_{k+1,k+1}
      for (int k = 1; k < n0; ++k) {
        Eigen::VectorXd d = Eigen::VectorXd::Zero(alg.dim());
        for (int a = 1; a <= k; ++a) d[alg.index_of({BasisLabel::Kind::f, a, a})] = 1.0;
        d[alg.index_of({BasisLabel::Kind::f, k + 1, k + 1})] = -static_cast<double>(k);
        su.basis.push_back(alg.from_coeffs(std::move(d)));
      }
      dec.fine_.push_back(std::move(su));
    }
  }

  for (int j = 1; j <= s; ++j) {
    for (int l = 1; l <= n0; ++l) {
      Submodule strand;
      strand.id = "m^{" + std::to_string(j) + "}_{" + std::to_string(l) + "}";
      strand.kind = Submodule::Kind::strand_m0j;
      strand.i = j;  // block index
      strand.j = l;  // row index within the identity block
      auto rj = dec.block_range(j);
      for (int b = rj.first; b <= rj.second; ++b)
        strand.basis.push_back(alg.basis_element({BasisLabel::Kind::e, l, b}));
      if (spec.family == Family::U) {
        for (int b = rj.first; b <= rj.second; ++b)
          strand.basis.push_back(alg.basis_element({BasisLabel::Kind::f, l, b}));
      }
      dec.fine_.push_back(std::move(strand));
    }
  }

  for (int i = 1; i <= s; ++i) {
    for (int j = i + 1; j <= s; ++j) {
      bool split = spec.family == Family::SO && spec.parts[static_cast<size_t>(i - 1)] == 2 &&
                   spec.parts[static_cast<size_t>(j - 1)] == 2;
      if (split) {
        auto ri = dec.block_range(i);
        auto rj = dec.block_range(j);
        const int I = ri.first, K = ri.first + 1, J = rj.first, L = rj.first + 1;
        auto e = [&](int a, int b) { return alg.basis_element({BasisLabel::Kind::e, a, b}); };
        Submodule v1;
        v1.id = "V1_{" + std::to_string(i) + "," + std::to_string(j) + "}";
        v1.kind = Submodule::Kind::v_split;
        v1.i = i;
        v1.j = j;
        v1.basis = {e(I, J) - e(K, L), e(I, L) + e(K, J)};
        Submodule v2;
        v2.id = "V2_{" + std::to_string(i) + "," + std::to_string(j) + "}";
        v2.kind = Submodule::Kind::v_split;
        v2.i = i;
        v2.j = j;
        v2.basis = {e(I, J) + e(K, L), e(I, L) - e(K, J)};
        dec.fine_.push_back(std::move(v1));
        dec.fine_.push_back(std::move(v2));
      } else {
        Submodule m;
        m.id = "m_{" + std::to_string(i) + "," + std::to_string(j) + "}";
        m.kind = Submodule::Kind::m_ij;
        m.i = i;
        m.j = j;
        m.basis = labels_in_blocks(i, j);
        dec.fine_.push_back(std::move(m));
      }
    }
  }

  for (Submodule& sm : dec.coarse_) sm.onb = orthonormalize(dec, sm.basis);
  for (Submodule& sm : dec.fine_) sm.onb = orthonormalize(dec, sm.basis);

  // ad(h)|_m in the orthonormal frames, shared by the metric validator and
  // the geodesic least-squares solver.
  dec.h_ad_m_.reserve(dec.h_basis_.size());
  for (const Element& h : dec.h_basis_) {
    Eigen::MatrixXd ad(dec.m_dim(), dec.m_dim());
    for (int c = 0; c < dec.m_dim(); ++c) {
      const Element& mc = dec.m_basis_[static_cast<size_t>(c)];
      ad.col(c) = dec.project_m(bracket(h, mc)) / mc.norm();
    }
    ad /= h.norm();
    dec.h_ad_m_.push_back(std::move(ad));
  }
  return dec;
}

std::vector<Element> normalizer(const SpaceSpec& spec) {
  Decomposition dec = decompose(spec);
  const Algebra& alg = *dec.algebra();
  const int gd = alg.dim();
  const int md = dec.m_dim();
  const int hd = dec.h_dim();

  if (hd == 0 || md == 0) {
    // [g, h] subset h holds trivially; the normalizer is all of g.
    std::vector<Element> out;
    for (int k = 0; k < gd; ++k) out.push_back(alg.basis_element(k));
    return out;
  }

  // Rows: the m-projection of [u_k, a_r] over all h basis vectors a_r,
  // columns over the orthonormal g-frame u_k.
  Eigen::MatrixXd sys(static_cast<Eigen::Index>(md) * hd, gd);
  for (int k = 0; k < gd; ++k) {
    Element u = alg.from_coeffs(Eigen::VectorXd::Unit(gd, k) /
                                std::sqrt(alg.gram()[k]));
    for (int r = 0; r < hd; ++r) {
      Element br = bracket(u, dec.h_basis()[static_cast<size_t>(r)]);
      sys.block(static_cast<Eigen::Index>(r) * md, k, md, 1) = dec.project_m(br);
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double cutoff = 1e-10 * std::max(1.0, sv.size() > 0 ? sv[0] : 0.0);
  int rank = 0;
  for (int k = 0; k < sv.size(); ++k)
    if (sv[k] > cutoff) ++rank;

  std::vector<Element> out;
  for (int k = rank; k < gd; ++k) {
    Eigen::VectorXd g_coords = svd.matrixV().col(k);
    Eigen::VectorXd coeffs(gd);
    for (int r = 0; r < gd; ++r) coeffs[r] = g_coords[r] / std::sqrt(alg.gram()[r]);
    out.push_back(alg.from_coeffs(std::move(coeffs)));
  }
  return out;
}

Eigen::MatrixXd action_matrix(const Decomposition& dec, const Element& a, const Submodule& s,
                              double tol) {
  if (!a.algebra || !a.algebra->same_as(*dec.algebra())) {
    fail(errc::algebra_mismatch, "action element defined over a different algebra");
  }

  // a must lie in h (+) n, i.e. have no coefficient on a cross-block label.
  const int n0 = dec.spec().n0();
  double scale = std::max(1.0, dec.to_g(a).norm());
  for (int k = 0; k < a.coeffs.size(); ++k) {
    if (std::abs(a.coeffs[k]) < 1e-14) continue;
    const BasisLabel& l = dec.algebra()->label(k);
    bool in_n = l.b <= n0;
    if (!in_n && !dec.label_in_h(k)) {
      fail(errc::domain_error, "action element has component on " + l.str() +
                                   ", outside h (+) n");
    }
  }

  const int d = s.dim();
  Eigen::MatrixXd out(d, d);
  double worst = 0.0;
  for (int c = 0; c < d; ++c) {
    Element basis_vec = dec.from_m(s.onb.col(c));
    Element br = bracket(a, basis_vec);
    Eigen::VectorXd ym = dec.project_m(br);
    Eigen::VectorXd inside = s.onb.transpose() * ym;
    double residual = std::sqrt((ym - s.onb * inside).squaredNorm() +
                                dec.project_h(br).squaredNorm());
    worst = std::max(worst, residual / scale);
    out.col(c) = inside;
  }
  if (worst > tol) {
    fail(errc::invariance_violation, "[a, " + s.id + "] leaves " + s.id +
                                         ", relative residual " + std::to_string(worst));
  }
  return out;
}

}  // namespace gomet
