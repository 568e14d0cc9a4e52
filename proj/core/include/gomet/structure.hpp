#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gomet/decomposition.hpp"

namespace gomet {

enum class ActionAlgebra { h, normalizer };

/// Dimension of the space of intertwiners s1 -> s2 (linear maps commuting
/// with the chosen subalgebra action), via the nullspace of the stacked
/// Sylvester system. Zero certifies inequivalence. Note dim 2 for a module
/// against itself signals complex-type endomorphisms, not reducibility.
int hom_dimension(const Decomposition& dec, const Submodule& s1, const Submodule& s2,
                  ActionAlgebra under);

/// Searches h for a vector a with [a, x] = 0 and [a, y] != 0, the separating
/// certificate for inequivalence. Thresholds: |[a,x]| < 1e-10 and
/// |[a,y]| > 1e-3 |a| |y| (all B-norms). Empty when no such a exists.
std::optional<Element> inequivalence_witness(const Decomposition& dec, const Submodule& s1,
                                             const Submodule& s2, const Element& x,
                                             const Element& y);

/// Largest relative B-norm, over basis pairs x in s1, y in s2, of the
/// projection of [x, y] onto the orthogonal complement of s1 (+) s2 in m.
double bracket_projection(const Decomposition& dec, const Submodule& s1, const Submodule& s2);

/// Same, projecting onto a specific target submodule.
double bracket_projection(const Decomposition& dec, const Submodule& s1, const Submodule& s2,
                          const Submodule& target);

struct MergeEvent {
  enum class Rule { pair, triple };
  std::vector<std::string> merged;   // fine ids, catalog order
  Rule rule;
  std::vector<std::string> witness;  // the basis pair whose bracket certified the merge
  double magnitude = 0.0;
};

std::string to_string(MergeEvent::Rule rule);

/// Partition of the fine catalog into classes forced to share a metric
/// eigenvalue, with the log of effective merges. Replaying the log yields
/// the same partition.
class EigenvalueClasses {
 public:
  explicit EigenvalueClasses(std::vector<std::string> ids);

  bool merge(const std::string& a, const std::string& b);  // true if it changed the partition
  bool same_class(const std::string& a, const std::string& b) const;
  int class_count() const;

  /// Classes as sorted lists, ordered by first member's catalog position.
  std::vector<std::vector<std::string>> classes() const;

  std::vector<MergeEvent> merges;

 private:
  int find(int k) const;
  int index(const std::string& id) const;

  std::vector<std::string> ids_;
  mutable std::vector<int> parent_;
};

/// Scans bracket projections over the fine catalog and merges eigenvalue
/// classes: a pair merges when [s1, s2] leaks outside s1 (+) s2, and a
/// third module joins when the leak hits it. The scan order is fixed by the
/// catalog; scan_order (a permutation of fine indices) exists to exercise
/// order independence and does not change the resulting partition.
EigenvalueClasses derive_constraints(const Decomposition& dec,
                                     const std::vector<int>& scan_order = {});

/// Threshold separating true zeros of the bracket algebra from rounding.
inline constexpr double kProjectionThreshold = 1e-8;

}  // namespace gomet
