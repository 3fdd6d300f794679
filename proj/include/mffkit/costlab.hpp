#pragma once

#include <vector>

#include "json.hpp"
#include "mffkit/cover.hpp"
#include "mffkit/lifts.hpp"

namespace mffkit {

/// Finite probability space: positive rational weights summing to 1.
class FiniteSpace {
 public:
  explicit FiniteSpace(std::vector<Rational> weights);
  static FiniteSpace uniform(int points);

  int size() const noexcept { return static_cast<int>(weights_.size()); }
  const Rational& weight(int x) const { return weights_.at(static_cast<std::size_t>(x)); }
  const std::vector<Rational>& weights() const noexcept { return weights_; }
  Rational mass(const std::vector<int>& points) const;

 private:
  std::vector<Rational> weights_;
};

/// Injective partial map on points; map[x] = -1 where undefined.
struct PartialBijection {
  std::vector<int> map;

  static PartialBijection from_map(std::vector<int> map);  ///< validates injectivity
  std::vector<int> domain() const;
  bool defined(int x) const { return map.at(static_cast<std::size_t>(x)) >= 0; }
};

using Graphing = std::vector<PartialBijection>;

/// Partition of {0..n-1}; class ids are numbered by first occurrence.
class FiniteRelation {
 public:
  explicit FiniteRelation(std::vector<int> class_of);
  static FiniteRelation singletons(int n);
  static FiniteRelation from_classes(int n, const std::vector<std::vector<int>>& classes);

  int size() const noexcept { return static_cast<int>(class_of_.size()); }
  int class_count() const noexcept { return classes_; }
  int class_of(int x) const { return class_of_.at(static_cast<std::size_t>(x)); }
  std::vector<std::vector<int>> classes() const;
  bool related(int x, int y) const { return class_of(x) == class_of(y); }
  /// Every class of *this lies inside a class of coarser.
  bool refines(const FiniteRelation& coarser) const;

  friend bool operator==(const FiniteRelation&, const FiniteRelation&) = default;

 private:
  std::vector<int> class_of_;
  int classes_ = 0;
};

/// Smallest relation containing both.
FiniteRelation join(const FiniteRelation& e1, const FiniteRelation& e2);

FiniteRelation generated_partition(int points, const Graphing& phi);

bool is_measure_preserving(const FiniteSpace& space, const PartialBijection& phi);
/// Sum of domain weights. Throws InputError on a map that does not preserve weights.
Rational cost(const FiniteSpace& space, const Graphing& phi);

/// Cost of the relation: per class, its weight minus one point weight (a
/// spanning tree). Throws InputError if some class is not of uniform weight,
/// since no measure-preserving graphing can generate it.
Rational relation_cost(const FiniteSpace& space, const FiniteRelation& e);

/// Throws InputError if phi does not generate e. Degenerate loops (phi(x) = x)
/// disqualify a graphing.
bool is_treeing(const FiniteSpace& space, const Graphing& phi, const FiniteRelation& e);

struct SectionReport {
  std::vector<int> section;        ///< sorted points of A
  FiniteRelation restricted;       ///< E|A on the points of A, in that order
  Rational lhs{0};                 ///< C(E)
  Rational restricted_cost{0};     ///< C_{mu|A}(E|A), weights not rescaled
  Rational complement{0};          ///< mu(X \ A)
  Rational rhs{0};
  bool holds = false;
};

/// Throws InputError if A misses a class or lists a point twice.
SectionReport restrict_and_check(const FiniteSpace& space, const FiniteRelation& e, std::vector<int> section);

/// Permutation action of a free group on a finite weighted space. Freeness is
/// audited only up to a word length bound.
struct FiniteAction {
  FiniteSpace space;
  std::vector<std::vector<int>> perms;
  int audit_bound = 0;
  bool free_to_bound = false;

  FiniteAction(FiniteSpace space, std::vector<std::vector<int>> perms, int audit_bound);
  int rank() const noexcept { return static_cast<int>(perms.size()); }
  int apply(int x, const Word& w) const;
  FiniteRelation orbit_relation() const;
  /// The generators as a graphing.
  Graphing graphing() const;

 private:
  std::vector<std::vector<int>> inverses_;
};

/// True iff no nontrivial reduced word of length <= bound fixes a point.
bool audit_free(const std::vector<std::vector<int>>& perms, int bound);

struct InductionReport {
  FiniteAction action;
  bool measure_total_one = false;  ///< rescaled union measure is a probability
  bool complete_section = false;   ///< X_0 meets every orbit
  bool restriction_matches = false;  ///< E_G restricted to X_0 equals E_H class for class
  int h_classes = 0;
  int restricted_classes = 0;
};

/// Induced action on X x {0..n-1}, point (x, v) stored as v * |X| + x. The
/// H-action supplies one permutation per basis letter of `basis`; H acts on
/// the right, so a word acts letter by letter.
InductionReport induce_action(const FiniteAction& h_action, const CoverGraph& cover, const SpanningTreeBasis& basis);

/// Throws InputError unless e1 and e2 refine e. True iff join(e1, e2) = e and
/// the two are orthogonal: the bipartite multigraph on e1- and e2-classes with
/// one edge per point is a forest.
bool check_free_product(const FiniteRelation& e, const FiniteRelation& e1, const FiniteRelation& e2);

nlohmann::json space_to_json(const FiniteSpace& s);
FiniteSpace space_from_json(const nlohmann::json& j);
nlohmann::json graphing_to_json(const Graphing& g);
Graphing graphing_from_json(const nlohmann::json& j, int points);
nlohmann::json relation_to_json(const FiniteRelation& e);
FiniteRelation relation_from_json(const nlohmann::json& j, int points);
nlohmann::json section_report_to_json(const SectionReport& r);

}  // namespace mffkit
