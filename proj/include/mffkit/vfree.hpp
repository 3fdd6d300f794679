#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mffkit/lifts.hpp"
#include "mffkit/word.hpp"

namespace mffkit {

/// One syllable g^e. Free generators take any nonzero exponent, torsion
/// generators an exponent in (0, order).
struct Syllable {
  int generator = 1;
  int exponent = 1;
  friend bool operator==(const Syllable&, const Syllable&) = default;
};

/// Normal form: adjacent syllables have distinct generators. Built only by
/// VFreeGroup, which knows the torsion orders.
class VFreeWord {
 public:
  VFreeWord() = default;
  const std::vector<Syllable>& syllables() const noexcept { return syllables_; }
  bool empty() const noexcept { return syllables_.empty(); }
  std::size_t size() const noexcept { return syllables_.size(); }
  friend bool operator==(const VFreeWord&, const VFreeWord&) = default;

 private:
  friend class VFreeGroup;
  explicit VFreeWord(std::vector<Syllable> s) : syllables_(std::move(s)) {}
  std::vector<Syllable> syllables_;
};

/// F_n * Z_{n_1} * ... * Z_{n_k}. Generators 1..n are free, n + j is s_j.
/// With no torsion this is the free group of rank n.
class VFreeGroup {
 public:
  VFreeGroup(int free_rank, std::vector<int> orders);
  static VFreeGroup free(int rank) { return VFreeGroup(rank, {}); }

  int free_rank() const noexcept { return free_rank_; }
  const std::vector<int>& orders() const noexcept { return orders_; }
  int generator_count() const noexcept { return free_rank_ + static_cast<int>(orders_.size()); }
  int torsion_generator(int j) const;  ///< generator index of s_j, 1-based j
  /// 0 for a free generator.
  int order(int generator) const;
  bool is_free() const noexcept { return orders_.empty(); }

  /// Merges adjacent syllables, reduces torsion exponents and drops trivial ones.
  VFreeWord normal_form(const std::vector<Syllable>& syllables) const;
  VFreeWord generator(int g, int exponent = 1) const { return normal_form({{g, exponent}}); }
  VFreeWord multiply(const VFreeWord& u, const VFreeWord& v) const;
  VFreeWord inverse(const VFreeWord& u) const;
  VFreeWord power(const VFreeWord& u, int e) const;
  /// c u c^{-1}
  VFreeWord conjugate(const VFreeWord& c, const VFreeWord& u) const;

  VFreeWord from_word(const Word& w) const;  ///< w over the free generators
  Word to_word(const VFreeWord& u) const;    ///< throws if u uses torsion

  /// Without torsion the plain word grammar. Otherwise free generators are
  /// a..r, torsion letters s1, s2^3, S1 (= s1^-1).
  VFreeWord parse(std::string_view text) const;
  std::string to_string(const VFreeWord& u) const;

  friend bool operator==(const VFreeGroup&, const VFreeGroup&) = default;

 private:
  int free_rank_;
  std::vector<int> orders_;
};

/// u = c core c^{-1} with core cyclically reduced in the free product.
struct VFreeCyclic {
  VFreeWord conjugator;
  VFreeWord core;
};
VFreeCyclic cyclic_reduction(const VFreeGroup& g, const VFreeWord& u);
/// Conjugate into a finite factor (or trivial).
bool has_finite_order(const VFreeGroup& g, const VFreeWord& u);

struct VFreeProperPower {
  VFreeWord root;
  int exponent = 0;
};
/// Maximal proper power decomposition of an element of infinite order;
/// nullopt for non-powers and for elements of finite order.
std::optional<VFreeProperPower> is_proper_power(const VFreeGroup& g, const VFreeWord& u);

/// v s_1^{p_1} ... s_k^{p_k}
VFreeWord make_vfree_word(const VFreeGroup& g, const Word& v, const std::vector<int>& powers);

/// K = <free generators, s_j for j != which>, and H generated by the
/// conjugates K_j = s^j K s^{-j}, s = s_which.
struct BranchedCoverSubgroup {
  VFreeGroup parent;
  int which = 1;
  int index = 2;
  VFreeGroup factor_group;  ///< presentation of K
  /// factors[j]: images in the parent of K's generators, conjugated by s^j
  std::vector<std::vector<VFreeWord>> factors;

  /// K generator index -> parent generator index.
  int parent_generator(int k_generator) const;
  /// s^j k s^{-j} for a word k of factor_group.
  VFreeWord embed(int j, const VFreeWord& k) const;
  /// The (parent) word of K generators as a factor_group word; throws if it uses s_which.
  VFreeWord restrict_to_factor(const VFreeWord& u) const;
};

/// which is 1-based; defaults to the last torsion factor.
BranchedCoverSubgroup branched_cover_subgroup(const VFreeGroup& g, std::optional<int> which = std::nullopt);

/// s_which acts as j -> j + 1 on {0..index-1}, everything else trivially.
CosetAction coset_action_vfree(const BranchedCoverSubgroup& sub);
int apply(const CosetAction& action, const VFreeWord& u);

/// Schreier generators s^i g s^{-(i.g)} are all factor generators or trivial,
/// and every factor generator fixes coset 0: the stabilizer of 0 is H.
bool verify_stabilizer(const BranchedCoverSubgroup& sub);
/// Rewrites every relator s_j^{n_j} from every coset by Schreier generators:
/// s_which^n rewrites to 1 and the others to the torsion relators of the
/// factors, so H is the free product of the K_j.
bool verify_reidemeister_schreier(const BranchedCoverSubgroup& sub);

struct VFreeLiftEntry {
  int coset = 0;
  VFreeWord representative;  ///< s^{-coset}
  int multiplicity = 1;
  VFreeWord lift;            ///< s^i w^m s^{-i}
  std::vector<int> factor_sequence;  ///< i, i + p, ..., i + (m - 1) p mod index
};

struct VFreeLift {
  VFreeWord word;
  VFreeWord u;   ///< w with its final s_which syllable removed
  int p = 0;     ///< exponent of that syllable, in [0, index)
  int d = 1;     ///< gcd(p, index)
  int m = 1;     ///< index / d
  std::vector<VFreeLiftEntry> entries;
  int total_multiplicity() const;
};

/// Throws InputError unless w = u s^p with u free of s = s_which.
VFreeLift complete_lift_vfree(const BranchedCoverSubgroup& sub, const VFreeWord& w);

/// u_{j_1} ... u_{j_m} for the entry's factor sequence.
VFreeWord lift_product(const BranchedCoverSubgroup& sub, const VFreeWord& u, const VFreeLiftEntry& entry);

nlohmann::json vfree_group_to_json(const VFreeGroup& g);
VFreeGroup vfree_group_from_json(const nlohmann::json& j);
nlohmann::json vfree_lift_to_json(const VFreeGroup& g, const VFreeLift& lift);

}  // namespace mffkit
