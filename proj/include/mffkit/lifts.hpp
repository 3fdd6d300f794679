#pragma once

#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "json.hpp"
#include "mffkit/cover.hpp"

namespace mffkit {

using Rational = boost::rational<long long>;

std::string to_string(const Rational& q);
Rational parse_rational(const std::string& text);

/// Permutation representation of G on the right cosets H\G. Points are read
/// by paths: the coset Hu is the endpoint of u read from the base.
struct CosetAction {
  int degree = 1;
  std::vector<std::vector<int>> perms;  ///< perms[g - 1][point]
  std::vector<std::vector<int>> inverses;

  /// Validates that every entry is a permutation of {0..degree-1}.
  static CosetAction from_perms(int degree, std::vector<std::vector<int>> perms);
  int apply(int point, const Word& w) const;
};

/// Throws InputError when the cover is not complete.
CosetAction coset_action(const CoverGraph& g);

/// Size of the <w>-orbit of the coset, i.e. least t > 0 with w^t fixing it.
int multiplicity(const CosetAction& action, const Word& w, int coset);

struct LiftEntry {
  int coset = 0;          ///< least coset index of the orbit
  Word path;              ///< transversal word from the base to that coset
  Word representative;    ///< g_i = path^{-1}
  int multiplicity = 1;   ///< m_i
  Word lift;              ///< g_i^{-1} w^{m_i} g_i = path w^{m_i} path^{-1}
  std::optional<Word> rewrite;  ///< lift over the basis letters of the subgroup
};

struct CompleteLift {
  Word word;
  int index = 1;
  std::vector<LiftEntry> entries;

  int total_multiplicity() const;
  std::vector<Word> lift_words() const;
  std::vector<Word> rewrites() const;  ///< throws if an entry lacks a rewrite
};

/// One entry per <w>-orbit on the cosets, scanned in increasing coset order,
/// so the base orbit comes first with the identity representative. Paths are
/// read off the spanning tree of `basis`, which also supplies the rewrites.
CompleteLift complete_lift(const CoverGraph& g, const Word& w, const SpanningTreeBasis& basis);
/// Uses basis_from_tree(g).
CompleteLift complete_lift(const CoverGraph& g, const Word& w);

struct FreeLiftReport {
  bool accepted = false;
  int entries = 0;
  int folded_rank = 0;          ///< rank of fold(lift words)
  bool members = false;         ///< every lift word lies in the subgroup
  std::string reason;
};

/// Lift words form a free basis of the subgroup they generate, checked by
/// folding, and all lie in the subgroup of the cover.
FreeLiftReport verify_free_lift(const CompleteLift& lift, const CoverGraph& subgroup_cover);

/// a + b * C' with exact rational coefficients; C' is never given a value.
struct AffineCost {
  Rational constant{0};
  Rational atom{0};
  friend bool operator==(const AffineCost&, const AffineCost&) = default;
};
std::string to_string(const AffineCost& c);

struct CostLedger {
  int index = 1;
  int lifts = 1;
  Rational mu_x{1};
  AffineCost graphing;    ///< mu(Y) + (k - 1) mu(X) + C(Phi')
  AffineCost relation;    ///< (n - 1) mu(X) + C(E_H^X) with C(E_H^X) = k mu(X) + C(E')
  AffineCost target;      ///< (n + k - 1) mu(X) + C'
  bool holds = false;
};

/// Throws InputError unless 1 <= k <= n and mu_x * n = 1.
CostLedger cost_ledger(int n, int k, const Rational& mu_x);

nlohmann::json lift_to_json(const CompleteLift& lift);
CompleteLift lift_from_json(const nlohmann::json& j);
nlohmann::json ledger_to_json(const CostLedger& ledger);

}  // namespace mffkit
