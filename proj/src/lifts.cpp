#include "mffkit/lifts.hpp"

#include <cstdlib>

namespace mffkit {

std::string to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

Rational parse_rational(const std::string& text) {
  try {
    auto slash = text.find('/');
    std::size_t used = 0;
    long long num = std::stoll(text.substr(0, slash), &used);
    if (used != (slash == std::string::npos ? text.size() : slash)) throw std::invalid_argument("junk");
    if (slash == std::string::npos) return Rational(num);
    std::string den_text = text.substr(slash + 1);
    long long den = std::stoll(den_text, &used);
    if (used != den_text.size() || den == 0) throw std::invalid_argument("junk");
    return Rational(num, den);
  } catch (const std::exception&) {
    throw ParseError("expected a rational p/q, got '" + text + "'", 1, 1);
  }
}

CosetAction CosetAction::from_perms(int degree, std::vector<std::vector<int>> perms) {
  if (degree < 1) throw InputError("coset action needs degree >= 1");
  CosetAction a;
  a.degree = degree;
  for (const auto& p : perms) {
    if (static_cast<int>(p.size()) != degree) throw InputError("permutation has the wrong degree");
    std::vector<int> inv(static_cast<std::size_t>(degree), -1);
    for (int x = 0; x < degree; ++x) {
      int y = p[static_cast<std::size_t>(x)];
      if (y < 0 || y >= degree || inv[static_cast<std::size_t>(y)] >= 0) throw InputError("generator does not act as a permutation");
      inv[static_cast<std::size_t>(y)] = x;
    }
    a.inverses.push_back(std::move(inv));
  }
  a.perms = std::move(perms);
  return a;
}

int CosetAction::apply(int point, const Word& w) const {
  for (Letter l : w.letters()) {
    const auto& p = l > 0 ? perms.at(static_cast<std::size_t>(l - 1)) : inverses.at(static_cast<std::size_t>(-l - 1));
    point = p[static_cast<std::size_t>(point)];
  }
  return point;
}

CosetAction coset_action(const CoverGraph& g) {
  if (!g.is_complete()) throw InputError("cover is not complete; the subgroup has infinite index");
  std::vector<std::vector<int>> perms;
  for (int gen = 1; gen <= g.rank(); ++gen) perms.push_back(g.map(gen));
  return CosetAction::from_perms(g.vertex_count(), std::move(perms));
}

int multiplicity(const CosetAction& action, const Word& w, int coset) {
  if (coset < 0 || coset >= action.degree) throw InputError("coset out of range");
  int t = 1;
  for (int c = action.apply(coset, w); c != coset; c = action.apply(c, w)) ++t;
  return t;
}

int CompleteLift::total_multiplicity() const {
  int s = 0;
  for (const auto& e : entries) s += e.multiplicity;
  return s;
}

std::vector<Word> CompleteLift::lift_words() const {
  std::vector<Word> out;
  for (const auto& e : entries) out.push_back(e.lift);
  return out;
}

std::vector<Word> CompleteLift::rewrites() const {
  std::vector<Word> out;
  for (const auto& e : entries) {
    if (!e.rewrite) throw InputError("lift entry has no rewrite");
    out.push_back(*e.rewrite);
  }
  return out;
}

CompleteLift complete_lift(const CoverGraph& g, const Word& w, const SpanningTreeBasis& basis) {
  check_alphabet(w, Alphabet(g.rank()));
  CosetAction action = coset_action(g);
  CompleteLift out{w, action.degree, {}};
  std::vector<char> seen(static_cast<std::size_t>(action.degree), 0);
  for (int c = 0; c < action.degree; ++c) {
    if (seen[static_cast<std::size_t>(c)]) continue;
    int m = 0;
    for (int x = c; !seen[static_cast<std::size_t>(x)]; x = action.apply(x, w)) {
      seen[static_cast<std::size_t>(x)] = 1;
      ++m;
    }
    LiftEntry e;
    e.coset = c;
    e.path = basis.transversal.at(static_cast<std::size_t>(c));
    e.representative = e.path.inverse();
    e.multiplicity = m;
    e.lift = e.path * w.power(m) * e.path.inverse();
    e.rewrite = rewrite_in_basis(g, basis, e.lift);
    out.entries.push_back(std::move(e));
  }
  return out;
}

CompleteLift complete_lift(const CoverGraph& g, const Word& w) { return complete_lift(g, w, basis_from_tree(g)); }

FreeLiftReport verify_free_lift(const CompleteLift& lift, const CoverGraph& subgroup_cover) {
  FreeLiftReport r;
  r.entries = static_cast<int>(lift.entries.size());
  r.members = true;
  for (const auto& e : lift.entries) r.members = r.members && membership(subgroup_cover, e.lift);
  std::vector<Word> words = lift.lift_words();
  bool trivial = false;
  for (const auto& w : words) trivial = trivial || w.empty();
  r.folded_rank = trivial ? -1 : fold(subgroup_cover.rank(), words).subgroup_rank();
  if (!r.members) {
    r.reason = "a lift word is not in the subgroup";
  } else if (trivial) {
    r.reason = "a lift word is trivial";
  } else if (r.folded_rank != r.entries) {
    r.reason = "folded rank " + std::to_string(r.folded_rank) + " != " + std::to_string(r.entries) + " lift words";
  }
  r.accepted = r.reason.empty();
  return r;
}

std::string to_string(const AffineCost& c) {
  std::string s = to_string(c.constant);
  if (c.atom != Rational(0)) s += " + " + (c.atom == Rational(1) ? std::string() : to_string(c.atom) + "*") + "C'";
  return s;
}

CostLedger cost_ledger(int n, int k, const Rational& mu_x) {
  if (n < 1 || k < 1 || k > n) throw InputError("cost ledger needs 1 <= k <= n");
  if (mu_x * n != Rational(1)) throw InputError("inconsistent normalization: mu(X) * n = " + to_string(mu_x * n) + ", expected 1");
  CostLedger l{n, k, mu_x, {}, {}, {}, false};
  const Rational mu_y = mu_x * n;
  // C(Phi) for Phi = {w, phi_2, ..., phi_k} u Phi'; w is defined on all of Y.
  l.graphing = {mu_y + Rational(k - 1) * mu_x, Rational(1)};
  // Complete-section formula, then C(E_H^X) = k mu(X) + C(E') since K is free of rank k.
  const AffineCost restricted{Rational(k) * mu_x, Rational(1)};
  l.relation = {Rational(n - 1) * mu_x + restricted.constant, restricted.atom};
  l.target = {Rational(n + k - 1) * mu_x, Rational(1)};
  l.holds = l.graphing == l.target && l.relation == l.target;
  return l;
}

namespace {
nlohmann::json optional_word(const std::optional<Word>& w) {
  return w ? nlohmann::json(to_string(*w)) : nlohmann::json(nullptr);
}
}  // namespace

nlohmann::json lift_to_json(const CompleteLift& lift) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : lift.entries) {
    entries.push_back({{"coset", e.coset},
                       {"path", to_string(e.path)},
                       {"representative", to_string(e.representative)},
                       {"multiplicity", e.multiplicity},
                       {"lift", to_string(e.lift)},
                       {"rewrite", optional_word(e.rewrite)}});
  }
  return {{"word", to_string(lift.word)}, {"index", lift.index}, {"entries", entries}};
}

CompleteLift lift_from_json(const nlohmann::json& j) {
  try {
    CompleteLift out;
    out.word = parse_word(j.at("word").get<std::string>());
    out.index = j.at("index").get<int>();
    for (const auto& e : j.at("entries")) {
      LiftEntry entry;
      entry.coset = e.at("coset").get<int>();
      entry.path = parse_word(e.at("path").get<std::string>());
      entry.representative = parse_word(e.at("representative").get<std::string>());
      entry.multiplicity = e.at("multiplicity").get<int>();
      entry.lift = parse_word(e.at("lift").get<std::string>());
      if (e.contains("rewrite") && !e.at("rewrite").is_null()) entry.rewrite = parse_word(e.at("rewrite").get<std::string>());
      out.entries.push_back(std::move(entry));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed lift JSON: ") + e.what());
  }
}

nlohmann::json ledger_to_json(const CostLedger& l) {
  return {{"index", l.index},
          {"lifts", l.lifts},
          {"mu_x", to_string(l.mu_x)},
          {"graphing_cost", to_string(l.graphing)},
          {"relation_cost", to_string(l.relation)},
          {"target", to_string(l.target)},
          {"holds", l.holds}};
}

}  // namespace mffkit
