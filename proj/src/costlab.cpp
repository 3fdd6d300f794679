#include "mffkit/costlab.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>

#include <boost/pending/disjoint_sets.hpp>

namespace mffkit {

namespace {

using UnionFind = boost::disjoint_sets_with_storage<>;

std::vector<int> labels(UnionFind& uf, int n) {
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) out[static_cast<std::size_t>(x)] = static_cast<int>(uf.find_set(x));
  return out;
}

void check_point(int x, int n) {
  if (x < 0 || x >= n) throw InputError("point " + std::to_string(x) + " out of range");
}

}  // namespace

FiniteSpace::FiniteSpace(std::vector<Rational> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw InputError("space needs at least one point");
  Rational total(0);
  for (const auto& w : weights_) {
    if (w <= 0) throw InputError("point weights must be positive");
    total += w;
  }
  if (total != Rational(1)) throw InputError("point weights sum to " + to_string(total) + ", expected 1");
}

FiniteSpace FiniteSpace::uniform(int points) {
  if (points < 1) throw InputError("space needs at least one point");
  return FiniteSpace(std::vector<Rational>(static_cast<std::size_t>(points), Rational(1, points)));
}

Rational FiniteSpace::mass(const std::vector<int>& points) const {
  Rational m(0);
  for (int x : points) m += weight(x);
  return m;
}

PartialBijection PartialBijection::from_map(std::vector<int> map) {
  const int n = static_cast<int>(map.size());
  std::vector<char> hit(map.size(), 0);
  for (int t : map) {
    if (t == -1) continue;
    check_point(t, n);
    if (hit[static_cast<std::size_t>(t)]) throw InputError("partial bijection is not injective at " + std::to_string(t));
    hit[static_cast<std::size_t>(t)] = 1;
  }
  return PartialBijection{std::move(map)};
}

std::vector<int> PartialBijection::domain() const {
  std::vector<int> out;
  for (std::size_t x = 0; x < map.size(); ++x) {
    if (map[x] >= 0) out.push_back(static_cast<int>(x));
  }
  return out;
}

FiniteRelation::FiniteRelation(std::vector<int> class_of) : class_of_(std::move(class_of)) {
  std::map<int, int> renumber;
  for (auto& c : class_of_) {
    auto [it, inserted] = renumber.try_emplace(c, static_cast<int>(renumber.size()));
    c = it->second;
  }
  classes_ = static_cast<int>(renumber.size());
}

FiniteRelation FiniteRelation::singletons(int n) {
  std::vector<int> ids(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) ids[static_cast<std::size_t>(x)] = x;
  return FiniteRelation(std::move(ids));
}

FiniteRelation FiniteRelation::from_classes(int n, const std::vector<std::vector<int>>& classes) {
  std::vector<int> ids(static_cast<std::size_t>(n), -1);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (classes[c].empty()) throw InputError("relation classes must be nonempty");
    for (int x : classes[c]) {
      check_point(x, n);
      if (ids[static_cast<std::size_t>(x)] >= 0) throw InputError("point " + std::to_string(x) + " lies in two classes");
      ids[static_cast<std::size_t>(x)] = static_cast<int>(c);
    }
  }
  if (std::find(ids.begin(), ids.end(), -1) != ids.end()) throw InputError("relation classes do not cover the space");
  return FiniteRelation(std::move(ids));
}

std::vector<std::vector<int>> FiniteRelation::classes() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(classes_));
  for (int x = 0; x < size(); ++x) out[static_cast<std::size_t>(class_of(x))].push_back(x);
  return out;
}

bool FiniteRelation::refines(const FiniteRelation& coarser) const {
  if (coarser.size() != size()) return false;
  std::vector<int> image(static_cast<std::size_t>(classes_), -1);
  for (int x = 0; x < size(); ++x) {
    int& slot = image[static_cast<std::size_t>(class_of(x))];
    if (slot < 0) slot = coarser.class_of(x);
    if (slot != coarser.class_of(x)) return false;
  }
  return true;
}

FiniteRelation join(const FiniteRelation& e1, const FiniteRelation& e2) {
  if (e1.size() != e2.size()) throw InputError("relations on different spaces");
  const int n = e1.size();
  UnionFind uf(static_cast<std::size_t>(n));
  std::vector<int> first1(static_cast<std::size_t>(e1.class_count()), -1);
  std::vector<int> first2(static_cast<std::size_t>(e2.class_count()), -1);
  for (int x = 0; x < n; ++x) {
    for (auto [first, id] : {std::pair{&first1, e1.class_of(x)}, std::pair{&first2, e2.class_of(x)}}) {
      int& f = (*first)[static_cast<std::size_t>(id)];
      if (f < 0) {
        f = x;
      } else {
        uf.union_set(f, x);
      }
    }
  }
  return FiniteRelation(labels(uf, n));
}

FiniteRelation generated_partition(int points, const Graphing& phi) {
  UnionFind uf(static_cast<std::size_t>(points));
  for (const auto& f : phi) {
    if (static_cast<int>(f.map.size()) != points) throw InputError("graphing element on a different space");
    for (int x = 0; x < points; ++x) {
      if (f.defined(x)) uf.union_set(x, f.map[static_cast<std::size_t>(x)]);
    }
  }
  return FiniteRelation(labels(uf, points));
}

bool is_measure_preserving(const FiniteSpace& space, const PartialBijection& phi) {
  if (static_cast<int>(phi.map.size()) != space.size()) return false;
  for (int x = 0; x < space.size(); ++x) {
    if (phi.defined(x) && space.weight(x) != space.weight(phi.map[static_cast<std::size_t>(x)])) return false;
  }
  return true;
}

Rational cost(const FiniteSpace& space, const Graphing& phi) {
  Rational c(0);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (!is_measure_preserving(space, phi[i])) {
      throw InputError("graphing element " + std::to_string(i) + " is not measure preserving");
    }
    c += space.mass(phi[i].domain());
  }
  return c;
}

Rational relation_cost(const FiniteSpace& space, const FiniteRelation& e) {
  if (e.size() != space.size()) throw InputError("relation and space differ in size");
  Rational c(0);
  for (const auto& cls : e.classes()) {
    const Rational& w = space.weight(cls.front());
    for (int x : cls) {
      if (space.weight(x) != w) throw InputError("class has non-uniform weights; no measure-preserving graphing generates it");
    }
    c += w * static_cast<long long>(cls.size() - 1);
  }
  return c;
}

bool is_treeing(const FiniteSpace& space, const Graphing& phi, const FiniteRelation& e) {
  if (!(generated_partition(space.size(), phi) == e)) throw InputError("graphing does not generate the relation");
  long long edges = 0;
  for (const auto& f : phi) {
    for (int x : f.domain()) {
      if (f.map[static_cast<std::size_t>(x)] == x) return false;
      ++edges;
    }
  }
  return edges == space.size() - e.class_count();
}

SectionReport restrict_and_check(const FiniteSpace& space, const FiniteRelation& e, std::vector<int> section) {
  std::sort(section.begin(), section.end());
  for (std::size_t i = 0; i < section.size(); ++i) {
    check_point(section[i], space.size());
    if (i > 0 && section[i] == section[i - 1]) throw InputError("section lists a point twice");
  }
  std::vector<char> met(static_cast<std::size_t>(e.class_count()), 0);
  std::vector<int> ids;
  std::vector<char> inside(static_cast<std::size_t>(space.size()), 0);
  for (int x : section) {
    met[static_cast<std::size_t>(e.class_of(x))] = 1;
    ids.push_back(e.class_of(x));
    inside[static_cast<std::size_t>(x)] = 1;
  }
  if (std::find(met.begin(), met.end(), 0) != met.end()) throw InputError("subset misses a class; not a complete section");
  SectionReport r{section, FiniteRelation(ids), {}, {}, {}, {}, false};
  r.lhs = relation_cost(space, e);
  for (const auto& cls : r.restricted.classes()) {
    r.restricted_cost += space.weight(section[static_cast<std::size_t>(cls.front())]) * static_cast<long long>(cls.size() - 1);
  }
  for (int x = 0; x < space.size(); ++x) {
    if (!inside[static_cast<std::size_t>(x)]) r.complement += space.weight(x);
  }
  r.rhs = r.restricted_cost + r.complement;
  r.holds = r.lhs == r.rhs;
  return r;
}

FiniteAction::FiniteAction(FiniteSpace s, std::vector<std::vector<int>> p, int bound)
    : space(std::move(s)), perms(std::move(p)), audit_bound(bound) {
  if (bound < 0) throw InputError("audit bound must be nonnegative");
  for (const auto& perm : perms) {
    auto f = PartialBijection::from_map(perm);
    if (static_cast<int>(perm.size()) != space.size() || std::find(perm.begin(), perm.end(), -1) != perm.end()) {
      throw InputError("action generator is not a permutation of the space");
    }
    if (!is_measure_preserving(space, f)) throw InputError("action generator does not preserve weights");
    std::vector<int> inv(perm.size());
    for (std::size_t x = 0; x < perm.size(); ++x) inv[static_cast<std::size_t>(perm[x])] = static_cast<int>(x);
    inverses_.push_back(std::move(inv));
  }
  free_to_bound = audit_free(perms, bound);
}

int FiniteAction::apply(int x, const Word& w) const {
  for (Letter l : w.letters()) {
    if (std::abs(l) > rank()) throw InputError("word uses a generator the action lacks");
    x = l > 0 ? perms[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(x)]
              : inverses_[static_cast<std::size_t>(-l - 1)][static_cast<std::size_t>(x)];
  }
  return x;
}

FiniteRelation FiniteAction::orbit_relation() const { return generated_partition(space.size(), graphing()); }

Graphing FiniteAction::graphing() const {
  Graphing g;
  for (const auto& p : perms) g.push_back(PartialBijection{p});
  return g;
}

namespace {

bool fixes_somewhere(const std::vector<std::vector<int>>& perms, const std::vector<std::vector<int>>& inverses, int start,
                     int x, Letter last, int depth, int bound) {
  if (depth > 0 && x == start) return true;
  if (depth == bound) return false;
  const int r = static_cast<int>(perms.size());
  for (int g = 1; g <= r; ++g) {
    for (Letter l : {g, -g}) {
      if (l == -last) continue;
      int y = l > 0 ? perms[static_cast<std::size_t>(g - 1)][static_cast<std::size_t>(x)]
                    : inverses[static_cast<std::size_t>(g - 1)][static_cast<std::size_t>(x)];
      if (fixes_somewhere(perms, inverses, start, y, l, depth + 1, bound)) return true;
    }
  }
  return false;
}

}  // namespace

bool audit_free(const std::vector<std::vector<int>>& perms, int bound) {
  if (perms.empty()) return true;
  const int n = static_cast<int>(perms.front().size());
  std::vector<std::vector<int>> inverses;
  for (const auto& p : perms) {
    std::vector<int> inv(p.size());
    for (std::size_t x = 0; x < p.size(); ++x) inv[static_cast<std::size_t>(p[x])] = static_cast<int>(x);
    inverses.push_back(std::move(inv));
  }
  for (int x = 0; x < n; ++x) {
    if (fixes_somewhere(perms, inverses, x, x, 0, 0, bound)) return false;
  }
  return true;
}

InductionReport induce_action(const FiniteAction& h, const CoverGraph& cover, const SpanningTreeBasis& basis) {
  if (!cover.is_complete()) throw InputError("induction needs a finite-index subgroup");
  if (h.rank() != basis.rank()) {
    throw InputError("H-action has " + std::to_string(h.rank()) + " generators but the subgroup basis has " +
                     std::to_string(basis.rank()));
  }
  const int nx = h.space.size();
  const int n = cover.vertex_count();
  std::vector<Rational> weights;
  for (int v = 0; v < n; ++v) {
    for (int x = 0; x < nx; ++x) weights.push_back(h.space.weight(x) / static_cast<long long>(n));
  }
  std::vector<std::vector<int>> perms;
  for (int s = 1; s <= cover.rank(); ++s) {
    std::vector<int> p(static_cast<std::size_t>(n * nx));
    for (int v = 0; v < n; ++v) {
      int t = cover.step(v, s);
      int b = basis.basis_letter(s, v);
      for (int x = 0; x < nx; ++x) {
        int y = b == 0 ? x : h.perms[static_cast<std::size_t>(b - 1)][static_cast<std::size_t>(x)];
        p[static_cast<std::size_t>(v * nx + x)] = t * nx + y;
      }
    }
    perms.push_back(std::move(p));
  }
  Rational total(0);
  for (const auto& w : weights) total += w;
  InductionReport r{FiniteAction(FiniteSpace(std::move(weights)), std::move(perms), h.audit_bound), false, false, false, 0, 0};
  r.measure_total_one = total == Rational(1);
  const FiniteRelation eg = r.action.orbit_relation();
  const FiniteRelation eh = h.orbit_relation();
  std::vector<char> met(static_cast<std::size_t>(eg.class_count()), 0);
  for (int x = 0; x < nx; ++x) met[static_cast<std::size_t>(eg.class_of(x))] = 1;
  r.complete_section = std::find(met.begin(), met.end(), 0) == met.end();
  std::vector<int> restricted(static_cast<std::size_t>(nx));
  for (int x = 0; x < nx; ++x) restricted[static_cast<std::size_t>(x)] = eg.class_of(x);
  const FiniteRelation eg0(std::move(restricted));
  r.h_classes = eh.class_count();
  r.restricted_classes = eg0.class_count();
  r.restriction_matches = eg0 == eh;
  return r;
}

bool check_free_product(const FiniteRelation& e, const FiniteRelation& e1, const FiniteRelation& e2) {
  if (!e1.refines(e) || !e2.refines(e)) throw InputError("E1 and E2 must be sub-relations of E");
  if (!(join(e1, e2) == e)) return false;
  const int c1 = e1.class_count();
  UnionFind uf(static_cast<std::size_t>(c1 + e2.class_count()));
  for (int x = 0; x < e.size(); ++x) {
    auto a = uf.find_set(e1.class_of(x));
    auto b = uf.find_set(c1 + e2.class_of(x));
    if (a == b) return false;
    uf.link(a, b);
  }
  return true;
}

nlohmann::json space_to_json(const FiniteSpace& s) {
  nlohmann::json w = nlohmann::json::array();
  for (const auto& q : s.weights()) w.push_back(to_string(q));
  return {{"weights", w}};
}

FiniteSpace space_from_json(const nlohmann::json& j) {
  try {
    if (j.contains("uniform")) return FiniteSpace::uniform(j.at("uniform").get<int>());
    std::vector<Rational> w;
    for (const auto& q : j.at("weights")) w.push_back(parse_rational(q.get<std::string>()));
    return FiniteSpace(std::move(w));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed space JSON: ") + e.what());
  }
}

nlohmann::json graphing_to_json(const Graphing& g) {
  nlohmann::json maps = nlohmann::json::array();
  for (const auto& f : g) {
    nlohmann::json m = nlohmann::json::array();
    for (int t : f.map) m.push_back(t < 0 ? nlohmann::json(nullptr) : nlohmann::json(t));
    maps.push_back(m);
  }
  return {{"maps", maps}};
}

Graphing graphing_from_json(const nlohmann::json& j, int points) {
  try {
    Graphing g;
    for (const auto& m : j.at("maps")) {
      std::vector<int> map;
      for (const auto& t : m) map.push_back(t.is_null() ? -1 : t.get<int>());
      if (static_cast<int>(map.size()) != points) throw InputError("graphing map length differs from the space");
      g.push_back(PartialBijection::from_map(std::move(map)));
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed graphing JSON: ") + e.what());
  }
}

nlohmann::json relation_to_json(const FiniteRelation& e) { return {{"classes", e.classes()}}; }

FiniteRelation relation_from_json(const nlohmann::json& j, int points) {
  try {
    return FiniteRelation::from_classes(points, j.at("classes").get<std::vector<std::vector<int>>>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed relation JSON: ") + e.what());
  }
}

nlohmann::json section_report_to_json(const SectionReport& r) {
  return {{"section", r.section},
          {"restricted", relation_to_json(r.restricted)},
          {"lhs", to_string(r.lhs)},
          {"restricted_cost", to_string(r.restricted_cost)},
          {"complement", to_string(r.complement)},
          {"rhs", to_string(r.rhs)},
          {"holds", r.holds}};
}

}  // namespace mffkit
