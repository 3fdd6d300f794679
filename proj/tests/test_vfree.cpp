#include <numeric>

#include "doctest.h"
#include "mffkit/vfree.hpp"
#include "oracles.hpp"

using namespace mffkit;

namespace {

VFreeWord random_vfree(std::mt19937& rng, const VFreeGroup& g, int syllables) {
  std::uniform_int_distribution<int> gen(1, g.generator_count());
  std::vector<Syllable> s;
  for (int i = 0; i < syllables; ++i) {
    const int x = gen(rng);
    const int order = g.order(x);
    std::uniform_int_distribution<int> ex(order ? 1 : -2, order ? order - 1 : 2);
    int e = 0;
    while (e == 0) e = ex(rng);
    s.push_back({x, e});
  }
  return g.normal_form(s);
}

int lcm_of(const std::vector<int>& orders) {
  int l = 1;
  for (int n : orders) l = std::lcm(l, n);
  return l;
}

}  // namespace

TEST_CASE("normal forms and the text grammar") {
  const VFreeGroup g(2, {3, 4});
  CHECK(g.generator_count() == 4);
  CHECK(g.torsion_generator(2) == 4);
  CHECK(g.order(3) == 3);
  CHECK(g.order(1) == 0);
  CHECK(g.normal_form({{3, 2}, {3, 1}}).empty());
  CHECK(g.normal_form({{3, -1}}) == g.generator(3, 2));
  CHECK(g.normal_form({{1, 1}, {4, 4}, {1, -1}}).empty());
  CHECK(g.normal_form({{1, 2}, {2, 0}, {1, 1}}).syllables() == std::vector<Syllable>{{1, 3}});

  const VFreeWord u = g.parse("a2s1bS2");
  CHECK(g.parse(g.to_string(u)) == u);
  CHECK(g.multiply(u, g.inverse(u)).empty());
  CHECK(g.parse("s1s1s1").empty());
  CHECK(g.parse("S1") == g.generator(3, 2));
  CHECK(g.parse("s2^3") == g.parse("S2"));
  CHECK_THROWS(g.parse("s3"));
  CHECK_THROWS(g.parse("c"));
  CHECK(g.to_word(g.parse("aB")) == parse_word("aB"));
  CHECK_THROWS_AS(g.to_word(g.parse("as1")), InputError);
  CHECK(g.from_word(parse_word("a2b")) == g.parse("a2b"));
  CHECK(g.conjugate(g.parse("a"), g.parse("s1")) == g.parse("as1A"));

  const VFreeGroup f = VFreeGroup::free(2);
  CHECK(f.is_free());
  CHECK(f.to_string(f.parse("a3B")) == "a3B");
  CHECK_THROWS_AS(VFreeGroup(1, {1}), InputError);
}

TEST_CASE("finite order and proper powers") {
  const VFreeGroup g(1, {6});
  CHECK(has_finite_order(g, g.parse("as1A")));
  CHECK(has_finite_order(g, VFreeWord()));
  CHECK_FALSE(has_finite_order(g, g.parse("as1")));
  CHECK_FALSE(is_proper_power(g, g.parse("s1^2")));  // finite order
  const auto p = is_proper_power(g, g.parse("as1as1"));
  REQUIRE(p);
  CHECK(p->exponent == 2);
  CHECK(g.power(p->root, 2) == g.parse("as1as1"));
  const auto q = is_proper_power(g, g.parse("s1a3S1"));
  REQUIRE(q);
  CHECK(q->exponent == 3);
  CHECK_FALSE(is_proper_power(g, g.parse("as1a2s1")));

  // elements of finite order are exactly those killed by lcm of the orders
  std::mt19937 rng(17);
  const VFreeGroup h(1, {2, 3});
  for (int trial = 0; trial < 300; ++trial) {
    const VFreeWord u = random_vfree(rng, h, 1 + trial % 6);
    CHECK(has_finite_order(h, u) == h.power(u, lcm_of(h.orders())).empty());
    if (const auto r = is_proper_power(h, u)) CHECK(h.power(r->root, r->exponent) == u);
  }
}

TEST_CASE("branched cover subgroups") {
  const VFreeGroup g(2, {3, 4});
  const BranchedCoverSubgroup sub = branched_cover_subgroup(g);
  CHECK(sub.which == 2);
  CHECK(sub.index == 4);
  CHECK(sub.factor_group == VFreeGroup(2, {3}));
  CHECK(sub.factors.size() == 4);
  CHECK(sub.parent_generator(3) == 3);
  CHECK(sub.embed(1, sub.factor_group.parse("a")) == g.parse("s2aS2"));
  CHECK(sub.restrict_to_factor(g.parse("as1")) == sub.factor_group.parse("as1"));
  CHECK_THROWS(sub.restrict_to_factor(g.parse("s2")));
  CHECK(verify_stabilizer(sub));
  CHECK(verify_reidemeister_schreier(sub));

  const BranchedCoverSubgroup first = branched_cover_subgroup(g, 1);
  CHECK(first.index == 3);
  CHECK(first.factor_group == VFreeGroup(2, {4}));
  CHECK(first.parent_generator(3) == 4);
  CHECK(verify_stabilizer(first));
  CHECK(verify_reidemeister_schreier(first));
  CHECK_THROWS(branched_cover_subgroup(VFreeGroup::free(2)));
  CHECK_THROWS(branched_cover_subgroup(g, 3));

  const CosetAction act = coset_action_vfree(sub);
  CHECK(act.degree == 4);
  CHECK(apply(act, g.parse("s2^3")) == 3);
  CHECK(apply(act, g.parse("as1b")) == 0);
}

TEST_CASE("lifts through the branched cover") {
  const VFreeGroup g(2, {6});
  const BranchedCoverSubgroup sub = branched_cover_subgroup(g);
  for (int p = 0; p < 6; ++p) {
    const VFreeWord w = make_vfree_word(g, parse_word("a3b2"), {p});
    const VFreeLift lift = complete_lift_vfree(sub, w);
    CHECK(lift.p == p);
    CHECK(lift.d == std::gcd(p, 6));
    CHECK(lift.m == 6 / lift.d);
    CHECK(lift.entries.size() == static_cast<std::size_t>(lift.d));
    CHECK(lift.total_multiplicity() == 6);
    const CosetAction act = coset_action_vfree(sub);
    for (const auto& e : lift.entries) {
      CHECK(e.multiplicity == lift.m);
      CHECK(e.representative == g.generator(3, -e.coset));
      CHECK(apply(act, g.conjugate(g.generator(3, e.coset), g.power(w, e.multiplicity))) == 0);
      CHECK(lift_product(sub, lift.u, e) == e.lift);
      for (std::size_t t = 0; t < e.factor_sequence.size(); ++t) {
        CHECK(e.factor_sequence[t] == (e.coset + static_cast<int>(t) * p) % 6);
      }
    }
  }
  CHECK_THROWS_AS(complete_lift_vfree(sub, g.parse("s1a")), InputError);
  CHECK(vfree_lift_to_json(g, complete_lift_vfree(sub, g.parse("as1^4")))["d"] == 2);
}

TEST_CASE("lift products agree with conjugated powers on random words") {
  std::mt19937 rng(23);
  const VFreeGroup g(1, {2, 4});
  const BranchedCoverSubgroup sub = branched_cover_subgroup(g);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Syllable> body = random_vfree(rng, sub.factor_group, 1 + trial % 5).syllables();
    for (auto& s : body) s.generator = sub.parent_generator(s.generator);
    VFreeWord w = g.multiply(g.normal_form(body), g.generator(3, trial % 4));
    if (w.empty()) continue;
    const VFreeLift lift = complete_lift_vfree(sub, w);
    CHECK(lift.total_multiplicity() == 4);
    for (const auto& e : lift.entries) CHECK(lift_product(sub, lift.u, e) == e.lift);
  }
}

TEST_CASE("group JSON") {
  const VFreeGroup g(2, {3});
  CHECK(vfree_group_from_json(vfree_group_to_json(g)) == g);
  CHECK(vfree_group_from_json(nlohmann::json::parse(R"({"free_rank": 3})")) == VFreeGroup::free(3));
  CHECK_THROWS_AS(vfree_group_from_json(nlohmann::json::parse(R"({"torsion": [2]})")), InputError);
}
