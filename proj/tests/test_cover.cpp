#include <regex>

#include "doctest.h"
#include "mffkit/cover.hpp"
#include "mffkit/ribbon.hpp"
#include "oracles.hpp"

using namespace mffkit;

TEST_CASE("standard covers") {
  const CoverGraph rose = make_rose(3);
  CHECK(rose.vertex_count() == 1);
  CHECK(rose.subgroup_rank() == 3);
  CHECK(rose.is_complete());

  const CoverGraph grid = make_grid_cover(3, 2);
  CHECK(grid.vertex_count() == 6);
  CHECK(grid.edge_count() == 12);
  CHECK(grid.subgroup_rank() == 7);
  CHECK(grid.step(0, 1) == 2);
  CHECK(grid.step(0, -2) == 5);
  CHECK(grid.valence(3) == 4);

  const CoverGraph k = make_kernel_cover(2, 3, {1, 1});
  CHECK(k.vertex_count() == 3);
  CHECK(k.subgroup_rank() == 4);
  CHECK_THROWS_AS(make_kernel_cover(2, 4, {2, 2}), InputError);
  CHECK(make_cover("grid:3,2") == grid);
  CHECK(make_cover("kernel:3") == k);
  CHECK(make_cover("kernel:5:1,2,0").rank() == 3);
  CHECK_THROWS_AS(make_cover("grid:3"), InputError);
  CHECK_THROWS_AS(make_cover("torus:2"), InputError);
}

TEST_CASE("cover validation") {
  CHECK_THROWS_AS(CoverGraph(1, {{0, 0}}), InputError);            // not injective
  CHECK_THROWS_AS(CoverGraph(1, {{-1, -1}}), InputError);          // disconnected
  CHECK_THROWS_AS(CoverGraph(2, {{1, 0}, {0, 1, 2}}), InputError);  // ragged
  CHECK_NOTHROW(CoverGraph(1, {{1, -1}}));
}

TEST_CASE("folding and membership") {
  const CoverGraph g = fold(2, {parse_word("a2"), parse_word("ab"), parse_word("aB")});
  // <a^2, ab, aB> has index 2
  CHECK(g.is_complete());
  CHECK(g.vertex_count() == 2);
  CHECK(membership(g, parse_word("b2")));
  CHECK_FALSE(membership(g, parse_word("a")));
  const auto t = trace_word(g, parse_word("ab"));
  CHECK(t.member);
  CHECK(t.vertices.size() == 3);

  const CoverGraph c = fold(2, {parse_word("a3"), parse_word("a2")});
  CHECK(c.vertex_count() == 1);
  CHECK(c.subgroup_rank() == 1);
  CHECK(fold(2, {parse_word("aba"), parse_word("aBa")}).subgroup_rank() == 2);
  CHECK(fold(2, {}).vertex_count() == 1);
  // hanging trees are pruned: conjugate of a petal folds to the petal at the base
  CHECK(fold(2, {parse_word("bab").power(1)}).vertex_count() == 3);
}

TEST_CASE("fold rank agrees with naive folding") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Word> gens;
    const int count = 1 + trial % 4;
    for (int i = 0; i < count; ++i) gens.push_back(oracle::random_word(rng, 2 + trial % 2, 1 + (trial * 7 + i) % 8));
    CHECK(fold(2 + trial % 2, gens).subgroup_rank() == oracle::naive_fold_rank(2 + trial % 2, gens));
  }
}

TEST_CASE("canonical numbering is breadth first and idempotent") {
  const CoverGraph g = make_grid_cover(2, 3);
  const CoverGraph c = canonical_numbering(g);
  CHECK(canonical_numbering(c) == c);
  CHECK(c.step(0, 1) == 1);
  CHECK(c.vertex_count() == g.vertex_count());
}

TEST_CASE("spanning tree bases") {
  const CoverGraph g = make_grid_cover(3, 2);
  const SpanningTreeBasis b = basis_from_tree(g, grid_paper_tree(3, 2));
  CHECK(b.rank() == 7);
  CHECK(b.tree.size() == 5);
  CHECK(to_string(b.transversal[4]) == "b4");
  CHECK(b.basis_letter(2, 5) == 7);  // b from v5 back to v0 is the last letter
  CHECK(b.basis_letter(2, 0) == 0);
  for (int e = 1; e <= b.rank(); ++e) {
    const Word x = Word::generator(e);
    CHECK(rewrite_in_basis(g, b, b.expand(x)) == x);
  }
  const Word w = parse_word("a3b2").power(3);
  CHECK(b.expand(rewrite_in_basis(g, b, w)) == w);
  CHECK_THROWS_AS(rewrite_in_basis(g, b, parse_word("a")), InputError);
  CHECK_THROWS_AS(basis_from_tree(g, {{1, 0}, {1, 2}, {1, 4}, {2, 0}, {2, 1}}), InputError);  // has a cycle

  const SpanningTreeBasis bfs = basis_from_tree(g);
  CHECK(basis_from_tree(g, bfs.tree).basis.size() == bfs.basis.size());
}

TEST_CASE("JSON and DOT export") {
  const CoverGraph g = make_grid_cover(3, 2);
  CHECK(cover_from_json(cover_to_json(g)) == g);
  CHECK(cover_to_json(cover_from_json(cover_to_json(g))) == cover_to_json(g));
  const std::string dot = cover_to_dot(g);
  CHECK(dot == cover_to_dot(g));
  const std::regex node(R"(v\d+ \[shape)");
  const std::regex arc(R"(->)");
  CHECK(std::distance(std::sregex_iterator(dot.begin(), dot.end(), node), std::sregex_iterator()) == 6);
  CHECK(std::distance(std::sregex_iterator(dot.begin(), dot.end(), arc), std::sregex_iterator()) == 12);

  const CoverGraph partial = fold(2, {parse_word("ab")});
  CHECK(cover_from_json(cover_to_json(partial)) == partial);
  CHECK(tree_from_json(tree_to_json(grid_paper_tree(3, 2))) == grid_paper_tree(3, 2));
  CHECK_THROWS_AS(cover_from_json(nlohmann::json::parse(R"({"vertices": 2})")), InputError);
}

TEST_CASE("ribbon faces and genus") {
  // standard rotation on the mod p kernel cover of <x, c_1, ..., c_k>, gcd(p, k + 1) = 1
  for (int k = 1; k <= 3; ++k) {
    for (int p : {3, 5}) {
      if ((k + 1) % p == 0) continue;  // w = x c_1 .. c_k must have order p
      std::vector<Letter> rot;
      for (int g = 1; g <= k + 1; ++g) {
        rot.push_back(g);
        rot.push_back(-g);
      }
      const RibbonGraph r = RibbonGraph::uniform(make_kernel_cover(k + 1, p, std::vector<int>(k + 1, 1)), rot);
      CHECK(r.face_count() == k + 2);
      CHECK(r.genus() == k * (p - 1) / 2);
    }
  }
  // base rose: planar, boundary words v, X, C_j
  const RibbonGraph rose = RibbonGraph::uniform(make_rose(3), {1, -1, 2, -2, 3, -3});
  CHECK(rose.genus() == 0);
  CHECK(to_string(rose.face_from({0, 1}).word) == "abc");

  // nonorientable double cover: genus g - 1 with two faces
  for (int g = 1; g <= 3; ++g) {
    std::vector<Letter> rho;
    for (int i = 1; i <= g; ++i) {
      rho.push_back(i);
      rho.push_back(-i);
    }
    const RibbonGraph r(make_kernel_cover(g, 2, std::vector<int>(g, 1)), {rho, {rho.rbegin(), rho.rend()}});
    CHECK(r.face_count() == 2);
    CHECK(r.genus() == g - 1);
  }
  CHECK_THROWS_AS(RibbonGraph(make_rose(2), {{1, -1, 2}}), InputError);
}

TEST_CASE("based face words") {
  const CoverGraph g = make_kernel_cover(2, 2, {1, 1});
  const RibbonGraph r(g, {{1, -1, 2, -2}, {-2, 2, -1, 1}});
  const SpanningTreeBasis b = basis_from_tree(g);
  const Face f = r.face_from({1, -2});
  CHECK(to_string(based_face_word(f, b).inverse()) == "a3b2A");
}
