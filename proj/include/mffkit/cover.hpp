#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mffkit/word.hpp"

namespace mffkit {

/// Labeled graph over the rose with `rank` petals. For each generator g the
/// edges labeled g form a partial injective map on vertices. Vertex 0 is the
/// base point.
class CoverGraph {
 public:
  static constexpr int kUndefined = -1;

  /// Validates injectivity, range and connectivity.
  CoverGraph(int rank, std::vector<std::vector<int>> maps);

  int rank() const noexcept { return static_cast<int>(forward_.size()); }
  int vertex_count() const noexcept { return vertices_; }
  int base() const noexcept { return 0; }

  /// Target of the edge leaving v along the signed letter, or kUndefined.
  int step(int v, Letter l) const;
  const std::vector<int>& map(int generator) const { return forward_.at(generator - 1); }

  bool is_complete() const noexcept;
  int edge_count() const noexcept;
  /// Rank of the fundamental group at the base: E - V + 1.
  int subgroup_rank() const noexcept { return edge_count() - vertices_ + 1; }
  /// Number of defined half-edges at v (loops count twice).
  int valence(int v) const;

  friend bool operator==(const CoverGraph&, const CoverGraph&) = default;

 private:
  void validate() const;

  int vertices_;
  std::vector<std::vector<int>> forward_;
  std::vector<std::vector<int>> backward_;
};

/// Stallings folding of the bouquet of petals spelled by the generators.
/// The result is the core graph, numbered by breadth-first search from the base.
CoverGraph fold(int rank, const std::vector<Word>& generators);

/// Renumbers vertices breadth first from the base (directions a, A, b, B, ...).
CoverGraph canonical_numbering(const CoverGraph& g);

struct MembershipTrace {
  bool member = false;
  /// Vertices visited, starting at the base; stops where the path is undefined.
  std::vector<int> vertices;
};

MembershipTrace trace_word(const CoverGraph& g, const Word& w, int start = 0);
bool membership(const CoverGraph& g, const Word& w);

struct TreeEdge {
  int generator = 1;
  int source = 0;
  friend bool operator==(const TreeEdge&, const TreeEdge&) = default;
};

/// A spanning tree of the cover and the free basis it induces: one basis word
/// per non-tree edge, tree_path(source) * g * tree_path(target)^{-1}.
struct SpanningTreeBasis {
  struct BasisEdge {
    int generator;
    int source;
    int target;
    Word word;
  };
  std::vector<TreeEdge> tree;
  std::vector<Word> transversal;  ///< tree path word from the base to each vertex
  std::vector<BasisEdge> basis;   ///< ordered by (generator, source)

  /// edge_letter[generator - 1][source]: 1-based basis letter, 0 on tree edges.
  std::vector<std::vector<int>> edge_letter;

  int rank() const noexcept { return static_cast<int>(basis.size()); }
  int basis_letter(int generator, int source) const;
  /// Expands a word over basis letters back to ambient generators.
  Word expand(const Word& over_basis) const;
};

/// Deterministic breadth-first tree from the base with generator-index tie breaking.
SpanningTreeBasis basis_from_tree(const CoverGraph& g);
/// Uses the given tree; throws InputError if it is not a spanning tree of g.
SpanningTreeBasis basis_from_tree(const CoverGraph& g, const std::vector<TreeEdge>& tree);

/// Word over the basis letters of `basis` whose expansion reduces to w.
/// Throws InputError when w is not in the subgroup.
Word rewrite_in_basis(const CoverGraph& g, const SpanningTreeBasis& basis, const Word& w);

/// Rose with `rank` loops at one vertex: the whole free group.
CoverGraph make_rose(int rank);
/// Kernel of F_rank -> Z_p sending generator i to targets[i-1]; Cayley graph of the image.
CoverGraph make_kernel_cover(int rank, int modulus, const std::vector<int>& targets);
/// kn vertices, b: j -> j+1 and a: j -> j+n (mod kn), over F_2 = <a, b>.
CoverGraph make_grid_cover(int k, int n);
/// The grid tree made of all b-edges except the one from v_{kn-1} to v_0.
std::vector<TreeEdge> grid_paper_tree(int k, int n);

/// Cover specification strings: "rose:R", "grid:K,N", "kernel:P" (rank 2, all
/// generators to 1) or "kernel:P:t1,t2,..." (rank = number of targets).
CoverGraph make_cover(const std::string& spec);

nlohmann::json cover_to_json(const CoverGraph& g);
CoverGraph cover_from_json(const nlohmann::json& j);
/// DOT digraph with one arc per edge, labeled with the generator letter.
std::string cover_to_dot(const CoverGraph& g);

nlohmann::json tree_to_json(const std::vector<TreeEdge>& tree);
std::vector<TreeEdge> tree_from_json(const nlohmann::json& j);

}  // namespace mffkit
