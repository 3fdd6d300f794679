#pragma once

#include <vector>

#include "mffkit/cover.hpp"

namespace mffkit {

/// Half-edge leaving `vertex` along the signed letter.
struct Dart {
  int vertex = 0;
  Letter letter = 1;
  friend bool operator==(const Dart&, const Dart&) = default;
};

struct Face {
  std::vector<Dart> darts;
  Word word;  ///< letters read along the boundary, starting at darts.front()
};

/// Rotation system on a cover graph: at every vertex a cyclic order of the
/// letters of the darts leaving it. Faces are traced by d -> sigma(reverse(d)).
class RibbonGraph {
 public:
  RibbonGraph(CoverGraph graph, std::vector<std::vector<Letter>> rotation);
  /// The same cyclic order at every vertex.
  static RibbonGraph uniform(CoverGraph graph, const std::vector<Letter>& rotation);

  const CoverGraph& graph() const noexcept { return graph_; }
  const std::vector<std::vector<Letter>>& rotation() const noexcept { return rotation_; }

  /// Boundary cycle through the given dart, read from it.
  Face face_from(const Dart& start) const;
  /// All faces, each started at its least dart in (vertex, rotation position) order.
  std::vector<Face> faces() const;
  int face_count() const { return static_cast<int>(faces().size()); }
  /// Genus of the closed orientable surface obtained by capping the faces.
  int genus() const;

 private:
  Dart successor(const Dart& d) const;
  int position(const Dart& d) const;

  CoverGraph graph_;
  std::vector<std::vector<Letter>> rotation_;
};

/// Tree path to the start vertex * face word * its inverse, as an element of
/// the subgroup at the base.
Word based_face_word(const Face& face, const SpanningTreeBasis& basis);

}  // namespace mffkit
