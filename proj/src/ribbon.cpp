#include "mffkit/ribbon.hpp"

#include <algorithm>
#include <cstdlib>

namespace mffkit {

RibbonGraph::RibbonGraph(CoverGraph graph, std::vector<std::vector<Letter>> rotation)
    : graph_(std::move(graph)), rotation_(std::move(rotation)) {
  if (static_cast<int>(rotation_.size()) != graph_.vertex_count()) {
    throw InputError("rotation system needs one cyclic order per vertex");
  }
  for (int v = 0; v < graph_.vertex_count(); ++v) {
    std::vector<Letter> expected;
    for (int g = 1; g <= graph_.rank(); ++g) {
      if (graph_.step(v, g) != CoverGraph::kUndefined) expected.push_back(g);
      if (graph_.step(v, -g) != CoverGraph::kUndefined) expected.push_back(-g);
    }
    std::vector<Letter> given = rotation_[static_cast<std::size_t>(v)];
    std::sort(expected.begin(), expected.end());
    std::sort(given.begin(), given.end());
    if (given != expected) {
      throw InputError("rotation at vertex " + std::to_string(v) + " must list each dart exactly once");
    }
  }
}

RibbonGraph RibbonGraph::uniform(CoverGraph graph, const std::vector<Letter>& rotation) {
  std::vector<std::vector<Letter>> all(static_cast<std::size_t>(graph.vertex_count()), rotation);
  return RibbonGraph(std::move(graph), std::move(all));
}

int RibbonGraph::position(const Dart& d) const {
  const auto& rot = rotation_.at(static_cast<std::size_t>(d.vertex));
  auto it = std::find(rot.begin(), rot.end(), d.letter);
  if (it == rot.end()) throw InputError("dart is not in the rotation system");
  return static_cast<int>(it - rot.begin());
}

Dart RibbonGraph::successor(const Dart& d) const {
  int t = graph_.step(d.vertex, d.letter);
  Dart back{t, -d.letter};
  const auto& rot = rotation_[static_cast<std::size_t>(t)];
  int next = (position(back) + 1) % static_cast<int>(rot.size());
  return {t, rot[static_cast<std::size_t>(next)]};
}

Face RibbonGraph::face_from(const Dart& start) const {
  position(start);
  Face f;
  std::vector<Letter> letters;
  Dart d = start;
  do {
    f.darts.push_back(d);
    letters.push_back(d.letter);
    d = successor(d);
  } while (!(d == start));
  f.word = Word::reduce(letters);
  return f;
}

std::vector<Face> RibbonGraph::faces() const {
  std::vector<std::vector<char>> used(rotation_.size());
  for (std::size_t v = 0; v < rotation_.size(); ++v) used[v].assign(rotation_[v].size(), 0);
  std::vector<Face> out;
  for (int v = 0; v < graph_.vertex_count(); ++v) {
    for (std::size_t i = 0; i < rotation_[static_cast<std::size_t>(v)].size(); ++i) {
      if (used[static_cast<std::size_t>(v)][i]) continue;
      Face f = face_from({v, rotation_[static_cast<std::size_t>(v)][i]});
      for (const auto& d : f.darts) used[static_cast<std::size_t>(d.vertex)][static_cast<std::size_t>(position(d))] = 1;
      out.push_back(std::move(f));
    }
  }
  return out;
}

int RibbonGraph::genus() const {
  int chi = graph_.vertex_count() - graph_.edge_count() + face_count();
  return (2 - chi) / 2;
}

Word based_face_word(const Face& face, const SpanningTreeBasis& basis) {
  const Word& path = basis.transversal.at(static_cast<std::size_t>(face.darts.front().vertex));
  return path * face.word * path.inverse();
}

}  // namespace mffkit
