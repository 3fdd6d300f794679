#include "mffkit/cover.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <numeric>
#include <sstream>

namespace mffkit {

CoverGraph::CoverGraph(int rank, std::vector<std::vector<int>> maps) : vertices_(0), forward_(std::move(maps)) {
  if (rank < 1) throw InputError("cover rank must be at least 1");
  if (static_cast<int>(forward_.size()) != rank) throw InputError("cover needs one map per generator");
  vertices_ = static_cast<int>(forward_.front().size());
  backward_.assign(forward_.size(), std::vector<int>(static_cast<std::size_t>(vertices_), kUndefined));
  for (std::size_t g = 0; g < forward_.size(); ++g) {
    const auto& fwd = forward_[g];
    if (static_cast<int>(fwd.size()) != vertices_) throw InputError("generator maps differ in length");
    for (int v = 0; v < vertices_; ++v) {
      int t = fwd[static_cast<std::size_t>(v)];
      if (t == kUndefined) continue;
      if (t < 0 || t >= vertices_) throw InputError("edge target out of range");
      auto& back = backward_[g][static_cast<std::size_t>(t)];
      if (back != kUndefined) {
        throw InputError("generator " + std::to_string(g + 1) + " is not injective at vertex " + std::to_string(t));
      }
      back = v;
    }
  }
  validate();
}

void CoverGraph::validate() const {
  if (vertices_ < 1) throw InputError("cover needs at least one vertex");
  std::vector<char> seen(static_cast<std::size_t>(vertices_), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int g = 1; g <= rank(); ++g) {
      for (int l : {g, -g}) {
        int t = step(v, l);
        if (t != kUndefined && !seen[static_cast<std::size_t>(t)]) {
          seen[static_cast<std::size_t>(t)] = 1;
          ++reached;
          stack.push_back(t);
        }
      }
    }
  }
  if (reached != vertices_) throw InputError("cover graph is not connected");
}

int CoverGraph::step(int v, Letter l) const {
  if (l > 0) return forward_[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(v)];
  return backward_[static_cast<std::size_t>(-l - 1)][static_cast<std::size_t>(v)];
}

bool CoverGraph::is_complete() const noexcept {
  for (const auto& m : forward_) {
    if (std::find(m.begin(), m.end(), kUndefined) != m.end()) return false;
  }
  return true;
}

int CoverGraph::edge_count() const noexcept {
  int e = 0;
  for (const auto& m : forward_) e += static_cast<int>(std::count_if(m.begin(), m.end(), [](int t) { return t != kUndefined; }));
  return e;
}

int CoverGraph::valence(int v) const {
  int d = 0;
  for (int g = 1; g <= rank(); ++g) {
    if (step(v, g) != kUndefined) ++d;
    if (step(v, -g) != kUndefined) ++d;
  }
  return d;
}

CoverGraph canonical_numbering(const CoverGraph& g) {
  const int n = g.vertex_count();
  std::vector<int> order;
  std::vector<int> index(static_cast<std::size_t>(n), -1);
  index[0] = 0;
  order.push_back(0);
  for (std::size_t head = 0; head < order.size(); ++head) {
    int v = order[head];
    for (int gen = 1; gen <= g.rank(); ++gen) {
      for (int l : {gen, -gen}) {
        int t = g.step(v, l);
        if (t != CoverGraph::kUndefined && index[static_cast<std::size_t>(t)] < 0) {
          index[static_cast<std::size_t>(t)] = static_cast<int>(order.size());
          order.push_back(t);
        }
      }
    }
  }
  std::vector<std::vector<int>> maps(static_cast<std::size_t>(g.rank()),
                                     std::vector<int>(static_cast<std::size_t>(n), CoverGraph::kUndefined));
  for (int gen = 1; gen <= g.rank(); ++gen) {
    for (int v = 0; v < n; ++v) {
      int t = g.step(v, gen);
      if (t != CoverGraph::kUndefined) {
        maps[static_cast<std::size_t>(gen - 1)][static_cast<std::size_t>(index[static_cast<std::size_t>(v)])] =
            index[static_cast<std::size_t>(t)];
      }
    }
  }
  return CoverGraph(g.rank(), std::move(maps));
}

namespace {

// Working graph for folding; directions are 2(g-1) for g and 2(g-1)+1 for g^{-1}.
class Folder {
 public:
  explicit Folder(int rank) : rank_(rank) { add_vertex(); }

  int add_vertex() {
    parent_.push_back(static_cast<int>(parent_.size()));
    out_.emplace_back(static_cast<std::size_t>(2 * rank_), -1);
    return static_cast<int>(parent_.size()) - 1;
  }

  void add_petal(const Word& w) {
    if (w.empty()) return;
    int current = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      int next = i + 1 == w.size() ? 0 : add_vertex();
      connect(current, direction(w[i]), next);
      current = next;
    }
    drain();
  }

  CoverGraph finish() {
    prune();
    std::vector<int> alive;
    std::vector<int> index(parent_.size(), -1);
    for (std::size_t v = 0; v < parent_.size(); ++v) {
      if (find(static_cast<int>(v)) == static_cast<int>(v) && !removed(static_cast<int>(v))) {
        index[v] = static_cast<int>(alive.size());
        alive.push_back(static_cast<int>(v));
      }
    }
    std::vector<std::vector<int>> maps(static_cast<std::size_t>(rank_),
                                       std::vector<int>(alive.size(), CoverGraph::kUndefined));
    for (std::size_t i = 0; i < alive.size(); ++i) {
      for (int g = 0; g < rank_; ++g) {
        int t = out_[static_cast<std::size_t>(alive[i])][static_cast<std::size_t>(2 * g)];
        if (t >= 0) maps[static_cast<std::size_t>(g)][i] = index[static_cast<std::size_t>(find(t))];
      }
    }
    return canonical_numbering(CoverGraph(rank_, std::move(maps)));
  }

 private:
  static int direction(Letter l) { return l > 0 ? 2 * (l - 1) : 2 * (-l - 1) + 1; }
  static int opposite(int d) { return d ^ 1; }

  int find(int v) {
    while (parent_[static_cast<std::size_t>(v)] != v) {
      parent_[static_cast<std::size_t>(v)] = parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(v)])];
      v = parent_[static_cast<std::size_t>(v)];
    }
    return v;
  }

  int target(int v, int d) {
    int t = out_[static_cast<std::size_t>(v)][static_cast<std::size_t>(d)];
    return t < 0 ? -1 : find(t);
  }

  void connect(int u, int d, int v) {
    u = find(u);
    v = find(v);
    if (int x = target(u, d); x >= 0) {
      if (x != v) pending_.emplace_back(x, v);
      return;
    }
    if (int y = target(v, opposite(d)); y >= 0) {
      if (y != u) pending_.emplace_back(y, u);
      return;
    }
    out_[static_cast<std::size_t>(u)][static_cast<std::size_t>(d)] = v;
    out_[static_cast<std::size_t>(v)][static_cast<std::size_t>(opposite(d))] = u;
  }

  void merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a == 0) std::swap(a, b);  // the base survives
    parent_[static_cast<std::size_t>(a)] = b;
    for (int d = 0; d < 2 * rank_; ++d) {
      int t = out_[static_cast<std::size_t>(a)][static_cast<std::size_t>(d)];
      if (t < 0) continue;
      out_[static_cast<std::size_t>(a)][static_cast<std::size_t>(d)] = -1;
      int existing = out_[static_cast<std::size_t>(b)][static_cast<std::size_t>(d)];
      if (existing < 0) {
        out_[static_cast<std::size_t>(b)][static_cast<std::size_t>(d)] = t;
      } else {
        pending_.emplace_back(existing, t);
      }
    }
  }

  void drain() {
    while (!pending_.empty()) {
      auto [a, b] = pending_.back();
      pending_.pop_back();
      merge(a, b);
    }
  }

  bool removed(int v) const { return removed_.size() > static_cast<std::size_t>(v) && removed_[static_cast<std::size_t>(v)]; }

  int degree(int v) {
    int d = 0;
    for (int dir = 0; dir < 2 * rank_; ++dir) {
      if (out_[static_cast<std::size_t>(v)][static_cast<std::size_t>(dir)] >= 0) ++d;
    }
    return d;
  }

  // Removes hanging trees away from the base.
  void prune() {
    removed_.assign(parent_.size(), 0);
    std::vector<int> stack;
    for (std::size_t v = 1; v < parent_.size(); ++v) {
      if (find(static_cast<int>(v)) == static_cast<int>(v) && degree(static_cast<int>(v)) <= 1) stack.push_back(static_cast<int>(v));
    }
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      if (removed(v) || v == 0 || degree(v) > 1) continue;
      removed_[static_cast<std::size_t>(v)] = 1;
      for (int dir = 0; dir < 2 * rank_; ++dir) {
        int t = target(v, dir);
        if (t < 0) continue;
        out_[static_cast<std::size_t>(v)][static_cast<std::size_t>(dir)] = -1;
        out_[static_cast<std::size_t>(t)][static_cast<std::size_t>(opposite(dir))] = -1;
        if (t != 0 && degree(t) <= 1) stack.push_back(t);
      }
    }
  }

  int rank_;
  std::vector<int> parent_;
  std::vector<std::vector<int>> out_;
  std::vector<std::pair<int, int>> pending_;
  std::vector<char> removed_;
};

}  // namespace

CoverGraph fold(int rank, const std::vector<Word>& generators) {
  Alphabet alphabet(rank);
  Folder folder(rank);
  for (const auto& w : generators) {
    check_alphabet(w, alphabet);
    folder.add_petal(w);
  }
  return folder.finish();
}

MembershipTrace trace_word(const CoverGraph& g, const Word& w, int start) {
  MembershipTrace trace;
  int v = start;
  trace.vertices.push_back(v);
  for (Letter l : w.letters()) {
    if (std::abs(l) > g.rank()) return trace;
    v = g.step(v, l);
    if (v == CoverGraph::kUndefined) return trace;
    trace.vertices.push_back(v);
  }
  trace.member = v == start;
  return trace;
}

bool membership(const CoverGraph& g, const Word& w) { return trace_word(g, w).member; }

int SpanningTreeBasis::basis_letter(int generator, int source) const {
  return edge_letter.at(static_cast<std::size_t>(generator - 1)).at(static_cast<std::size_t>(source));
}

Word SpanningTreeBasis::expand(const Word& over_basis) const {
  Word out;
  for (Letter l : over_basis.letters()) {
    if (std::abs(l) > rank()) throw InputError("basis letter out of range");
    const Word& b = basis[static_cast<std::size_t>(std::abs(l) - 1)].word;
    out *= l > 0 ? b : b.inverse();
  }
  return out;
}

namespace {

SpanningTreeBasis build_basis(const CoverGraph& g, std::vector<TreeEdge> tree) {
  const int n = g.vertex_count();
  if (static_cast<int>(tree.size()) != n - 1) throw InputError("spanning tree must have V - 1 edges");
  std::vector<std::vector<char>> in_tree(static_cast<std::size_t>(g.rank()), std::vector<char>(static_cast<std::size_t>(n), 0));
  for (const auto& e : tree) {
    if (e.generator < 1 || e.generator > g.rank() || e.source < 0 || e.source >= n ||
        g.step(e.source, e.generator) == CoverGraph::kUndefined) {
      throw InputError("tree edge is not an edge of the cover");
    }
    auto& flag = in_tree[static_cast<std::size_t>(e.generator - 1)][static_cast<std::size_t>(e.source)];
    if (flag) throw InputError("tree edge listed twice");
    flag = 1;
  }
  SpanningTreeBasis out;
  out.transversal.assign(static_cast<std::size_t>(n), Word());
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int gen = 1; gen <= g.rank(); ++gen) {
      int t = g.step(v, gen);
      if (t != CoverGraph::kUndefined && in_tree[static_cast<std::size_t>(gen - 1)][static_cast<std::size_t>(v)] &&
          !seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = 1;
        out.transversal[static_cast<std::size_t>(t)] = out.transversal[static_cast<std::size_t>(v)] * Word::generator(gen);
        queue.push_back(t);
      }
      int s = g.step(v, -gen);
      if (s != CoverGraph::kUndefined && in_tree[static_cast<std::size_t>(gen - 1)][static_cast<std::size_t>(s)] &&
          !seen[static_cast<std::size_t>(s)]) {
        seen[static_cast<std::size_t>(s)] = 1;
        out.transversal[static_cast<std::size_t>(s)] =
            out.transversal[static_cast<std::size_t>(v)] * Word::generator(gen).inverse();
        queue.push_back(s);
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw InputError("tree does not span the cover");
  out.tree = std::move(tree);
  out.edge_letter.assign(static_cast<std::size_t>(g.rank()), std::vector<int>(static_cast<std::size_t>(n), 0));
  for (int gen = 1; gen <= g.rank(); ++gen) {
    for (int v = 0; v < n; ++v) {
      int t = g.step(v, gen);
      if (t == CoverGraph::kUndefined || in_tree[static_cast<std::size_t>(gen - 1)][static_cast<std::size_t>(v)]) continue;
      Word w = out.transversal[static_cast<std::size_t>(v)] * Word::generator(gen) *
               out.transversal[static_cast<std::size_t>(t)].inverse();
      out.basis.push_back({gen, v, t, w});
      out.edge_letter[static_cast<std::size_t>(gen - 1)][static_cast<std::size_t>(v)] = static_cast<int>(out.basis.size());
    }
  }
  return out;
}

}  // namespace

SpanningTreeBasis basis_from_tree(const CoverGraph& g) {
  const int n = g.vertex_count();
  std::vector<TreeEdge> tree;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int gen = 1; gen <= g.rank(); ++gen) {
      int t = g.step(v, gen);
      if (t != CoverGraph::kUndefined && !seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = 1;
        tree.push_back({gen, v});
        queue.push_back(t);
      }
      int s = g.step(v, -gen);
      if (s != CoverGraph::kUndefined && !seen[static_cast<std::size_t>(s)]) {
        seen[static_cast<std::size_t>(s)] = 1;
        tree.push_back({gen, s});
        queue.push_back(s);
      }
    }
  }
  return build_basis(g, std::move(tree));
}

SpanningTreeBasis basis_from_tree(const CoverGraph& g, const std::vector<TreeEdge>& tree) {
  return build_basis(g, tree);
}

Word rewrite_in_basis(const CoverGraph& g, const SpanningTreeBasis& basis, const Word& w) {
  std::vector<Letter> out;
  int v = 0;
  for (Letter l : w.letters()) {
    if (std::abs(l) > g.rank()) throw InputError("word outside the cover alphabet");
    int t = g.step(v, l);
    if (t == CoverGraph::kUndefined) throw InputError("word " + to_string(w) + " is not in the subgroup");
    if (l > 0) {
      if (int b = basis.basis_letter(l, v); b != 0) out.push_back(b);
    } else {
      if (int b = basis.basis_letter(-l, t); b != 0) out.push_back(-b);
    }
    v = t;
  }
  if (v != 0) throw InputError("word " + to_string(w) + " is not in the subgroup");
  return Word::reduce(out);
}

CoverGraph make_rose(int rank) {
  if (rank < 1) throw InputError("rose needs rank >= 1");
  return CoverGraph(rank, std::vector<std::vector<int>>(static_cast<std::size_t>(rank), std::vector<int>{0}));
}

CoverGraph make_kernel_cover(int rank, int modulus, const std::vector<int>& targets) {
  if (modulus < 2) throw InputError("kernel cover needs modulus >= 2");
  if (static_cast<int>(targets.size()) != rank) throw InputError("kernel cover needs one target per generator");
  int span = modulus;
  for (int t : targets) {
    if (t < 0 || t >= modulus) throw InputError("kernel target " + std::to_string(t) + " is not in Z_" + std::to_string(modulus));
    span = std::gcd(span, t);
  }
  if (span != 1) throw InputError("kernel targets must generate Z_" + std::to_string(modulus));
  std::vector<std::vector<int>> maps;
  for (int t : targets) {
    std::vector<int> m(static_cast<std::size_t>(modulus));
    for (int v = 0; v < modulus; ++v) m[static_cast<std::size_t>(v)] = (v + t) % modulus;
    maps.push_back(std::move(m));
  }
  return CoverGraph(rank, std::move(maps));
}

CoverGraph make_grid_cover(int k, int n) {
  if (k < 1 || n < 1) throw InputError("grid cover needs k, n >= 1");
  const int size = k * n;
  std::vector<int> a(static_cast<std::size_t>(size));
  std::vector<int> b(static_cast<std::size_t>(size));
  for (int j = 0; j < size; ++j) {
    a[static_cast<std::size_t>(j)] = (j + n) % size;
    b[static_cast<std::size_t>(j)] = (j + 1) % size;
  }
  return CoverGraph(2, {a, b});
}

std::vector<TreeEdge> grid_paper_tree(int k, int n) {
  if (k < 1 || n < 1) throw InputError("grid cover needs k, n >= 1");
  std::vector<TreeEdge> tree;
  for (int j = 0; j + 1 < k * n; ++j) tree.push_back({2, j});
  return tree;
}

namespace {

std::vector<int> parse_ints(const std::string& text, std::size_t offset) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  std::size_t col = offset;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("expected an integer, got '" + item + "'", 1, static_cast<int>(col) + 1);
    }
    col += item.size() + 1;
  }
  return out;
}

}  // namespace

CoverGraph make_cover(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) throw ParseError("cover spec needs kind:parameters", 1, 1);
  std::string kind = spec.substr(0, colon);
  std::string rest = spec.substr(colon + 1);
  if (kind == "rose") {
    auto p = parse_ints(rest, colon + 1);
    if (p.size() != 1) throw ParseError("rose:R expects one integer", 1, static_cast<int>(colon) + 2);
    return make_rose(p[0]);
  }
  if (kind == "grid") {
    auto p = parse_ints(rest, colon + 1);
    if (p.size() != 2) throw ParseError("grid:K,N expects two integers", 1, static_cast<int>(colon) + 2);
    return make_grid_cover(p[0], p[1]);
  }
  if (kind == "kernel") {
    auto second = rest.find(':');
    auto p = parse_ints(rest.substr(0, second), colon + 1);
    if (p.size() != 1) throw ParseError("kernel:P expects a modulus", 1, static_cast<int>(colon) + 2);
    std::vector<int> targets{1, 1};
    if (second != std::string::npos) targets = parse_ints(rest.substr(second + 1), colon + second + 2);
    return make_kernel_cover(static_cast<int>(targets.size()), p[0], targets);
  }
  throw ParseError("unknown cover kind '" + kind + "'", 1, 1);
}

namespace {
std::string generator_name(int g) {
  if (g < 1 || g > 26) throw InputError("generator index above 26 has no letter name");
  return std::string(1, static_cast<char>('a' + g - 1));
}

int generator_from_name(const std::string& s) {
  if (s.size() != 1 || s[0] < 'a' || s[0] > 'z') throw InputError("bad generator name '" + s + "'");
  return s[0] - 'a' + 1;
}
}  // namespace

nlohmann::json cover_to_json(const CoverGraph& g) {
  nlohmann::json maps = nlohmann::json::object();
  for (int gen = 1; gen <= g.rank(); ++gen) {
    nlohmann::json arr = nlohmann::json::array();
    for (int t : g.map(gen)) arr.push_back(t == CoverGraph::kUndefined ? nlohmann::json(nullptr) : nlohmann::json(t));
    maps[generator_name(gen)] = arr;
  }
  return {{"vertices", g.vertex_count()}, {"base", 0}, {"maps", maps}};
}

CoverGraph cover_from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("vertices").get<int>();
    if (j.at("base").get<int>() != 0) throw InputError("base vertex must be 0");
    const auto& maps = j.at("maps");
    if (!maps.is_object() || maps.empty()) throw InputError("cover maps must be a nonempty object");
    std::vector<std::vector<int>> out(maps.size());
    for (auto it = maps.begin(); it != maps.end(); ++it) {
      int g = generator_from_name(it.key());
      if (g > static_cast<int>(maps.size())) throw InputError("generator names must be consecutive from 'a'");
      std::vector<int> m;
      for (const auto& t : it.value()) m.push_back(t.is_null() ? CoverGraph::kUndefined : t.get<int>());
      if (static_cast<int>(m.size()) != n) throw InputError("map length differs from vertex count");
      out[static_cast<std::size_t>(g - 1)] = std::move(m);
    }
    const int rank = static_cast<int>(out.size());
    return CoverGraph(rank, std::move(out));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed cover JSON: ") + e.what());
  }
}

std::string cover_to_dot(const CoverGraph& g) {
  std::ostringstream os;
  os << "digraph cover {\n";
  for (int v = 0; v < g.vertex_count(); ++v) {
    os << "  v" << v << (v == 0 ? " [shape=doublecircle];\n" : " [shape=circle];\n");
  }
  for (int gen = 1; gen <= g.rank(); ++gen) {
    for (int v = 0; v < g.vertex_count(); ++v) {
      int t = g.step(v, gen);
      if (t != CoverGraph::kUndefined) os << "  v" << v << " -> v" << t << " [label=\"" << generator_name(gen) << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

nlohmann::json tree_to_json(const std::vector<TreeEdge>& tree) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : tree) arr.push_back({{"generator", generator_name(e.generator)}, {"source", e.source}});
  return arr;
}

std::vector<TreeEdge> tree_from_json(const nlohmann::json& j) {
  std::vector<TreeEdge> out;
  try {
    for (const auto& e : j) out.push_back({generator_from_name(e.at("generator").get<std::string>()), e.at("source").get<int>()});
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed tree JSON: ") + e.what());
  }
  return out;
}

}  // namespace mffkit
