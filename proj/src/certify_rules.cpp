#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "mffkit/certify.hpp"
#include "mffkit/ribbon.hpp"

namespace mffkit {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& message) { throw RuleFailure(message); }

void expect_keys(const json& params, std::initializer_list<const char*> required,
                 std::initializer_list<const char*> optional = {}) {
  if (!params.is_object()) fail("parameters must be an object");
  for (const char* key : required) {
    if (!params.contains(key)) fail(std::string("missing parameter '") + key + "'");
  }
  for (const auto& [key, value] : params.items()) {
    const auto match = [&](const char* k) { return key == k; };
    if (std::none_of(required.begin(), required.end(), match) &&
        std::none_of(optional.begin(), optional.end(), match)) {
      fail("unknown parameter '" + key + "'");
    }
  }
}

int get_int(const json& j, const char* key, int lo, int hi) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(std::string("parameter '") + key + "' must be an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > hi) fail(std::string("parameter '") + key + "' out of range");
  return static_cast<int>(x);
}

bool get_bool(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_boolean()) fail(std::string("parameter '") + key + "' must be a boolean");
  return v.get<bool>();
}

const json& get_array(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_array()) fail(std::string("parameter '") + key + "' must be an array");
  return v;
}

std::vector<int> get_int_list(const json& j, const char* key, int lo, int hi) {
  std::vector<int> out;
  for (const auto& v : get_array(j, key)) {
    if (!v.is_number_integer()) fail(std::string("parameter '") + key + "' must list integers");
    const long long x = v.get<long long>();
    if (x < lo || x > hi) fail(std::string("parameter '") + key + "' out of range");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

/// Canonical text only, so that distinct certificates never spell the same element.
Word read_free_word(int rank, const json& j) {
  if (!j.is_string()) fail("word must be a string");
  const std::string text = j.get<std::string>();
  const Word w = parse_word(text, Alphabet(rank));
  if (to_string(w) != text) fail("word '" + text + "' is not in canonical form");
  return w;
}

std::vector<Word> read_free_words(int rank, const json& j) {
  if (!j.is_array()) fail("word list must be an array");
  std::vector<Word> out;
  for (const auto& w : j) out.push_back(read_free_word(rank, w));
  return out;
}

VFreeWord read_vfree_word(const VFreeGroup& g, const json& j) {
  if (!j.is_string()) fail("word must be a string");
  const std::string text = j.get<std::string>();
  const VFreeWord w = g.parse(text);
  if (g.to_string(w) != text) fail("word '" + text + "' is not in canonical form");
  return w;
}

GroupObject group_from_json(const json& j) {
  if (!j.is_object() || j.size() != 2 || !j.contains("free_rank") || !j.contains("torsion")) {
    throw InputError("group must be {free_rank, torsion}");
  }
  if (!j["free_rank"].is_number_integer() || !j["torsion"].is_array()) throw InputError("malformed group");
  GroupObject g;
  g.free_rank = j["free_rank"].get<int>();
  for (const auto& t : j["torsion"]) {
    if (!t.is_number_integer()) throw InputError("torsion orders must be integers");
    g.torsion.push_back(t.get<int>());
  }
  const int limit = g.torsion.empty() ? 26 : 18;
  if (g.free_rank < 0 || g.free_rank > limit) throw InputError("free rank out of range");
  if (g.torsion.empty() && g.free_rank == 0) throw InputError("trivial group");
  g.vfree();  // validates the orders
  return g;
}

json group_to_json(const GroupObject& g) { return {{"free_rank", g.free_rank}, {"torsion", g.torsion}}; }

int free_rank_of(const Judgment& j) {
  if (!j.group.is_free()) fail("premise group must be free");
  return j.group.free_rank;
}

std::vector<Word> tuple_words(const Judgment& j, std::size_t i) {
  const VFreeGroup g = j.group.vfree();
  std::vector<Word> out;
  for (const auto& w : j.subgroups.at(i)) out.push_back(g.to_word(w));
  return out;
}

std::vector<VFreeWord> as_vfree(const std::vector<Word>& ws, int rank) {
  const VFreeGroup g = VFreeGroup::free(rank);
  std::vector<VFreeWord> out;
  for (const auto& w : ws) out.push_back(g.from_word(w));
  return out;
}

void expect_premises(const std::vector<Judgment>& premises, std::size_t count) {
  if (premises.size() != count) {
    fail("expected " + std::to_string(count) + " premises, got " + std::to_string(premises.size()));
  }
}

const Judgment& need(const std::vector<Judgment>& premises, std::size_t i, JudgmentKind kind) {
  const Judgment& j = premises.at(i);
  if (j.kind != kind) fail("premise " + std::to_string(i + 1) + " has the wrong judgment kind");
  return j;
}

/// Premise that is MFF or CommonMFF over a free group.
const Judgment& need_factor(const std::vector<Judgment>& premises, std::size_t i) {
  const Judgment& j = premises.at(i);
  if (j.kind == JudgmentKind::Treeable) fail("premise " + std::to_string(i + 1) + " must be a factor judgment");
  free_rank_of(j);
  return j;
}

int fold_rank(int rank, const std::vector<Word>& ws) { return fold(rank, ws).subgroup_rank(); }

bool generates_free_group(int rank, const std::vector<Word>& ws) {
  const CoverGraph g = fold(rank, ws);
  return g.vertex_count() == 1 && g.subgroup_rank() == rank;
}

SideCondition checked(std::string name, json witness) {
  return {std::move(name), SideCondition::Status::Checked, std::move(witness), {}};
}

SideCondition cited(std::string name, std::string anchor) {
  return {std::move(name), SideCondition::Status::Cited, nullptr, std::move(anchor)};
}

GroupHom read_hom(int source, int target, const json& j) {
  std::vector<Word> images = read_free_words(target, j);
  if (static_cast<int>(images.size()) != source) fail("homomorphism needs one image per generator");
  return GroupHom(source, target, std::move(images));
}

std::vector<Word> map_words(const GroupHom& h, const std::vector<Word>& ws) {
  std::vector<Word> out;
  for (const auto& w : ws) out.push_back(h(w));
  return out;
}

}  // namespace

// ---- judgments ----

Judgment Judgment::mff(GroupObject g, std::vector<VFreeWord> tuple) {
  return {JudgmentKind::MFF, std::move(g), {std::move(tuple)}};
}

Judgment Judgment::common(GroupObject g, std::vector<std::vector<VFreeWord>> tuples) {
  return {JudgmentKind::CommonMFF, std::move(g), std::move(tuples)};
}

Judgment Judgment::treeable(GroupObject g) { return {JudgmentKind::Treeable, std::move(g), {}}; }

std::optional<VFreeWord> Judgment::cyclic() const {
  if (kind != JudgmentKind::MFF || subgroups.size() != 1 || subgroups[0].size() != 1) return std::nullopt;
  return subgroups[0][0];
}

namespace {
const char* kind_name(JudgmentKind k) {
  switch (k) {
    case JudgmentKind::MFF: return "MFF";
    case JudgmentKind::CommonMFF: return "CommonMFF";
    case JudgmentKind::Treeable: return "Treeable";
  }
  return "?";
}
}  // namespace

json judgment_to_json(const Judgment& j) {
  const VFreeGroup g = j.group.vfree();
  json subgroups = json::array();
  for (const auto& tuple : j.subgroups) {
    json t = json::array();
    for (const auto& w : tuple) t.push_back(g.to_string(w));
    subgroups.push_back(std::move(t));
  }
  return {{"kind", kind_name(j.kind)}, {"group", group_to_json(j.group)}, {"subgroups", std::move(subgroups)}};
}

Judgment judgment_from_json(const json& j) {
  if (!j.is_object() || j.size() != 3 || !j.contains("kind") || !j.contains("group") || !j.contains("subgroups")) {
    throw InputError("judgment must be {kind, group, subgroups}");
  }
  Judgment out;
  const std::string kind = j["kind"].is_string() ? j["kind"].get<std::string>() : "";
  if (kind == "MFF") out.kind = JudgmentKind::MFF;
  else if (kind == "CommonMFF") out.kind = JudgmentKind::CommonMFF;
  else if (kind == "Treeable") out.kind = JudgmentKind::Treeable;
  else throw InputError("unknown judgment kind");
  out.group = group_from_json(j["group"]);
  const VFreeGroup g = out.group.vfree();
  if (!j["subgroups"].is_array()) throw InputError("subgroups must be an array");
  for (const auto& tuple : j["subgroups"]) {
    if (!tuple.is_array() || tuple.empty()) throw InputError("each subgroup is a nonempty list of words");
    std::vector<VFreeWord> t;
    for (const auto& w : tuple) {
      if (!w.is_string()) throw InputError("words must be strings");
      const VFreeWord u = g.parse(w.get<std::string>());
      if (g.to_string(u) != w.get<std::string>()) throw InputError("non-canonical word in judgment");
      t.push_back(u);
    }
    out.subgroups.push_back(std::move(t));
  }
  const std::size_t n = out.subgroups.size();
  if ((out.kind == JudgmentKind::MFF && n != 1) || (out.kind == JudgmentKind::Treeable && n != 0) ||
      (out.kind == JudgmentKind::CommonMFF && n == 0)) {
    throw InputError("subgroup count does not match the judgment kind");
  }
  return out;
}

std::string describe(const Judgment& j) {
  const VFreeGroup g = j.group.vfree();
  std::string group;
  if (j.group.free_rank > 0) group = "F_" + std::to_string(j.group.free_rank);
  for (int n : j.group.torsion) group += (group.empty() ? "" : " * ") + std::string("Z_") + std::to_string(n);
  if (j.kind == JudgmentKind::Treeable) return "Treeable(" + group + ")";
  std::string subs;
  for (const auto& tuple : j.subgroups) {
    std::string t;
    for (const auto& w : tuple) t += (t.empty() ? "" : ", ") + g.to_string(w);
    subs += (subs.empty() ? "<" : ", <") + t + ">";
  }
  return std::string(kind_name(j.kind)) + "(" + subs + " <= " + group + ")";
}

json side_condition_to_json(const SideCondition& s) {
  if (s.status == SideCondition::Status::Checked) {
    return {{"name", s.name}, {"status", "checked"}, {"witness", s.witness}};
  }
  return {{"name", s.name}, {"status", "cited"}, {"anchor", s.anchor}};
}

const std::map<std::string, std::string>& citation_index() {
  static const std::map<std::string, std::string> index = {
      {"free-factor-is-mff", "A free factor of a free group is a measure free factor."},
      {"automorphism-invariance", "Automorphisms of the ambient group carry measure free factors to measure free factors."},
      {"surface-commutator", "The product of g commutators generates a measure free factor of F_2g."},
      {"orientable-boundary",
       "The boundary subgroups of a compact orientable surface of positive genus form a measure free factor of its free "
       "fundamental group."},
      {"basis-splitting", "The cyclic subgroups of a basis of a free measure free factor are common measure free factors."},
      {"free-product-factors",
       "Measure free factors of the factors of a free product are common measure free factors of the product."},
      {"factor-transitivity",
       "Common measure free factors jointly generate a measure free factor, and free factors of a measure free factor "
       "are measure free factors."},
      {"hnn-extension",
       "In an HNN extension of a treeable group along common measure free factors, a further common factor stays a "
       "measure free factor."},
      {"amalgam",
       "In an amalgam of treeable groups over a measure free factor of one side, measure free factors of the other side "
       "stay measure free factors."},
      {"treeable-groups", "Free groups and free products of free groups with finite cyclic groups are treeable."},
      {"lifting-theorem",
       "If the complete lift of w to a finite index subgroup generates a measure free factor there, w does in the "
       "ambient treeable group of finite cost."},
  };
  return index;
}

namespace {

// ---- rules ----

RuleOutcome rule_free_factor(const json& p, const std::vector<Judgment>& premises) {
  expect_keys(p, {"rank", "tuple"}, {"extension", "inverse"});
  expect_premises(premises, 0);
  const int r = get_int(p, "rank", 1, 26);
  const std::vector<Word> tuple = read_free_words(r, get_array(p, "tuple"));
  if (tuple.empty()) fail("empty tuple");
  for (const auto& w : tuple) {
    if (w.empty()) fail("trivial element in tuple");
  }
  RuleOutcome out{Judgment::mff(GroupObject::free(r), as_vfree(tuple, r)), {}};
  if (!p.contains("extension") && !p.contains("inverse")) {
    if (tuple.size() != 1) fail("a tuple needs a basis extension and its inverse");
    const WhiteheadDescent d = whitehead_descent(tuple[0], Alphabet(r));
    if (d.minimal.size() != 1) fail("element is not primitive");
    out.side_conditions.push_back(
        checked("primitive", {{"minimal", to_string(d.minimal)}, {"moves", static_cast<int>(d.moves.size())}}));
  } else {
    expect_keys(p, {"rank", "tuple", "extension", "inverse"});
    std::vector<Word> basis = tuple;
    for (const auto& w : read_free_words(r, get_array(p, "extension"))) basis.push_back(w);
    if (static_cast<int>(basis.size()) != r) fail("tuple and extension must have rank many elements");
    const GroupHom phi(r, r, basis);
    const GroupHom psi = read_hom(r, r, p["inverse"]);
    if (!verify_mutual_inverse(phi, psi)) fail("extension is not a basis");
    out.side_conditions.push_back(checked("basis_extension", {{"basis_size", r}, {"mutual_inverse", true}}));
  }
  out.side_conditions.push_back(cited("free_factor", "free-factor-is-mff"));
  return out;
}

RuleOutcome rule_conj_aut(const json& p, const std::vector<Judgment>& premises) {
  expect_keys(p, {"phi", "psi"});
  expect_premises(premises, 1);
  const Judgment& prem = need(premises, 0, JudgmentKind::MFF);
  const int r = free_rank_of(prem);
  const GroupHom phi = read_hom(r, r, p["phi"]);
  const GroupHom psi = read_hom(r, r, p["psi"]);
  if (!verify_mutual_inverse(phi, psi)) fail("phi and psi are not mutually inverse");
  const std::vector<Word> image = map_words(phi, tuple_words(prem, 0));
  RuleOutcome out{Judgment::mff(prem.group, as_vfree(image, r)), {}};
  out.side_conditions.push_back(checked("automorphism", {{"mutual_inverse", true}}));
  out.side_conditions.push_back(cited("invariance", "automorphism-invariance"));
  return out;
}

RuleOutcome rule_surface_axiom(const json& p, const std::vector<Judgment>& premises) {
  expect_keys(p, {"genus"});
  expect_premises(premises, 0);
  const int g = get_int(p, "genus", 1, 13);
  const std::vector<int> params{g};
  const PaperWord w = make_paper_word(WordFamily::SurfaceCommutator, params);
  RuleOutcome out{Judgment::mff(GroupObject::free(w.rank), as_vfree({w.word}, w.rank)), {}};
  out.side_conditions.push_back(checked("commutator_word", {{"genus", g}, {"word", to_string(w.word)}}));
  out.side_conditions.push_back(cited("surface", "surface-commutator"));
  return out;
}

RuleOutcome rule_boundary_axiom(const json& p, const std::vector<Judgment>& premises) {
  expect_keys(p, {"cover", "rotation", "faces"}, {"tree"});
  expect_premises(premises, 0);
  const CoverGraph cover = cover_from_json(p["cover"]);
  std::vector<std::vector<Letter>> rotation;
  for (const auto& at : get_array(p, "rotation")) {
    if (!at.is_array()) fail("rotation must list letters per vertex");
    std::vector<Letter> ls;
    for (const auto& l : at) {
      if (!l.is_number_integer()) fail("rotation letters must be integers");
      ls.push_back(l.get<int>());
    }
    rotation.push_back(std::move(ls));
  }
  const RibbonGraph ribbon(cover, rotation);
  const SpanningTreeBasis basis = p.contains("tree") ? basis_from_tree(cover, tree_from_json(p["tree"]))
                                                     : basis_from_tree(cover);
  const std::vector<Face> faces = ribbon.faces();
  const int genus = ribbon.genus();
  if (genus < 1) fail("surface has genus " + std::to_string(genus) + ", the boundary rule needs genus at least 1");

  std::vector<bool> used(faces.size(), false);
  std::vector<Word> tuple;
  for (const auto& spec : get_array(p, "faces")) {
    expect_keys(spec, {"vertex", "letter", "invert"});
    const Dart dart{get_int(spec, "vertex", 0, cover.vertex_count() - 1),
                    get_int(spec, "letter", -cover.rank(), cover.rank())};
    if (dart.letter == 0 || cover.step(dart.vertex, dart.letter) == CoverGraph::kUndefined) fail("no such dart");
    std::size_t which = faces.size();
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (std::find(faces[f].darts.begin(), faces[f].darts.end(), dart) != faces[f].darts.end()) which = f;
    }
    if (which == faces.size()) fail("dart lies on no face");
    if (used[which]) fail("face listed twice");
    used[which] = true;
    Word w = based_face_word(ribbon.face_from(dart), basis);
    if (get_bool(spec, "invert")) w = w.inverse();
    tuple.push_back(rewrite_in_basis(cover, basis, w));
  }
  if (std::find(used.begin(), used.end(), false) != used.end()) fail("every face must be listed once");
  const int R = basis.rank();
  const int folded = fold_rank(R, tuple);
  if (folded != static_cast<int>(faces.size())) fail("boundary words do not fold to a free subgroup of full rank");
  RuleOutcome out{Judgment::mff(GroupObject::free(R), as_vfree(tuple, R)), {}};
  out.side_conditions.push_back(checked("ribbon_surface", {{"vertices", cover.vertex_count()},
                                                           {"edges", cover.edge_count()},
                                                           {"faces", static_cast<int>(faces.size())},
                                                           {"genus", genus}}));
  out.side_conditions.push_back(checked("boundary_rank", {{"folded_rank", folded}}));
  out.side_conditions.push_back(cited("boundary", "orientable-boundary"));
  return out;
}

RuleOutcome rule_split(const json& p, const std::vector<Judgment>& premises) {
  expect_keys(p, {"parts"});
  expect_premises(premises, 1);
  const Judgment& prem = need(premises, 0, JudgmentKind::MFF);
  const int r = free_rank_of(prem);
  const std::vector<Word> tuple = tuple_words(prem, 0);
  const int s = static_cast<int>(tuple.size());
  if (fold_rank(r, tuple) != s) fail("tuple is not a free basis of the subgroup it generates");
  std::vector<int> seen(tuple.size(), 0);
  std::vector<std::vector<VFreeWord>> out_tuples;
  const VFreeGroup g = VFreeGroup::free(r);
  for (const auto& part : get_array(p, "parts")) {
    if (!part.is_array() || part.empty()) fail("each part is a nonempty index list");
    std::vector<VFreeWord> t;
    for (const auto& i : part) {
      if (!i.is_number_integer() || i.get<long long>() < 0 || i.get<long long>() >= s) fail("part index out of range");
      ++seen[i.get<std::size_t>()];
      t.push_back(g.from_word(tuple[i.get<std::size_t>()]));
    }
    out_tuples.push_back(std::move(t));
  }
  if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; })) fail("parts must partition the tuple");
  RuleOutcome out{Judgment::common(prem.group, std::move(out_tuples)), {}};
  out.side_conditions.push_back(checked("free_basis", {{"folded_rank", s}}));
  out.side_conditions.push_back(cited("split", "basis-splitting"));
  return out;
}

RuleOutcome rule_freeprod(const json& p, const std::vector<Judgment>& premises) {
  expect_keys(p, {"rank", "embeddings"});
  if (premises.empty()) fail("free product needs at least one factor");
  const int R = get_int(p, "rank", 1, 26);
  const json& emb = get_array(p, "embeddings");
  if (emb.size() != premises.size()) fail("one embedding per premise");
  std::vector<Word> all_images;
  std::vector<std::vector<VFreeWord>> tuples;
  json ranks = json::array();
  int total = 0;
  for (std::size_t i = 0; i < premises.size(); ++i) {
    const Judgment& prem = need_factor(premises, i);
    const int r = free_rank_of(prem);
    const GroupHom phi = read_hom(r, R, emb[i]);
    for (const auto& w : phi.images()) all_images.push_back(w);
    for (std::size_t t = 0; t < prem.subgroups.size(); ++t) {
      tuples.push_back(as_vfree(map_words(phi, tuple_words(prem, t)), R));
    }
    total += r;
    ranks.push_back(r);
  }
  if (total != R) fail("factor ranks do not add up to the ambient rank");
  if (!generates_free_group(R, all_images)) fail("embedded factor bases do not form a basis");
  RuleOutcome out{Judgment::common(GroupObject::free(R), std::move(tuples)), {}};
  out.side_conditions.push_back(checked("factor_basis", {{"ranks", ranks}, {"generates", true}}));
  out.side_conditions.push_back(cited("free_product", "free-product-factors"));
  return out;
}

RuleOutcome rule_subfactor(const json& p, const std::vector<Judgment>& premises) {
  expect_keys(p, {"basis", "inverse", "keep"});
  expect_premises(premises, 1);
  const Judgment& prem = need_factor(premises, 0);
  const int R = free_rank_of(prem);
  std::vector<Word> u;
  for (std::size_t t = 0; t < prem.subgroups.size(); ++t) {
    for (const auto& w : tuple_words(prem, t)) u.push_back(w);
  }
  const int s = static_cast<int>(u.size());
  if (s > 26) fail("joint tuple too large");
  if (fold_rank(R, u) != s) fail("joint tuple is not a free basis");
  const GroupHom phi = read_hom(s, s, p["basis"]);
  const GroupHom psi = read_hom(s, s, p["inverse"]);
  if (!verify_mutual_inverse(phi, psi)) fail("basis change is not invertible");
  const int q = get_int(p, "keep", 1, s);
  const GroupHom subst(s, R, u);
  std::vector<Word> kept;
  for (int i = 1; i <= q; ++i) kept.push_back(subst(phi.image(i)));
  RuleOutcome out{Judgment::mff(prem.group, as_vfree(kept, R)), {}};
  out.side_conditions.push_back(checked("joint_basis", {{"folded_rank", s}, {"mutual_inverse", true}, {"keep", q}}));
  out.side_conditions.push_back(cited("transitivity", "factor-transitivity"));
  return out;
}

RuleOutcome rule_treeable(const json& p, const std::vector<Judgment>& premises) {
  expect_keys(p, {"group"});
  expect_premises(premises, 0);
  RuleOutcome out{Judgment::treeable(group_from_json(p["group"])), {}};
  out.side_conditions.push_back(cited("treeable", "treeable-groups"));
  return out;
}

RuleOutcome rule_proper_power_guard(const json& p, const std::vector<Judgment>& premises) {
  expect_keys(p, {});
  expect_premises(premises, 1);
  const Judgment& prem = need(premises, 0, JudgmentKind::MFF);
  if (!prem.cyclic()) fail("guard applies to cyclic subgroups");
  return {prem, {}};
}

RuleOutcome rule_hnn(const json& p, const std::vector<Judgment>& premises) {
  expect_keys(p, {"domains", "images", "target", "alpha", "rank", "base", "stable"});
  expect_premises(premises, 2);
  const Judgment& common = need(premises, 0, JudgmentKind::CommonMFF);
  const Judgment& tree = need(premises, 1, JudgmentKind::Treeable);
  if (!(tree.group == common.group)) fail("treeable premise is about another group");
  const int r = free_rank_of(common);
  const int count = static_cast<int>(common.subgroups.size());
  const std::vector<int> domains = get_int_list(p, "domains", 0, count - 1);
  const std::vector<int> images = get_int_list(p, "images", 0, count - 1);
  const int target = get_int(p, "target", 0, count - 1);
  const json& alpha = get_array(p, "alpha");
  const std::size_t t = domains.size();
  if (t == 0 || images.size() != t || alpha.size() != t) fail("one domain, image and alpha per stable letter");
  if (std::set<int>(domains.begin(), domains.end()).size() != t) fail("domains must be distinct");
  for (std::size_t j = 0; j < t; ++j) {
    if (target == domains[j] || target == images[j]) fail("target must differ from the edge groups");
  }
  const int R = get_int(p, "rank", 1, 26);
  const GroupHom iota = read_hom(r, R, p["base"]);
  const std::vector<Word> stable = read_free_words(R, get_array(p, "stable"));
  if (stable.size() != t) fail("one stable letter image per edge");

  int domain_rank = 0;
  json edges = json::array();
  for (std::size_t j = 0; j < t; ++j) {
    const std::vector<Word> h = tuple_words(common, static_cast<std::size_t>(domains[j]));
    const std::vector<Word> a = read_free_words(r, alpha[j]);
    if (a.size() != h.size()) fail("alpha needs one image per domain generator");
    const int hr = fold_rank(r, h);
    if (hr != static_cast<int>(h.size())) fail("domain generators are not a free basis");
    if (fold_rank(r, a) != hr) fail("alpha is not injective");
    const CoverGraph image_core = fold(r, tuple_words(common, static_cast<std::size_t>(images[j])));
    for (const auto& w : a) {
      if (!membership(image_core, w)) fail("alpha leaves the image subgroup");
    }
    const Word& s = stable[j];
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (s * iota(h[i]) * s.inverse() != iota(a[i])) fail("identification breaks a stable letter relation");
    }
    domain_rank += hr;
    edges.push_back({{"domain_rank", hr}, {"relations", static_cast<int>(h.size())}});
  }
  std::vector<Word> gens = iota.images();
  for (const auto& s : stable) gens.push_back(s);
  if (!generates_free_group(R, gens)) fail("identification is not onto");
  if (R != r + static_cast<int>(t) - domain_rank) fail("rank count does not match the HNN extension");
  const std::vector<Word> k = map_words(iota, tuple_words(common, static_cast<std::size_t>(target)));
  RuleOutcome out{Judgment::mff(GroupObject::free(R), as_vfree(k, R)), {}};
  out.side_conditions.push_back(checked("edge_maps", edges));
  out.side_conditions.push_back(
      checked("identification", {{"rank", R}, {"onto", true}, {"stable_letters", static_cast<int>(t)}}));
  out.side_conditions.push_back(cited("hnn", "hnn-extension"));
  return out;
}

RuleOutcome amalgam(const json& p, const std::vector<Judgment>& premises, bool plus) {
  expect_keys(p, {"edge", "rank", "first", "second"});
  expect_premises(premises, 4);
  const Judgment& t1 = need(premises, 0, JudgmentKind::Treeable);
  const Judgment& t2 = need(premises, 1, JudgmentKind::Treeable);
  const Judgment& left = need(premises, 2, plus ? JudgmentKind::CommonMFF : JudgmentKind::MFF);
  const Judgment& right = need(premises, 3, JudgmentKind::MFF);
  if (!(t1.group == left.group) || !(t2.group == right.group)) fail("treeable premises do not match the factors");
  if (plus && left.subgroups.size() != 2) fail("left premise must list the edge group and one more factor");
  const int r1 = free_rank_of(left);
  const int r2 = free_rank_of(right);
  const std::vector<Word> lambda = tuple_words(left, 0);
  const std::vector<Word> edge = read_free_words(r2, get_array(p, "edge"));
  if (edge.size() != lambda.size()) fail("edge map needs one image per edge generator");
  const int lr = fold_rank(r1, lambda);
  if (lr != static_cast<int>(lambda.size()) || fold_rank(r2, edge) != lr) fail("edge groups are not isomorphic");
  const int R = get_int(p, "rank", 1, 26);
  const GroupHom i1 = read_hom(r1, R, p["first"]);
  const GroupHom i2 = read_hom(r2, R, p["second"]);
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (i1(lambda[i]) != i2(edge[i])) fail("identifications disagree on the edge group");
  }
  std::vector<Word> gens = i1.images();
  for (const auto& w : i2.images()) gens.push_back(w);
  if (!generates_free_group(R, gens)) fail("identification is not onto");
  if (R != r1 + r2 - lr) fail("rank count does not match the amalgam");
  const std::vector<Word> h = map_words(i2, tuple_words(right, 0));
  RuleOutcome out;
  if (plus) {
    const std::vector<Word> k = map_words(i1, tuple_words(left, 1));
    out.conclusion = Judgment::common(GroupObject::free(R), {as_vfree(h, R), as_vfree(k, R)});
  } else {
    out.conclusion = Judgment::mff(GroupObject::free(R), as_vfree(h, R));
  }
  out.side_conditions.push_back(checked("edge_group", {{"rank", lr}}));
  out.side_conditions.push_back(checked("identification", {{"rank", R}, {"onto", true}}));
  out.side_conditions.push_back(cited("amalgam", "amalgam"));
  return out;
}

RuleOutcome rule_amalgam(const json& p, const std::vector<Judgment>& premises) { return amalgam(p, premises, false); }
RuleOutcome rule_amalgam_plus(const json& p, const std::vector<Judgment>& premises) { return amalgam(p, premises, true); }

RuleOutcome rule_lift(const json& p, const std::vector<Judgment>& premises) {
  expect_keys(p, {"rank", "word", "cover", "tree", "lift"});
  expect_premises(premises, 1);
  const Judgment& prem = need(premises, 0, JudgmentKind::MFF);
  const int r = get_int(p, "rank", 1, 26);
  const Word w = read_free_word(r, p["word"]);
  if (w.empty()) fail("cannot lift the identity");
  const CoverGraph cover = cover_from_json(p["cover"]);
  if (cover.rank() != r) fail("cover is over another free group");
  if (!cover.is_complete()) fail("cover must have finite index");
  const SpanningTreeBasis basis = basis_from_tree(cover, tree_from_json(p["tree"]));
  const CompleteLift lift = complete_lift(cover, w, basis);
  if (lift_to_json(lift) != p["lift"]) fail("supplied lift differs from the recomputed one");
  const FreeLiftReport report = verify_free_lift(lift, cover);
  if (!report.accepted) fail("lift is not free: " + report.reason);
  const CostLedger ledger = cost_ledger(lift.index, static_cast<int>(lift.entries.size()), Rational(1, lift.index));
  if (!ledger.holds) fail("cost ledger does not balance");
  if (free_rank_of(prem) != basis.rank()) fail("premise is not about the subgroup of the cover");
  if (tuple_words(prem, 0) != lift.rewrites()) fail("premise tuple is not the rewritten lift");
  RuleOutcome out{Judgment::mff(GroupObject::free(r), as_vfree({w}, r)), {}};
  out.side_conditions.push_back(checked("complete_lift", {{"index", lift.index},
                                                          {"entries", static_cast<int>(lift.entries.size())},
                                                          {"total_multiplicity", lift.total_multiplicity()}}));
  out.side_conditions.push_back(
      checked("free_lift", {{"folded_rank", report.folded_rank}, {"members", report.members}}));
  out.side_conditions.push_back(checked("cost_ledger", ledger_to_json(ledger)));
  out.side_conditions.push_back(checked("premise_matches", {{"subgroup_rank", basis.rank()}}));
  out.side_conditions.push_back(cited("ambient_treeable", "treeable-groups"));
  out.side_conditions.push_back(cited("lift", "lifting-theorem"));
  return out;
}

RuleOutcome rule_vfree_lift(const json& p, const std::vector<Judgment>& premises) {
  expect_keys(p, {"group", "word", "which"});
  expect_premises(premises, 1);
  const Judgment& prem = need(premises, 0, JudgmentKind::MFF);
  const GroupObject go = group_from_json(p["group"]);
  if (go.is_free()) fail("group needs a torsion factor");
  const VFreeGroup g = go.vfree();
  const int which = get_int(p, "which", 1, static_cast<int>(go.torsion.size()));
  const BranchedCoverSubgroup sub = branched_cover_subgroup(g, which);
  if (!verify_stabilizer(sub)) fail("factor conjugates do not generate the stabilizer");
  if (!verify_reidemeister_schreier(sub)) fail("relators do not rewrite to the factor relators");
  const VFreeWord w = read_vfree_word(g, p["word"]);
  const VFreeLift lift = complete_lift_vfree(sub, w);
  if (!(prem.group == GroupObject::of(sub.factor_group))) fail("premise is not about the factor group");
  if (prem.subgroups[0] != std::vector<VFreeWord>{sub.restrict_to_factor(lift.u)}) {
    fail("premise does not generate <u>");
  }
  if (has_finite_order(g, lift.u)) fail("u has finite order");
  if (lift.total_multiplicity() != sub.index) fail("multiplicities do not add up to the index");
  const CosetAction action = coset_action_vfree(sub);
  json entries = json::array();
  std::set<int> factors_used;
  for (const auto& e : lift.entries) {
    if (!(e.lift == lift_product(sub, lift.u, e))) fail("lift differs from its factor product");
    if (apply(action, e.lift) != 0) fail("lift leaves the subgroup");
    for (int f : e.factor_sequence) {
      if (!factors_used.insert(f).second) fail("factor used by two lifts");
    }
    entries.push_back({{"coset", e.coset}, {"multiplicity", e.multiplicity}, {"factors", e.factor_sequence}});
  }
  // <u_j1 ... u_jm> is a free factor of <u_j1, ..., u_jm>.
  const int m = lift.m;
  std::vector<Word> phi_images;
  std::vector<Word> psi_images;
  Word head;
  Word head_inverse;
  for (int i = 2; i <= m; ++i) head_inverse = Word::generator(-i) * head_inverse;
  for (int i = 1; i <= m; ++i) head *= Word::generator(i);
  phi_images.push_back(head);
  psi_images.push_back(Word::generator(1) * head_inverse);
  for (int i = 2; i <= m; ++i) {
    phi_images.push_back(Word::generator(i));
    psi_images.push_back(Word::generator(i));
  }
  if (!verify_mutual_inverse(GroupHom(m, m, phi_images), GroupHom(m, m, psi_images))) fail("basis change failed");
  const CostLedger ledger = cost_ledger(sub.index, lift.d, Rational(1, sub.index));
  if (!ledger.holds) fail("cost ledger does not balance");
  RuleOutcome out{Judgment::mff(go, {w}), {}};
  out.side_conditions.push_back(checked("branched_cover", {{"index", sub.index}, {"stabilizer", true},
                                                           {"free_product", true}}));
  out.side_conditions.push_back(checked("complete_lift", {{"p", lift.p}, {"d", lift.d}, {"m", lift.m},
                                                          {"entries", entries}}));
  out.side_conditions.push_back(checked("infinite_order", {{"u", g.to_string(lift.u)}}));
  out.side_conditions.push_back(checked("primitive_product", {{"rank", m}, {"mutual_inverse", true}}));
  out.side_conditions.push_back(checked("cost_ledger", ledger_to_json(ledger)));
  out.side_conditions.push_back(cited("factors", "free-product-factors"));
  out.side_conditions.push_back(cited("transitivity", "factor-transitivity"));
  out.side_conditions.push_back(cited("ambient_treeable", "treeable-groups"));
  out.side_conditions.push_back(cited("lift", "lifting-theorem"));
  return out;
}

using RuleFn = std::function<RuleOutcome(const json&, const std::vector<Judgment>&)>;

const std::map<std::string, RuleFn>& registry() {
  static const std::map<std::string, RuleFn> rules = {
      {"FREE_FACTOR", rule_free_factor},     {"CONJ_AUT", rule_conj_aut},
      {"SURFACE_AXIOM", rule_surface_axiom}, {"BOUNDARY_AXIOM", rule_boundary_axiom},
      {"SPLIT", rule_split},                 {"FREEPROD", rule_freeprod},
      {"SUBFACTOR", rule_subfactor},         {"HNN", rule_hnn},
      {"AMALGAM", rule_amalgam},             {"AMALGAM_PLUS", rule_amalgam_plus},
      {"TREEABLE_AXIOM", rule_treeable},     {"LIFT", rule_lift},
      {"VFREE_LIFT", rule_vfree_lift},       {"PROPER_POWER_GUARD", rule_proper_power_guard},
  };
  return rules;
}

void guard(RuleOutcome& out) {
  if (out.conclusion.kind == JudgmentKind::Treeable) return;
  const VFreeGroup g = out.conclusion.group.vfree();
  for (const auto& tuple : out.conclusion.subgroups) {
    for (const auto& w : tuple) {
      if (w.empty()) fail("conclusion contains the identity");
    }
  }
  const auto c = out.conclusion.cyclic();
  if (!c) return;
  if (has_finite_order(g, *c)) fail("conclusion generator has finite order");
  if (is_proper_power(g, *c)) fail("conclusion generator is a proper power");
  out.side_conditions.push_back(checked("proper_power_guard", {{"word", g.to_string(*c)}, {"proper_power", false}}));
}

}  // namespace

const std::vector<std::string>& rule_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

RuleOutcome apply_rule(const std::string& rule, const json& params, const std::vector<Judgment>& premises) {
  const auto it = registry().find(rule);
  if (it == registry().end()) throw RuleFailure("unknown rule '" + rule + "'");
  try {
    RuleOutcome out = it->second(params, premises);
    guard(out);
    return out;
  } catch (const RuleFailure& e) {
    throw RuleFailure(rule + ": " + e.what());
  } catch (const std::exception& e) {
    throw RuleFailure(rule + ": " + e.what());
  }
}

}  // namespace mffkit
