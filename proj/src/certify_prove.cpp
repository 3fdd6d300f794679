#include <cstdlib>
#include <numeric>

#include "mffkit/certify.hpp"
#include "mffkit/ribbon.hpp"

namespace mffkit {

using json = nlohmann::json;

namespace {

json words_json(const std::vector<Word>& ws) {
  json out = json::array();
  for (const auto& w : ws) out.push_back(to_string(w));
  return out;
}

json identity_images(int rank) {
  json out = json::array();
  for (int i = 1; i <= rank; ++i) out.push_back(to_string(Word::generator(i)));
  return out;
}

Word letters_product(const std::vector<int>& letters) {
  Word w;
  for (int l : letters) w *= Word::generator(l);
  return w;
}

/// Orientation-preserving rotation a, A, b, B, ... used at every vertex.
std::vector<Letter> standard_rotation(int rank) {
  std::vector<Letter> r;
  for (int g = 1; g <= rank; ++g) {
    r.push_back(g);
    r.push_back(-g);
  }
  return r;
}

json rotation_json(const std::vector<std::vector<Letter>>& rotation) {
  json out = json::array();
  for (const auto& at : rotation) out.push_back(at);
  return out;
}

json lift_params(int rank, const Word& w, const CoverGraph& cover, const SpanningTreeBasis& basis) {
  return {{"rank", rank},
          {"word", to_string(w)},
          {"cover", cover_to_json(cover)},
          {"tree", tree_to_json(basis.tree)},
          {"lift", lift_to_json(complete_lift(cover, w, basis))}};
}

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d) {
    if (p % d == 0) return false;
  }
  return true;
}

/// (generator, exponent) runs of a reduced word.
std::vector<std::pair<int, int>> runs(const Word& w) {
  std::vector<std::pair<int, int>> out;
  for (Letter l : w.letters()) {
    const int g = std::abs(l);
    const int e = l > 0 ? 1 : -1;
    if (!out.empty() && out.back().first == g) {
      out.back().second += e;
    } else {
      out.emplace_back(g, e);
    }
  }
  return out;
}

}  // namespace

int least_valid_prime(const std::vector<int>& m) {
  const int k = static_cast<int>(m.size());
  for (int p = 2;; ++p) {
    if (!is_prime(p) || std::gcd(p, k + 1) != 1) continue;
    bool ok = true;
    for (int mj : m) ok = ok && std::gcd(p, std::abs(mj)) == 1;
    if (ok) return p;
  }
}

std::string build_bswords(Certificate& cert, const std::vector<int>& m, std::optional<int> p_opt) {
  const int k = static_cast<int>(m.size());
  if (k < 1) throw InputError("bswords needs k >= 1 exponents");
  for (int mj : m) {
    if (mj == 0) throw InputError("bswords needs every m_j != 0");
  }
  const int p = p_opt ? *p_opt : least_valid_prime(m);
  if (!is_prime(p)) throw InputError("bswords needs p prime");
  if (std::gcd(p, k + 1) != 1) throw InputError("bswords needs (p, k+1) = 1");
  for (int mj : m) {
    if (std::gcd(p, std::abs(mj)) != 1) throw InputError("bswords needs (p, m_j) = 1");
  }
  const int rank = k + 1;
  if (p * k + 1 > 26) throw InputError("cover subgroup rank exceeds the 26 letter alphabet");

  // H = <x, c_1..c_k> and its kernel cover mod p; boundary words x^p, c_j^p, v^p.
  const CoverGraph h_cover = make_kernel_cover(rank, p, std::vector<int>(static_cast<std::size_t>(rank), 1));
  const SpanningTreeBasis h_basis = basis_from_tree(h_cover);
  json faces = json::array();
  for (int g = 1; g <= rank; ++g) faces.push_back({{"vertex", 0}, {"letter", -g}, {"invert", true}});
  faces.push_back({{"vertex", 0}, {"letter", 1}, {"invert", false}});
  const std::vector<std::vector<Letter>> rotation(static_cast<std::size_t>(p), standard_rotation(rank));
  const std::string boundary = cert.add(
      "BOUNDARY_AXIOM", {{"cover", cover_to_json(h_cover)}, {"rotation", rotation_json(rotation)}, {"faces", faces}});
  const std::vector<VFreeWord>& tuple = cert.conclusion(boundary).subgroups[0];
  const VFreeGroup h_group = VFreeGroup::free(h_basis.rank());
  const Word x_hat = h_group.to_word(tuple[0]);

  json parts = json::array();
  for (int i = 0; i <= rank; ++i) parts.push_back(json::array({i}));
  const std::string split = cert.add("SPLIT", {{"parts", parts}}, {boundary});
  const std::string treeable =
      cert.add("TREEABLE_AXIOM", {{"group", {{"free_rank", h_basis.rank()}, {"torsion", json::array()}}}});

  // F = <x, y_j> acting on Z_p by x: i -> i + 1, y_j: i -> m_j i.
  std::vector<std::vector<int>> maps;
  std::vector<int> shift(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) shift[static_cast<std::size_t>(i)] = (i + 1) % p;
  maps.push_back(shift);
  for (int mj : m) {
    std::vector<int> mult(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) mult[static_cast<std::size_t>(i)] = ((mj % p + p) % p * i) % p;
    maps.push_back(mult);
  }
  const CoverGraph f_cover(rank, maps);
  const SpanningTreeBasis f_basis = basis_from_tree(f_cover);

  // c_j -> y_j x^{m_j} y_j^{-1}
  std::vector<Word> eps_images{Word::generator(1)};
  for (int j = 1; j <= k; ++j) {
    const Word y = Word::generator(1 + j);
    eps_images.push_back(y * Word::generator(1).power(m[static_cast<std::size_t>(j - 1)]) * y.inverse());
  }
  const GroupHom eps(rank, rank, eps_images);
  std::vector<Word> base;
  for (int e = 1; e <= h_basis.rank(); ++e) {
    base.push_back(rewrite_in_basis(f_cover, f_basis, eps(h_basis.expand(Word::generator(e)))));
  }
  json domains = json::array();
  json images = json::array();
  json alpha = json::array();
  std::vector<Word> stable;
  for (int j = 1; j <= k; ++j) {
    domains.push_back(j);
    images.push_back(0);
    alpha.push_back(json::array({to_string(x_hat.power(m[static_cast<std::size_t>(j - 1)]))}));
    stable.push_back(rewrite_in_basis(f_cover, f_basis, Word::generator(-(1 + j))));
  }
  const std::string hnn = cert.add("HNN",
                                   {{"domains", domains},
                                    {"images", images},
                                    {"target", rank},
                                    {"alpha", alpha},
                                    {"rank", f_basis.rank()},
                                    {"base", words_json(base)},
                                    {"stable", words_json(stable)}},
                                   {split, treeable});
  const Word w = make_paper_word(WordFamily::BaumslagSolitar, m).word;
  return cert.add("LIFT", lift_params(rank, w, f_cover, f_basis), {hnn});
}

std::string build_two_letter(Certificate& cert, int k, int n) {
  if (k == 0 || n == 0) throw InputError("two_letter needs k, n != 0");
  const Word w = make_paper_word(WordFamily::TwoLetter, std::vector<int>{k, n}).word;
  if (std::abs(k) == 1 || std::abs(n) == 1) {
    return cert.add("FREE_FACTOR", {{"rank", 2}, {"tuple", json::array({to_string(w)})}});
  }
  if (k < 0 || n < 0) {
    const std::string positive = build_two_letter(cert, std::abs(k), std::abs(n));
    const json phi = json::array({to_string(Word::generator(k < 0 ? -1 : 1)), to_string(Word::generator(n < 0 ? -2 : 2))});
    return cert.add("CONJ_AUT", {{"phi", phi}, {"psi", phi}}, {positive});
  }
  if (k * n + 1 > 26) throw InputError("cover subgroup rank exceeds the 26 letter alphabet");

  const CoverGraph cover = make_grid_cover(k, n);
  const SpanningTreeBasis basis = basis_from_tree(cover, grid_paper_tree(k, n));
  const int R = basis.rank();
  const std::string bs = build_bswords(cert, std::vector<int>(static_cast<std::size_t>(k - 1), 1));
  const std::string b_factor = cert.add("FREE_FACTOR", {{"rank", 1}, {"tuple", json::array({"a"})}});

  // x -> A_t = a_{t,0}...a_{t,k-1}, y_j -> (a_{t,0}...a_{t,j-1})^{-1}, so that
  // the bs word maps to the product of the cyclic conjugates of A_t.
  json embeddings = json::array();
  std::vector<std::string> premises;
  for (int t = 0; t < n; ++t) {
    std::vector<int> a;
    for (int i = 0; i < k; ++i) a.push_back(basis.basis_letter(1, t + n * i));
    std::vector<Word> images{letters_product(a)};
    for (int j = 1; j < k; ++j) {
      images.push_back(letters_product(std::vector<int>(a.begin(), a.begin() + j)).inverse());
    }
    embeddings.push_back(words_json(images));
    premises.push_back(bs);
  }
  const int b_letter = basis.basis_letter(2, k * n - 1);
  embeddings.push_back(json::array({to_string(Word::generator(b_letter))}));
  premises.push_back(b_factor);
  const std::string product = cert.add("FREEPROD", {{"rank", R}, {"embeddings", embeddings}}, premises);

  // e_t -> e_t e_B
  std::vector<Word> change;
  std::vector<Word> inverse;
  for (int t = 1; t <= n; ++t) {
    change.push_back(Word::generator(t) * Word::generator(n + 1));
    inverse.push_back(Word::generator(t) * Word::generator(-(n + 1)));
  }
  change.push_back(Word::generator(n + 1));
  inverse.push_back(Word::generator(n + 1));
  const std::string sub = cert.add(
      "SUBFACTOR", {{"basis", words_json(change)}, {"inverse", words_json(inverse)}, {"keep", n}}, {product});
  return cert.add("LIFT", lift_params(2, w, cover, basis), {sub});
}

std::string build_three_letter(Certificate& cert, int k, int n, int p) {
  if (n == 0) throw InputError("three_letter needs n != 0");
  if (k + p == 0) throw InputError("three_letter needs k != -p");
  const std::string two = build_two_letter(cert, k + p, n);
  if (p == 0) return two;
  const Word a = Word::generator(1);
  const Word b = Word::generator(2);
  const json phi = json::array({"a", to_string(a.power(-p) * b * a.power(p))});
  const json psi = json::array({"a", to_string(a.power(p) * b * a.power(-p))});
  return cert.add("CONJ_AUT", {{"phi", phi}, {"psi", psi}}, {two});
}

std::string build_surface(Certificate& cert, int genus) {
  if (genus < 1) throw InputError("surface needs genus >= 1");
  return cert.add("SURFACE_AXIOM", {{"genus", genus}});
}

std::string build_nonorientable_boundary(Certificate& cert, int genus, int boundaries) {
  if (genus < 1 || genus > 25) throw InputError("nonorientable_boundary needs 1 <= g <= 25");
  if (boundaries < 1 || genus + boundaries - 1 > 26) throw InputError("nonorientable_boundary needs b >= 1");
  if (boundaries > 1) {
    const std::string single = build_nonorientable_boundary(cert, genus, 1);
    const int c = boundaries - 1;
    const int R = genus + c;
    const std::string free = cert.add("FREE_FACTOR", {{"rank", c},
                                                      {"tuple", identity_images(c)},
                                                      {"extension", json::array()},
                                                      {"inverse", identity_images(c)}});
    json into_a = json::array();
    json into_c = json::array();
    for (int i = 1; i <= genus; ++i) into_a.push_back(to_string(Word::generator(i)));
    for (int j = 1; j <= c; ++j) into_c.push_back(to_string(Word::generator(genus + j)));
    const std::string product =
        cert.add("FREEPROD", {{"rank", R}, {"embeddings", json::array({into_a, into_c})}}, {single, free});
    // e_1 -> e_1 e_2 ... e_b
    std::vector<int> all;
    for (int i = 1; i <= boundaries; ++i) all.push_back(i);
    json change = identity_images(boundaries);
    json inverse = identity_images(boundaries);
    change[0] = to_string(letters_product(all));
    Word back = Word::generator(1);
    for (int i = boundaries; i >= 2; --i) back *= Word::generator(-i);
    inverse[0] = to_string(back);
    return cert.add("SUBFACTOR", {{"basis", change}, {"inverse", inverse}, {"keep", boundaries}}, {product});
  }

  // Index two cover a_i -> 1; the two lifts are boundary words of the
  // orientable double cover.
  const Word w = make_paper_word(WordFamily::Nonorientable, std::vector<int>{genus, 1}).word;
  const CoverGraph cover = make_kernel_cover(genus, 2, std::vector<int>(static_cast<std::size_t>(genus), 1));
  const SpanningTreeBasis basis = basis_from_tree(cover);
  const std::vector<Letter> rho = standard_rotation(genus);
  const std::vector<std::vector<Letter>> rotation{rho, std::vector<Letter>(rho.rbegin(), rho.rend())};
  const RibbonGraph ribbon(cover, rotation);
  const CompleteLift lift = complete_lift(cover, w, basis);
  json faces = json::array();
  for (const auto& e : lift.entries) {
    const Word target = w.power(e.multiplicity);
    bool found = false;
    for (int l = -genus; l <= genus && !found; ++l) {
      if (l == 0) continue;
      const Face f = ribbon.face_from({e.coset, l});
      if (f.word == target || f.word == target.inverse()) {
        faces.push_back({{"vertex", e.coset}, {"letter", l}, {"invert", f.word != target}});
        found = true;
      }
    }
    if (!found) throw RuleFailure("no face of the double cover reads the lift at coset " + std::to_string(e.coset));
  }
  const std::string boundary = cert.add(
      "BOUNDARY_AXIOM", {{"cover", cover_to_json(cover)}, {"rotation", rotation_json(rotation)}, {"faces", faces}});
  return cert.add("LIFT", lift_params(genus, w, cover, basis), {boundary});
}

std::string build_vfree(Certificate& cert, const std::string& v_root, const std::vector<int>& orders,
                        const std::vector<int>& powers) {
  if (orders.empty() || orders.size() != powers.size()) throw InputError("vfree needs one power per torsion order");
  const Judgment& start = cert.conclusion(v_root);
  if (!start.cyclic() || !start.group.is_free()) throw InputError("vfree needs a cyclic MFF premise in a free group");
  const int n = start.group.free_rank;
  const Word v = start.group.vfree().to_word(*start.cyclic());
  std::string root = v_root;
  for (std::size_t j = 1; j <= orders.size(); ++j) {
    const VFreeGroup g(n, std::vector<int>(orders.begin(), orders.begin() + static_cast<std::ptrdiff_t>(j)));
    const VFreeWord w = make_vfree_word(g, v, std::vector<int>(powers.begin(), powers.begin() + static_cast<std::ptrdiff_t>(j)));
    root = cert.add("VFREE_LIFT",
                    {{"group", {{"free_rank", n}, {"torsion", g.orders()}}},
                     {"word", g.to_string(w)},
                     {"which", static_cast<int>(j)}},
                    {root});
  }
  return root;
}

std::string build_word(Certificate& cert, const Word& v, int rank) {
  if (v.empty()) throw InputError("the identity generates no measure free factor");
  check_alphabet(v, Alphabet(rank));
  if (is_primitive(v, Alphabet(rank))) {
    return cert.add("FREE_FACTOR", {{"rank", rank}, {"tuple", json::array({to_string(v)})}});
  }
  const auto r = runs(v);
  if (rank == 2 && r.size() == 2 && r[0].first == 1 && r[1].first == 2) {
    return build_two_letter(cert, r[0].second, r[1].second);
  }
  if (rank == 2 && r.size() == 3 && r[0].first == 1 && r[1].first == 2 && r[2].first == 1 &&
      r[0].second + r[2].second != 0) {
    return build_three_letter(cert, r[0].second, r[1].second, r[2].second);
  }
  if (rank % 2 == 0 && v == make_paper_word(WordFamily::SurfaceCommutator, std::vector<int>{rank / 2}).word) {
    return build_surface(cert, rank / 2);
  }
  // x y_1 x^{m_1} Y_1 ... y_k x^{m_k} Y_k
  if (rank >= 2 && r.size() == static_cast<std::size_t>(1 + 3 * (rank - 1))) {
    std::vector<int> m;
    for (int j = 1; j < rank; ++j) m.push_back(r[static_cast<std::size_t>(3 * j - 1)].second);
    if (std::find(m.begin(), m.end(), 0) == m.end() &&
        make_paper_word(WordFamily::BaumslagSolitar, m).word == v) {
      return build_bswords(cert, m);
    }
  }
  if (v == make_paper_word(WordFamily::Nonorientable, std::vector<int>{rank, 1}).word) {
    return build_nonorientable_boundary(cert, rank, 1);
  }
  throw InputError("no built-in proof script applies to " + to_string(v));
}

namespace {

int param_int(const json& params, const char* key) {
  if (!params.contains(key) || !params[key].is_number_integer()) {
    throw InputError(std::string("missing integer parameter '") + key + "'");
  }
  return params[key].get<int>();
}

std::vector<int> param_ints(const json& params, const char* key) {
  if (!params.contains(key) || !params[key].is_array()) throw InputError(std::string("missing list '") + key + "'");
  std::vector<int> out;
  for (const auto& v : params[key]) {
    if (!v.is_number_integer()) throw InputError(std::string("list '") + key + "' must hold integers");
    out.push_back(v.get<int>());
  }
  return out;
}

}  // namespace

Certificate prove(const std::string& theorem, const json& params) {
  Certificate cert;
  if (theorem == "bswords") {
    std::optional<int> p;
    if (params.contains("p") && !params["p"].is_null()) p = param_int(params, "p");
    build_bswords(cert, param_ints(params, "m"), p);
  } else if (theorem == "two_letter") {
    build_two_letter(cert, param_int(params, "k"), param_int(params, "n"));
  } else if (theorem == "three_letter") {
    build_three_letter(cert, param_int(params, "k"), param_int(params, "n"), param_int(params, "p"));
  } else if (theorem == "surface") {
    build_surface(cert, param_int(params, "genus"));
  } else if (theorem == "nonorientable_boundary") {
    const int b = params.contains("boundaries") ? param_int(params, "boundaries") : 1;
    build_nonorientable_boundary(cert, param_int(params, "genus"), b);
  } else if (theorem == "word" || theorem == "vfree") {
    if (!params.contains("v") || !params["v"].is_string()) throw InputError("missing word parameter 'v'");
    const Word v = parse_word(params["v"].get<std::string>());
    const int rank = params.contains("rank") ? param_int(params, "rank") : std::max(1, v.max_generator());
    const std::string root = build_word(cert, v, rank);
    if (theorem == "vfree") build_vfree(cert, root, param_ints(params, "orders"), param_ints(params, "powers"));
  } else {
    throw InputError("unknown theorem '" + theorem + "'");
  }
  return cert;
}

}  // namespace mffkit
