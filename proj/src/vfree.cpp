#include "mffkit/vfree.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <numeric>

namespace mffkit {

namespace {
constexpr int kMaxVFreeLetters = 18;  // a..r; s is reserved for torsion letters
}

VFreeGroup::VFreeGroup(int free_rank, std::vector<int> orders) : free_rank_(free_rank), orders_(std::move(orders)) {
  if (free_rank_ < 0) throw InputError("free rank must be nonnegative");
  for (int n : orders_) {
    if (n < 2) throw InputError("torsion orders must be at least 2");
  }
}

int VFreeGroup::torsion_generator(int j) const {
  if (j < 1 || j > static_cast<int>(orders_.size())) throw InputError("torsion index " + std::to_string(j) + " out of range");
  return free_rank_ + j;
}

int VFreeGroup::order(int generator) const {
  if (generator < 1 || generator > generator_count()) throw InputError("generator " + std::to_string(generator) + " out of range");
  return generator <= free_rank_ ? 0 : orders_[static_cast<std::size_t>(generator - free_rank_ - 1)];
}

VFreeWord VFreeGroup::normal_form(const std::vector<Syllable>& syllables) const {
  std::vector<Syllable> stack;
  auto normalize = [this](int g, long long e) {
    int n = order(g);
    if (n == 0) return e;
    e %= n;
    return e < 0 ? e + n : e;
  };
  for (const auto& s : syllables) {
    long long e = normalize(s.generator, s.exponent);
    if (e == 0) continue;
    if (!stack.empty() && stack.back().generator == s.generator) {
      long long merged = normalize(s.generator, static_cast<long long>(stack.back().exponent) + e);
      if (merged == 0) {
        stack.pop_back();
      } else {
        stack.back().exponent = static_cast<int>(merged);
      }
    } else {
      stack.push_back({s.generator, static_cast<int>(e)});
    }
  }
  return VFreeWord(std::move(stack));
}

VFreeWord VFreeGroup::multiply(const VFreeWord& u, const VFreeWord& v) const {
  std::vector<Syllable> all = u.syllables();
  all.insert(all.end(), v.syllables().begin(), v.syllables().end());
  return normal_form(all);
}

VFreeWord VFreeGroup::inverse(const VFreeWord& u) const {
  std::vector<Syllable> out;
  for (auto it = u.syllables().rbegin(); it != u.syllables().rend(); ++it) out.push_back({it->generator, -it->exponent});
  return normal_form(out);
}

VFreeWord VFreeGroup::power(const VFreeWord& u, int e) const {
  VFreeWord base = e < 0 ? inverse(u) : u;
  std::vector<Syllable> out;
  for (int i = 0; i < std::abs(e); ++i) out.insert(out.end(), base.syllables().begin(), base.syllables().end());
  return normal_form(out);
}

VFreeWord VFreeGroup::conjugate(const VFreeWord& c, const VFreeWord& u) const {
  return multiply(multiply(c, u), inverse(c));
}

VFreeWord VFreeGroup::from_word(const Word& w) const {
  std::vector<Syllable> out;
  for (Letter l : w.letters()) {
    if (std::abs(l) > free_rank_) throw InputError("word uses generator " + std::to_string(std::abs(l)) + " beyond the free rank");
    out.push_back({std::abs(l), l > 0 ? 1 : -1});
  }
  return normal_form(out);
}

Word VFreeGroup::to_word(const VFreeWord& u) const {
  std::vector<Letter> out;
  for (const auto& s : u.syllables()) {
    if (order(s.generator) != 0) throw InputError("element uses a torsion generator");
    for (int i = 0; i < std::abs(s.exponent); ++i) out.push_back(s.exponent > 0 ? s.generator : -s.generator);
  }
  return Word::reduce(out);
}

VFreeWord VFreeGroup::parse(std::string_view text) const {
  if (is_free()) return from_word(parse_word(text, Alphabet(free_rank_)));
  if (text == "1") return {};
  std::vector<Syllable> out;
  std::size_t i = 0;
  auto read_int = [&](bool allow_sign) {
    std::size_t start = i;
    if (allow_sign && i < text.size() && text[i] == '-') ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    std::string digits(text.substr(start, i - start));
    if (digits.empty() || digits == "-") return std::optional<int>{};
    return std::optional<int>(std::stoi(digits));
  };
  while (i < text.size()) {
    const char c = text[i];
    const int column = static_cast<int>(i) + 1;
    if (c == 's' || c == 'S') {
      ++i;
      auto j = read_int(false);
      if (!j) throw ParseError("torsion letter needs an index, e.g. s1", 1, column);
      if (*j < 1 || *j > static_cast<int>(orders_.size())) throw ParseError("torsion letter s" + std::to_string(*j) + " is not declared", 1, column);
      int e = 1;
      if (i < text.size() && text[i] == '^') {
        ++i;
        auto parsed = read_int(true);
        if (!parsed) throw ParseError("expected an exponent after '^'", 1, static_cast<int>(i) + 1);
        e = *parsed;
      }
      out.push_back({torsion_generator(*j), c == 'S' ? -e : e});
      continue;
    }
    const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower < 'a' || lower > 'z') throw ParseError(std::string("unexpected character '") + c + "'", 1, column);
    const int g = lower - 'a' + 1;
    if (g > kMaxVFreeLetters || g > free_rank_) throw ParseError(std::string("letter '") + c + "' exceeds the free rank", 1, column);
    ++i;
    int e = 1;
    if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) e = *read_int(false);
    out.push_back({g, std::isupper(static_cast<unsigned char>(c)) ? -e : e});
  }
  return normal_form(out);
}

std::string VFreeGroup::to_string(const VFreeWord& u) const {
  if (is_free()) return mffkit::to_string(to_word(u));
  if (u.empty()) return "1";
  std::string out;
  for (const auto& s : u.syllables()) {
    if (order(s.generator) == 0) {
      if (s.generator > kMaxVFreeLetters) throw InputError("free generator has no letter name next to torsion letters");
      out += static_cast<char>((s.exponent > 0 ? 'a' : 'A') + s.generator - 1);
      if (std::abs(s.exponent) > 1) out += std::to_string(std::abs(s.exponent));
    } else {
      out += "s" + std::to_string(s.generator - free_rank_);
      if (s.exponent != 1) out += "^" + std::to_string(s.exponent);
    }
  }
  return out;
}

VFreeCyclic cyclic_reduction(const VFreeGroup& g, const VFreeWord& u) {
  VFreeCyclic out{{}, u};
  while (out.core.size() >= 2 && out.core.syllables().front().generator == out.core.syllables().back().generator) {
    const Syllable last = out.core.syllables().back();
    std::vector<Syllable> rotated{last};
    rotated.insert(rotated.end(), out.core.syllables().begin(), out.core.syllables().end() - 1);
    out.core = g.normal_form(rotated);
    out.conjugator = g.multiply(out.conjugator, g.generator(last.generator, -last.exponent));
  }
  return out;
}

bool has_finite_order(const VFreeGroup& g, const VFreeWord& u) {
  const VFreeWord core = cyclic_reduction(g, u).core;
  return core.empty() || (core.size() == 1 && g.order(core.syllables().front().generator) != 0);
}

std::optional<VFreeProperPower> is_proper_power(const VFreeGroup& g, const VFreeWord& u) {
  if (has_finite_order(g, u)) return std::nullopt;
  const VFreeCyclic cyc = cyclic_reduction(g, u);
  const auto& s = cyc.core.syllables();
  const std::size_t len = s.size();
  if (len == 1) {
    if (std::abs(s.front().exponent) < 2) return std::nullopt;
    VFreeWord root = g.conjugate(cyc.conjugator, g.generator(s.front().generator, s.front().exponent > 0 ? 1 : -1));
    return VFreeProperPower{root, std::abs(s.front().exponent)};
  }
  for (std::size_t q = 1; q < len; ++q) {
    if (len % q != 0) continue;
    bool periodic = true;
    for (std::size_t i = q; i < len && periodic; ++i) periodic = s[i] == s[i - q];
    if (!periodic) continue;
    VFreeWord root = g.conjugate(cyc.conjugator, g.normal_form(std::vector<Syllable>(s.begin(), s.begin() + static_cast<long>(q))));
    return VFreeProperPower{root, static_cast<int>(len / q)};
  }
  return std::nullopt;
}

VFreeWord make_vfree_word(const VFreeGroup& g, const Word& v, const std::vector<int>& powers) {
  if (powers.size() != g.orders().size()) throw InputError("need one power per torsion factor");
  VFreeWord w = g.from_word(v);
  for (std::size_t j = 0; j < powers.size(); ++j) {
    w = g.multiply(w, g.generator(g.torsion_generator(static_cast<int>(j) + 1), powers[j]));
  }
  return w;
}

int BranchedCoverSubgroup::parent_generator(int k_generator) const {
  if (k_generator < 1 || k_generator > factor_group.generator_count()) throw InputError("K generator out of range");
  if (k_generator <= parent.free_rank()) return k_generator;
  int t = k_generator - parent.free_rank();
  return parent.free_rank() + (t < which ? t : t + 1);
}

VFreeWord BranchedCoverSubgroup::embed(int j, const VFreeWord& k) const {
  std::vector<Syllable> mapped;
  for (const auto& s : k.syllables()) mapped.push_back({parent_generator(s.generator), s.exponent});
  const VFreeWord shift = parent.generator(parent.torsion_generator(which), j);
  return parent.conjugate(shift, parent.normal_form(mapped));
}

VFreeWord BranchedCoverSubgroup::restrict_to_factor(const VFreeWord& u) const {
  const int s = parent.torsion_generator(which);
  std::vector<Syllable> out;
  for (const auto& syl : u.syllables()) {
    if (syl.generator == s) throw InputError("element uses the branching torsion letter");
    int k = syl.generator;
    if (k > s) --k;
    out.push_back({k, syl.exponent});
  }
  return factor_group.normal_form(out);
}

BranchedCoverSubgroup branched_cover_subgroup(const VFreeGroup& g, std::optional<int> which) {
  const int k = static_cast<int>(g.orders().size());
  if (k == 0) throw InputError("the group has no torsion factor");
  const int w = which.value_or(k);
  if (w < 1 || w > k) throw InputError("torsion index " + std::to_string(w) + " out of range");
  std::vector<int> rest;
  for (int j = 1; j <= k; ++j) {
    if (j != w) rest.push_back(g.orders()[static_cast<std::size_t>(j - 1)]);
  }
  BranchedCoverSubgroup sub{g, w, g.orders()[static_cast<std::size_t>(w - 1)], VFreeGroup(g.free_rank(), rest), {}};
  for (int j = 0; j < sub.index; ++j) {
    std::vector<VFreeWord> gens;
    for (int kg = 1; kg <= sub.factor_group.generator_count(); ++kg) gens.push_back(sub.embed(j, sub.factor_group.generator(kg)));
    sub.factors.push_back(std::move(gens));
  }
  return sub;
}

CosetAction coset_action_vfree(const BranchedCoverSubgroup& sub) {
  std::vector<std::vector<int>> perms;
  const int s = sub.parent.torsion_generator(sub.which);
  for (int g = 1; g <= sub.parent.generator_count(); ++g) {
    std::vector<int> p(static_cast<std::size_t>(sub.index));
    for (int j = 0; j < sub.index; ++j) p[static_cast<std::size_t>(j)] = g == s ? (j + 1) % sub.index : j;
    perms.push_back(std::move(p));
  }
  return CosetAction::from_perms(sub.index, std::move(perms));
}

int apply(const CosetAction& action, const VFreeWord& u) {
  int point = 0;
  for (const auto& s : u.syllables()) point = action.apply(point, Word::generator(s.generator).power(s.exponent));
  return point;
}

namespace {
int apply_from(const CosetAction& action, int point, const VFreeWord& u) {
  for (const auto& s : u.syllables()) point = action.apply(point, Word::generator(s.generator).power(s.exponent));
  return point;
}
}  // namespace

bool verify_stabilizer(const BranchedCoverSubgroup& sub) {
  const CosetAction action = coset_action_vfree(sub);
  for (const auto& factor : sub.factors) {
    for (const auto& gen : factor) {
      if (apply(action, gen) != 0) return false;
    }
  }
  const VFreeGroup& g = sub.parent;
  const int s = g.torsion_generator(sub.which);
  for (int i = 0; i < sub.index; ++i) {
    for (int gen = 1; gen <= g.generator_count(); ++gen) {
      const VFreeWord letter = g.generator(gen);
      const int target = apply_from(action, i, letter);
      const VFreeWord schreier =
          g.multiply(g.multiply(g.generator(s, i), letter), g.generator(s, -target));
      if (schreier.empty()) continue;
      const auto& factor = sub.factors[static_cast<std::size_t>(i)];
      if (std::find(factor.begin(), factor.end(), schreier) == factor.end()) return false;
    }
  }
  return true;
}

bool verify_reidemeister_schreier(const BranchedCoverSubgroup& sub) {
  const CosetAction action = coset_action_vfree(sub);
  const VFreeGroup& g = sub.parent;
  const int s = g.torsion_generator(sub.which);
  for (int i = 0; i < sub.index; ++i) {
    for (std::size_t j = 1; j <= g.orders().size(); ++j) {
      const int gen = g.torsion_generator(static_cast<int>(j));
      const VFreeWord letter = g.generator(gen);
      // (factor, K generator) of each nontrivial Schreier generator along the relator
      std::vector<std::pair<int, int>> rewritten;
      int point = i;
      for (int step = 0; step < g.order(gen); ++step) {
        const int next = apply_from(action, point, letter);
        const VFreeWord schreier =
            g.multiply(g.multiply(g.generator(s, point), letter), g.generator(s, -next));
        if (!schreier.empty()) {
          const auto& factor = sub.factors[static_cast<std::size_t>(point)];
          const auto it = std::find(factor.begin(), factor.end(), schreier);
          if (it == factor.end()) return false;
          rewritten.emplace_back(point, static_cast<int>(it - factor.begin()) + 1);
        }
        point = next;
      }
      if (point != i) return false;
      if (gen == s) {
        if (!rewritten.empty()) return false;
        continue;
      }
      if (rewritten.empty()) return false;
      for (const auto& r : rewritten) {
        if (r != rewritten.front()) return false;
      }
      if (static_cast<int>(rewritten.size()) != sub.factor_group.order(rewritten.front().second)) return false;
    }
  }
  return true;
}

int VFreeLift::total_multiplicity() const {
  int t = 0;
  for (const auto& e : entries) t += e.multiplicity;
  return t;
}

VFreeLift complete_lift_vfree(const BranchedCoverSubgroup& sub, const VFreeWord& w) {
  const VFreeGroup& g = sub.parent;
  const int s = g.torsion_generator(sub.which);
  VFreeLift out;
  out.word = w;
  std::vector<Syllable> body = w.syllables();
  if (!body.empty() && body.back().generator == s) {
    out.p = body.back().exponent;
    body.pop_back();
  }
  out.u = g.normal_form(body);
  for (const auto& syl : out.u.syllables()) {
    if (syl.generator == s) throw InputError("word is not of the form u s^p with u in K");
  }
  out.d = std::gcd(out.p, sub.index);
  out.m = sub.index / out.d;
  const CosetAction action = coset_action_vfree(sub);
  std::vector<char> seen(static_cast<std::size_t>(sub.index), 0);
  for (int i = 0; i < sub.index; ++i) {
    if (seen[static_cast<std::size_t>(i)]) continue;
    VFreeLiftEntry e;
    e.coset = i;
    for (int x = i; !seen[static_cast<std::size_t>(x)]; x = apply_from(action, x, w)) {
      seen[static_cast<std::size_t>(x)] = 1;
      e.factor_sequence.push_back(x);
    }
    e.multiplicity = static_cast<int>(e.factor_sequence.size());
    e.representative = g.generator(s, -i);
    e.lift = g.conjugate(g.generator(s, i), g.power(w, e.multiplicity));
    out.entries.push_back(std::move(e));
  }
  return out;
}

VFreeWord lift_product(const BranchedCoverSubgroup& sub, const VFreeWord& u, const VFreeLiftEntry& entry) {
  const VFreeWord k = sub.restrict_to_factor(u);
  VFreeWord out;
  for (int j : entry.factor_sequence) out = sub.parent.multiply(out, sub.embed(j, k));
  return out;
}

nlohmann::json vfree_group_to_json(const VFreeGroup& g) { return {{"free_rank", g.free_rank()}, {"torsion", g.orders()}}; }

VFreeGroup vfree_group_from_json(const nlohmann::json& j) {
  try {
    return VFreeGroup(j.at("free_rank").get<int>(), j.value("torsion", std::vector<int>{}));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed group JSON: ") + e.what());
  }
}

nlohmann::json vfree_lift_to_json(const VFreeGroup& g, const VFreeLift& lift) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : lift.entries) {
    entries.push_back({{"coset", e.coset},
                       {"representative", g.to_string(e.representative)},
                       {"multiplicity", e.multiplicity},
                       {"lift", g.to_string(e.lift)},
                       {"factors", e.factor_sequence}});
  }
  return {{"word", g.to_string(lift.word)}, {"u", g.to_string(lift.u)}, {"p", lift.p}, {"d", lift.d}, {"m", lift.m},
          {"entries", entries}};
}

}  // namespace mffkit
