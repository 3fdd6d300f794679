#include "mffkit/word.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <numeric>

namespace mffkit {

ParseError::ParseError(std::string message, int line, int column)
    : InputError(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      message_(std::move(message)),
      line_(line),
      column_(column) {}

Alphabet::Alphabet(int r) : rank(r) {
  if (r < 1) throw InputError("alphabet rank must be at least 1");
}

Word Word::reduce(std::span<const Letter> letters) {
  std::vector<Letter> out;
  out.reserve(letters.size());
  for (Letter l : letters) {
    if (l == 0) throw InputError("letter 0 is not a generator");
    if (!out.empty() && out.back() == -l) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return Word(std::move(out));
}

Word Word::reduce(std::initializer_list<Letter> letters) {
  return reduce(std::span<const Letter>(letters.begin(), letters.size()));
}

int Word::max_generator() const noexcept {
  int m = 0;
  for (Letter l : letters_) m = std::max(m, std::abs(l));
  return m;
}

Word Word::inverse() const {
  std::vector<Letter> out(letters_.rbegin(), letters_.rend());
  for (auto& l : out) l = -l;
  return Word(std::move(out));
}

Word Word::power(int e) const {
  Word base = e < 0 ? inverse() : *this;
  Word result;
  for (int i = 0; i < std::abs(e); ++i) result *= base;
  return result;
}

Word Word::conjugate_by(const Word& c) const { return c.inverse() * *this * c; }

Word operator*(const Word& u, const Word& v) {
  Word r = u;
  r *= v;
  return r;
}

Word& Word::operator*=(const Word& v) {
  std::size_t i = 0;
  while (i < v.letters_.size() && !letters_.empty() && letters_.back() == -v.letters_[i]) {
    letters_.pop_back();
    ++i;
  }
  letters_.insert(letters_.end(), v.letters_.begin() + static_cast<std::ptrdiff_t>(i), v.letters_.end());
  return *this;
}

namespace {
// a < A < b < B < ...
int letter_key(Letter l) { return 2 * std::abs(l) + (l < 0 ? 1 : 0); }
}  // namespace

std::strong_ordering operator<=>(const Word& u, const Word& v) {
  if (auto c = u.size() <=> v.size(); c != 0) return c;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (auto c = letter_key(u[i]) <=> letter_key(v[i]); c != 0) return c;
  }
  return std::strong_ordering::equal;
}

void check_alphabet(const Word& w, const Alphabet& alphabet) {
  for (Letter l : w.letters()) {
    if (!alphabet.contains(l)) {
      throw InputError("generator " + std::to_string(std::abs(l)) + " outside alphabet of rank " +
                       std::to_string(alphabet.rank));
    }
  }
}

CyclicDecomposition cyclic_reduction(const Word& w) {
  auto letters = w.letters();
  std::size_t i = 0;
  std::size_t j = letters.size();
  while (j - i >= 2 && letters[i] == -letters[j - 1]) {
    ++i;
    --j;
  }
  std::vector<Letter> c(letters.begin(), letters.begin() + static_cast<std::ptrdiff_t>(i));
  std::vector<Letter> core(letters.begin() + static_cast<std::ptrdiff_t>(i),
                           letters.begin() + static_cast<std::ptrdiff_t>(j));
  return {Word::reduce(c), Word::reduce(core)};
}

Word cyclic_normal_form(const Word& w) {
  Word core = cyclic_reduction(w).core;
  auto letters = core.letters();
  std::vector<Letter> rotated(letters.begin(), letters.end());
  Word best = core;
  for (std::size_t s = 1; s < rotated.size(); ++s) {
    std::rotate(rotated.begin(), rotated.begin() + 1, rotated.end());
    Word candidate = Word::reduce(rotated);
    if (candidate < best) best = candidate;
  }
  return best;
}

Word parse_word(std::string_view text) {
  std::vector<Letter> letters;
  if (text == "1") return {};
  if (text.empty()) throw ParseError("empty word; write 1 for the identity", 1, 1);
  std::size_t i = 0;
  while (i < text.size()) {
    char ch = text[i];
    if (!std::isalpha(static_cast<unsigned char>(ch))) {
      throw ParseError(std::string("unexpected character '") + ch + "' in word", 1, static_cast<int>(i) + 1);
    }
    int g = std::tolower(static_cast<unsigned char>(ch)) - 'a' + 1;
    int sign = std::isupper(static_cast<unsigned char>(ch)) ? -1 : 1;
    ++i;
    std::size_t start = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    int exponent = 1;
    if (i > start) {
      exponent = std::atoi(std::string(text.substr(start, i - start)).c_str());
      if (exponent == 0) throw ParseError("zero exponent", 1, static_cast<int>(start) + 1);
      if (i - start > 6) throw ParseError("exponent too large", 1, static_cast<int>(start) + 1);
    }
    for (int e = 0; e < exponent; ++e) letters.push_back(sign * g);
  }
  return Word::reduce(letters);
}

Word parse_word(std::string_view text, const Alphabet& alphabet) {
  Word w = parse_word(text);
  check_alphabet(w, alphabet);
  return w;
}

std::string to_string(const Word& w) {
  if (w.empty()) return "1";
  std::string out;
  auto letters = w.letters();
  for (std::size_t i = 0; i < letters.size();) {
    Letter l = letters[i];
    if (std::abs(l) > 26) throw InputError("generator index above 26 has no letter name");
    std::size_t j = i;
    while (j < letters.size() && letters[j] == l) ++j;
    char c = static_cast<char>('a' + std::abs(l) - 1);
    out += l < 0 ? static_cast<char>(std::toupper(c)) : c;
    if (j - i > 1) out += std::to_string(j - i);
    i = j;
  }
  return out;
}

std::vector<Word> parse_word_list(std::string_view text) {
  std::vector<Word> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string_view piece = text.substr(start, comma == std::string_view::npos ? text.size() - start : comma - start);
    try {
      out.push_back(parse_word(piece));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), 1, static_cast<int>(start) + e.column());
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<ProperPower> is_proper_power(const Word& w) {
  if (w.empty()) return std::nullopt;
  auto [conjugator, core] = cyclic_reduction(w);
  auto letters = core.letters();
  const std::size_t n = letters.size();
  for (std::size_t period = 1; period < n; ++period) {
    if (n % period != 0) continue;
    bool periodic = true;
    for (std::size_t i = period; i < n && periodic; ++i) periodic = letters[i] == letters[i - period];
    if (periodic) {
      std::vector<Letter> r(letters.begin(), letters.begin() + static_cast<std::ptrdiff_t>(period));
      Word root = conjugator * Word::reduce(r) * conjugator.inverse();
      return ProperPower{root, static_cast<int>(n / period)};
    }
  }
  return std::nullopt;
}

GroupHom::GroupHom(int source_rank, int target_rank, std::vector<Word> images)
    : source_rank_(source_rank), target_rank_(target_rank), images_(std::move(images)) {
  if (source_rank_ < 0 || target_rank_ < 0) throw InputError("negative rank");
  if (static_cast<int>(images_.size()) != source_rank_) {
    throw InputError("homomorphism needs one image per source generator");
  }
  for (const auto& img : images_) {
    if (img.max_generator() > target_rank_) throw InputError("image word outside target alphabet");
  }
}

GroupHom GroupHom::identity(int rank) {
  std::vector<Word> images;
  for (int g = 1; g <= rank; ++g) images.push_back(Word::generator(g));
  return GroupHom(rank, rank, std::move(images));
}

Word GroupHom::operator()(const Word& w) const {
  if (w.max_generator() > source_rank_) throw InputError("word outside homomorphism source alphabet");
  Word out;
  for (Letter l : w.letters()) {
    const Word& img = images_[static_cast<std::size_t>(std::abs(l) - 1)];
    out *= l > 0 ? img : img.inverse();
  }
  return out;
}

GroupHom GroupHom::after(const GroupHom& first) const {
  if (first.target_rank_ != source_rank_) throw InputError("alphabet mismatch in composition");
  std::vector<Word> images;
  for (const auto& img : first.images_) images.push_back((*this)(img));
  return GroupHom(first.source_rank_, target_rank_, std::move(images));
}

Word apply_hom(const GroupHom& phi, const Word& w) { return phi(w); }

bool verify_mutual_inverse(const GroupHom& phi, const GroupHom& psi) {
  if (phi.source_rank() != psi.target_rank() || phi.target_rank() != psi.source_rank()) {
    throw InputError("alphabet mismatch: homomorphisms are not composable both ways");
  }
  for (int g = 1; g <= phi.source_rank(); ++g) {
    if (psi(phi.image(g)) != Word::generator(g)) return false;
  }
  for (int g = 1; g <= psi.source_rank(); ++g) {
    if (phi(psi.image(g)) != Word::generator(g)) return false;
  }
  return true;
}

namespace {

Word power_of(int g, int e) { return Word::generator(g).power(e); }

PaperWord bs_word(std::span<const int> m) {
  if (m.empty()) throw InputError("bs family needs k >= 1 exponents");
  const int k = static_cast<int>(m.size());
  Word w = Word::generator(1);
  for (int j = 1; j <= k; ++j) {
    Word y = Word::generator(1 + j);
    w *= y * power_of(1, m[static_cast<std::size_t>(j - 1)]) * y.inverse();
  }
  return {w, k + 1};
}

}  // namespace

PaperWord make_paper_word(WordFamily family, std::span<const int> params) {
  auto need = [&](std::size_t count, const char* name) {
    if (params.size() != count) {
      throw InputError(std::string(name) + " family expects " + std::to_string(count) + " parameters");
    }
  };
  switch (family) {
    case WordFamily::BaumslagSolitar:
      return bs_word(params);
    case WordFamily::TwoLetter: {
      need(2, "two_letter");
      if (params[0] == 0 || params[1] == 0) throw InputError("two_letter requires k, n != 0");
      return {power_of(1, params[0]) * power_of(2, params[1]), 2};
    }
    case WordFamily::ThreeLetter: {
      need(3, "three_letter");
      if (params[1] == 0) throw InputError("three_letter requires n != 0");
      if (params[0] + params[2] == 0) throw InputError("three_letter requires k != -p");
      return {power_of(1, params[0]) * power_of(2, params[1]) * power_of(1, params[2]), 2};
    }
    case WordFamily::SurfaceCommutator: {
      need(1, "surface_comm");
      const int g = params[0];
      if (g < 1) throw InputError("surface_comm requires g >= 1");
      Word w;
      for (int i = 1; i <= g; ++i) {
        Word a = Word::generator(2 * i - 1);
        Word b = Word::generator(2 * i);
        w *= a * b * a.inverse() * b.inverse();
      }
      return {w, 2 * g};
    }
    case WordFamily::Nonorientable: {
      if (params.empty() || params.size() > 2) throw InputError("nonorientable family expects g[, boundaries]");
      const int g = params[0];
      const int boundaries = params.size() == 2 ? params[1] : 1;
      if (g < 1) throw InputError("nonorientable requires g >= 1");
      if (boundaries < 1) throw InputError("nonorientable requires at least one boundary curve");
      Word w;
      for (int i = 1; i <= g; ++i) w *= power_of(i, 2);
      for (int j = 1; j < boundaries; ++j) w *= Word::generator(g + j);
      return {w, g + boundaries - 1};
    }
  }
  throw InputError("unknown word family");
}

PaperWord make_paper_word(std::string_view family, std::span<const int> params) {
  if (family == "bs") return make_paper_word(WordFamily::BaumslagSolitar, params);
  if (family == "two_letter") return make_paper_word(WordFamily::TwoLetter, params);
  if (family == "three_letter") return make_paper_word(WordFamily::ThreeLetter, params);
  if (family == "surface_comm") return make_paper_word(WordFamily::SurfaceCommutator, params);
  if (family == "nonorientable") return make_paper_word(WordFamily::Nonorientable, params);
  throw InputError("unknown word family '" + std::string(family) + "'");
}

}  // namespace mffkit
