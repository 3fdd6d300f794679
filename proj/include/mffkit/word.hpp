#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mffkit {

/// Malformed user input: bad text, out-of-range parameters, wrong alphabet.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Text that does not parse under one of the documented grammars.
class ParseError : public InputError {
 public:
  ParseError(std::string message, int line, int column);
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  /// The message without the location prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  std::string message_;
  int line_;
  int column_;
};

/// Number of free generators of F_r. Generators are numbered 1..rank.
struct Alphabet {
  int rank = 1;

  explicit Alphabet(int r);
  bool contains(int letter) const noexcept {
    return letter != 0 && letter <= rank && -letter <= rank;
  }
};

/// A letter is a signed generator index: +g is the generator, -g its inverse.
using Letter = int;

/// Freely reduced word. The empty word is the identity.
class Word {
 public:
  Word() = default;

  /// Free reduction of an arbitrary letter sequence.
  static Word reduce(std::span<const Letter> letters);
  static Word reduce(std::initializer_list<Letter> letters);
  static Word generator(int g) { return reduce({g}); }

  std::span<const Letter> letters() const noexcept { return letters_; }
  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  Letter front() const { return letters_.front(); }
  Letter back() const { return letters_.back(); }

  /// Largest generator index that occurs (0 for the identity).
  int max_generator() const noexcept;

  Word inverse() const;
  Word power(int e) const;
  /// c^{-1} * this * c
  Word conjugate_by(const Word& c) const;

  friend Word operator*(const Word& u, const Word& v);
  Word& operator*=(const Word& v);

  friend bool operator==(const Word&, const Word&) = default;
  /// Shortlex order: length first, then letter by letter with a < A < b < B.
  friend std::strong_ordering operator<=>(const Word& u, const Word& v);

 private:
  explicit Word(std::vector<Letter> reduced) : letters_(std::move(reduced)) {}
  std::vector<Letter> letters_;
};

/// Throws InputError if some letter of w lies outside the alphabet.
void check_alphabet(const Word& w, const Alphabet& alphabet);

/// Cyclic reduction: w = c * core * c^{-1} with core cyclically reduced.
struct CyclicDecomposition {
  Word conjugator;
  Word core;
};
CyclicDecomposition cyclic_reduction(const Word& w);

/// Least cyclic permutation in shortlex order of the cyclic reduction of w.
Word cyclic_normal_form(const Word& w);

// Text grammar. Letters a..z are generators 1..26, capitals are inverses and
// an integer suffix is an exponent: "a3B2" = a^3 b^-2. The identity is "1".
Word parse_word(std::string_view text);
Word parse_word(std::string_view text, const Alphabet& alphabet);
std::string to_string(const Word& w);
/// Comma separated list of words, e.g. "a2,b".
std::vector<Word> parse_word_list(std::string_view text);

struct ProperPower {
  Word root;
  int exponent = 0;
};
/// Returns (root, e) with root^e = w and e >= 2 maximal, or nullopt.
std::optional<ProperPower> is_proper_power(const Word& w);

/// Homomorphism F_source -> F_target given by the images of the generators.
class GroupHom {
 public:
  GroupHom(int source_rank, int target_rank, std::vector<Word> images);
  static GroupHom identity(int rank);

  int source_rank() const noexcept { return source_rank_; }
  int target_rank() const noexcept { return target_rank_; }
  const std::vector<Word>& images() const noexcept { return images_; }
  const Word& image(int generator) const { return images_.at(generator - 1); }

  Word operator()(const Word& w) const;
  /// (*this) after (first): first is applied first.
  GroupHom after(const GroupHom& first) const;

  friend bool operator==(const GroupHom&, const GroupHom&) = default;

 private:
  int source_rank_;
  int target_rank_;
  std::vector<Word> images_;
};

Word apply_hom(const GroupHom& phi, const Word& w);

/// True iff psi(phi(g)) = g on F_source and phi(psi(g)) = g on F_target.
bool verify_mutual_inverse(const GroupHom& phi, const GroupHom& psi);

/// Whitehead automorphism (A, a): a fixed; for y != a^{+-1}, y -> y a when
/// y in A, y -> a^{-1} y when y^{-1} in A (both when both are in A).
struct WhiteheadMove {
  Letter multiplier = 1;
  /// per generator: bit 0 = generator in A, bit 1 = inverse in A.
  std::vector<int> pattern;

  GroupHom as_hom(int rank) const;
};

struct WhiteheadDescent {
  Word start;
  Word minimal;  ///< cyclic normal form reached
  std::vector<WhiteheadMove> moves;
};

/// Iterated strictly length-decreasing Whitehead moves on the cyclic word.
WhiteheadDescent whitehead_descent(const Word& w, const Alphabet& alphabet);

/// w is a member of some free basis of F_rank. Throws on the identity.
bool is_primitive(const Word& w, const Alphabet& alphabet);

/// Replays a descent: applies the moves with cyclic reduction in between.
Word replay_descent(const Word& start, std::span<const WhiteheadMove> moves, int rank);

enum class WordFamily { BaumslagSolitar, TwoLetter, ThreeLetter, SurfaceCommutator, Nonorientable };

/// Generator conventions:
///  bs:           x = 1, y_j = 1 + j           (params m_1..m_k)
///  two_letter:   a = 1, b = 2                 (params k, n)
///  three_letter: a = 1, b = 2                 (params k, n, p)
///  surface_comm: a_i = 2i - 1, b_i = 2i       (params g)
///  nonorientable:a_i = i, c_j = g + j         (params g, boundaries)
struct PaperWord {
  Word word;
  int rank = 1;
};
PaperWord make_paper_word(WordFamily family, std::span<const int> params);
PaperWord make_paper_word(std::string_view family, std::span<const int> params);

}  // namespace mffkit
