#include <cstdlib>

#include "mffkit/word.hpp"

namespace mffkit {

namespace {

constexpr int kMaxWhiteheadRank = 6;

// Enumerates every type II Whitehead move of F_rank in a fixed order.
template <typename Visit>
bool for_each_move(int rank, Visit&& visit) {
  std::vector<int> pattern(static_cast<std::size_t>(rank), 0);
  for (int g = 1; g <= rank; ++g) {
    for (int sign : {1, -1}) {
      const int others = rank - 1;
      long total = 1;
      for (int i = 0; i < others; ++i) total *= 4;
      for (long code = 0; code < total; ++code) {
        long c = code;
        bool nontrivial = false;
        for (int y = 1; y <= rank; ++y) {
          if (y == g) {
            pattern[static_cast<std::size_t>(y - 1)] = 0;
            continue;
          }
          pattern[static_cast<std::size_t>(y - 1)] = static_cast<int>(c % 4);
          nontrivial = nontrivial || c % 4 != 0;
          c /= 4;
        }
        if (!nontrivial) continue;
        if (visit(WhiteheadMove{sign * g, pattern})) return true;
      }
    }
  }
  return false;
}

}  // namespace

GroupHom WhiteheadMove::as_hom(int rank) const {
  if (static_cast<int>(pattern.size()) != rank) throw InputError("Whitehead pattern has wrong length");
  Word a = Word::generator(std::abs(multiplier)).power(multiplier > 0 ? 1 : -1);
  std::vector<Word> images;
  for (int y = 1; y <= rank; ++y) {
    Word img = Word::generator(y);
    if (y == std::abs(multiplier)) {
      images.push_back(img);
      continue;
    }
    const int bits = pattern[static_cast<std::size_t>(y - 1)];
    if (bits & 1) img = img * a;
    if (bits & 2) img = a.inverse() * img;
    images.push_back(img);
  }
  return GroupHom(rank, rank, std::move(images));
}

WhiteheadDescent whitehead_descent(const Word& w, const Alphabet& alphabet) {
  check_alphabet(w, alphabet);
  if (alphabet.rank > kMaxWhiteheadRank) {
    throw InputError("Whitehead descent supports ranks up to " + std::to_string(kMaxWhiteheadRank));
  }
  WhiteheadDescent out{w, cyclic_normal_form(w), {}};
  while (out.minimal.size() > 1) {
    bool improved = for_each_move(alphabet.rank, [&](const WhiteheadMove& move) {
      Word image = cyclic_normal_form(move.as_hom(alphabet.rank)(out.minimal));
      if (image.size() < out.minimal.size()) {
        out.minimal = image;
        out.moves.push_back(move);
        return true;
      }
      return false;
    });
    if (!improved) break;
  }
  return out;
}

bool is_primitive(const Word& w, const Alphabet& alphabet) {
  if (w.empty()) throw InputError("the identity is not primitive");
  return whitehead_descent(w, alphabet).minimal.size() == 1;
}

Word replay_descent(const Word& start, std::span<const WhiteheadMove> moves, int rank) {
  Word current = cyclic_normal_form(start);
  for (const auto& move : moves) current = cyclic_normal_form(move.as_hom(rank)(current));
  return current;
}

}  // namespace mffkit
