// Random single-field mutations of certificate JSON, shared by the unit tests
// and the acceptance binary.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "mffkit/certify.hpp"

namespace tamper {

/// JSON pointer paths to every scalar under a node's params, conclusion and
/// side conditions. Ids and premise references are covered by resealing.
inline std::vector<nlohmann::json::json_pointer> leaves(const nlohmann::json& cert) {
  std::vector<nlohmann::json::json_pointer> out;
  const auto walk = [&](auto&& self, const nlohmann::json& j, const nlohmann::json::json_pointer& at) -> void {
    if (j.is_object()) {
      for (auto it = j.begin(); it != j.end(); ++it) self(self, it.value(), at / it.key());
    } else if (j.is_array()) {
      for (std::size_t i = 0; i < j.size(); ++i) self(self, j[i], at / i);
    } else {
      out.push_back(at);
    }
  };
  const auto& nodes = cert.at("nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (const char* field : {"params", "conclusion", "side_conditions"}) {
      walk(walk, nodes[i].at(field), nlohmann::json::json_pointer("/nodes") / i / field);
    }
  }
  return out;
}

/// Changes one scalar: integers move by one, booleans flip, words gain a
/// letter, other strings gain a character.
inline std::string mutate_scalar(nlohmann::json& v, std::mt19937& rng) {
  if (v.is_boolean()) {
    v = !v.get<bool>();
  } else if (v.is_number_integer()) {
    v = v.get<long long>() + (std::bernoulli_distribution(0.5)(rng) ? 1 : -1);
  } else if (v.is_string()) {
    const std::string s = v.get<std::string>();
    std::string next = s + "x";
    try {
      const mffkit::Word w = mffkit::parse_word(s);
      if (mffkit::to_string(w) == s) {
        const mffkit::Letter l = std::bernoulli_distribution(0.5)(rng) ? 1 : 2;
        mffkit::Word changed = w * mffkit::Word::generator(l);
        next = mffkit::to_string(changed);
      }
    } catch (const std::exception&) {
    }
    v = next;
  } else if (v.is_null()) {
    v = 0;
  } else {
    v = nlohmann::json();
  }
  return v.dump();
}

struct Mutation {
  nlohmann::json certificate;
  std::string where;
};

/// One mutation at a uniformly chosen leaf; resealed when asked so that the
/// content hash no longer gives it away.
inline Mutation mutate(const nlohmann::json& cert, std::mt19937& rng, bool reseal) {
  const auto paths = leaves(cert);
  const auto& at = paths[std::uniform_int_distribution<std::size_t>(0, paths.size() - 1)(rng)];
  Mutation m{cert, at.to_string()};
  m.where += " := " + mutate_scalar(m.certificate[at], rng);
  if (reseal) m.certificate = mffkit::reseal(m.certificate);
  return m;
}

}  // namespace tamper
