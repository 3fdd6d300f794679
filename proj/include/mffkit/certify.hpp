#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mffkit/vfree.hpp"

namespace mffkit {

/// A rule whose side conditions or premise schema do not hold.
class RuleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// F_n * Z_{n_1} * ... ; a free group when torsion is empty.
struct GroupObject {
  int free_rank = 1;
  std::vector<int> torsion;

  static GroupObject free(int rank) { return {rank, {}}; }
  static GroupObject of(const VFreeGroup& g) { return {g.free_rank(), g.orders()}; }
  VFreeGroup vfree() const { return VFreeGroup(free_rank, torsion); }
  bool is_free() const noexcept { return torsion.empty(); }
  friend bool operator==(const GroupObject&, const GroupObject&) = default;
};

enum class JudgmentKind { MFF, CommonMFF, Treeable };

/// MFF: one generator tuple. CommonMFF: several. Treeable: none.
struct Judgment {
  JudgmentKind kind = JudgmentKind::MFF;
  GroupObject group;
  std::vector<std::vector<VFreeWord>> subgroups;

  static Judgment mff(GroupObject g, std::vector<VFreeWord> tuple);
  static Judgment common(GroupObject g, std::vector<std::vector<VFreeWord>> tuples);
  static Judgment treeable(GroupObject g);
  /// The single cyclic generator when this is MFF of a one-element tuple.
  std::optional<VFreeWord> cyclic() const;
  friend bool operator==(const Judgment&, const Judgment&) = default;
};

nlohmann::json judgment_to_json(const Judgment& j);
/// Words must be in canonical printed form.
Judgment judgment_from_json(const nlohmann::json& j);
std::string describe(const Judgment& j);

struct SideCondition {
  enum class Status { Checked, Cited };
  std::string name;
  Status status = Status::Checked;
  nlohmann::json witness;  ///< replay data, for checked conditions
  std::string anchor;      ///< cited result, for cited conditions
};
nlohmann::json side_condition_to_json(const SideCondition& s);

struct RuleOutcome {
  Judgment conclusion;
  std::vector<SideCondition> side_conditions;
};

/// Evaluates every side condition of the rule on the premise conclusions and
/// returns the conclusion. Throws RuleFailure. Every cyclic MFF conclusion
/// carries the proper-power guard.
RuleOutcome apply_rule(const std::string& rule, const nlohmann::json& params, const std::vector<Judgment>& premises);
const std::vector<std::string>& rule_names();

/// Citation anchors used by the rules, with a one-line statement each.
const std::map<std::string, std::string>& citation_index();

struct CertificateNode {
  std::string id;
  std::string rule;
  nlohmann::json params;
  std::vector<std::string> premises;
  Judgment conclusion;
  std::vector<SideCondition> side_conditions;
};

/// Content-addressed DAG of rule applications, kept in topological order.
class Certificate {
 public:
  /// Evaluates the rule and appends the node (or finds the identical one).
  /// Returns its id. Throws RuleFailure.
  std::string add(const std::string& rule, nlohmann::json params, std::vector<std::string> premises = {});

  const CertificateNode& node(const std::string& id) const;
  const Judgment& conclusion(const std::string& id) const { return node(id).conclusion; }
  const std::vector<CertificateNode>& nodes() const noexcept { return nodes_; }
  /// The node returned by the last add().
  const std::string& root() const;

  /// Only nodes reachable from the root, in topological order.
  nlohmann::json to_json() const;

 private:
  std::vector<CertificateNode> nodes_;
  std::map<std::string, std::size_t> index_;
  std::string root_;
};

inline constexpr const char* kCertificateFormat = "mff-certificate/1";

/// FNV-1a of the canonical dump of a node without its id.
std::string node_id(const nlohmann::json& node_without_id);
/// Recomputes ids bottom up and rewrites premise references accordingly.
nlohmann::json reseal(const nlohmann::json& certificate);

struct CheckReport {
  bool accepted = false;
  int nodes_checked = 0;
  std::vector<std::string> failures;   ///< first entry is the first failing node
  std::vector<std::string> citations;  ///< distinct anchors, sorted
  std::optional<Judgment> root_conclusion;
};

/// Replays every node from its premises and parameters. Never throws on bad
/// content; malformed structure is reported as a failure.
CheckReport check_certificate(const nlohmann::json& certificate);
nlohmann::json report_to_json(const CheckReport& r);

// Built-in proof scripts. Each builds into `cert` and returns the root id.
int least_valid_prime(const std::vector<int>& m);
std::string build_bswords(Certificate& cert, const std::vector<int>& m, std::optional<int> p = std::nullopt);
std::string build_two_letter(Certificate& cert, int k, int n);
std::string build_three_letter(Certificate& cert, int k, int n, int p);
std::string build_surface(Certificate& cert, int genus);
std::string build_nonorientable_boundary(Certificate& cert, int genus, int boundaries = 1);
/// Needs `v_root` to conclude MFF(<v> <= F_n); adds one torsion factor per step.
std::string build_vfree(Certificate& cert, const std::string& v_root, const std::vector<int>& orders,
                        const std::vector<int>& powers);
/// Picks a script for a word of F_rank: primitive, a^k b^n, a^k b^n a^p,
/// surface commutator or a bs word. Throws InputError if none applies.
std::string build_word(Certificate& cert, const Word& v, int rank);

/// Dispatches on theorem name: bswords, two_letter, three_letter, surface,
/// nonorientable_boundary, vfree. Parameters as in the CLI.
Certificate prove(const std::string& theorem, const nlohmann::json& params);

}  // namespace mffkit
