#include <cstdint>
#include <cstdio>
#include <functional>
#include <set>

#include "mffkit/certify.hpp"

namespace mffkit {

using json = nlohmann::json;

namespace {

json node_body(const CertificateNode& n) {
  json sides = json::array();
  for (const auto& s : n.side_conditions) sides.push_back(side_condition_to_json(s));
  return {{"rule", n.rule},
          {"params", n.params},
          {"premises", n.premises},
          {"conclusion", judgment_to_json(n.conclusion)},
          {"side_conditions", std::move(sides)}};
}

}  // namespace

std::string node_id(const json& node_without_id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : node_without_id.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string Certificate::add(const std::string& rule, json params, std::vector<std::string> premises) {
  std::vector<Judgment> inputs;
  for (const auto& id : premises) inputs.push_back(node(id).conclusion);
  RuleOutcome outcome = apply_rule(rule, params, inputs);
  CertificateNode n{"", rule, std::move(params), std::move(premises), std::move(outcome.conclusion),
                    std::move(outcome.side_conditions)};
  n.id = node_id(node_body(n));
  if (index_.count(n.id) == 0) {
    index_[n.id] = nodes_.size();
    nodes_.push_back(n);
  }
  root_ = n.id;
  return root_;
}

const CertificateNode& Certificate::node(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw InputError("unknown node " + id);
  return nodes_[it->second];
}

const std::string& Certificate::root() const {
  if (nodes_.empty()) throw InputError("empty certificate");
  return root_;
}

json Certificate::to_json() const {
  std::set<std::string> reachable;
  std::vector<std::string> stack{root()};
  while (!stack.empty()) {
    const std::string id = stack.back();
    stack.pop_back();
    if (!reachable.insert(id).second) continue;
    for (const auto& p : node(id).premises) stack.push_back(p);
  }
  json nodes = json::array();
  std::set<std::string> emitted;
  std::function<void(const std::string&)> emit = [&](const std::string& id) {
    if (emitted.count(id)) return;
    for (const auto& p : node(id).premises) emit(p);
    emitted.insert(id);
    json body = node_body(node(id));
    body["id"] = id;
    nodes.push_back(std::move(body));
  };
  for (const auto& n : nodes_) {
    if (reachable.count(n.id)) emit(n.id);
  }
  return {{"format", kCertificateFormat}, {"root", root()}, {"nodes", std::move(nodes)}};
}

json reseal(const json& certificate) {
  json out = certificate;
  try {
    std::map<std::string, std::string> renamed;
    for (auto& n : out.at("nodes")) {
      for (auto& p : n.at("premises")) {
        const auto it = renamed.find(p.get<std::string>());
        if (it != renamed.end()) p = it->second;
      }
      json body = n;
      body.erase("id");
      const std::string id = node_id(body);
      renamed[n.at("id").get<std::string>()] = id;
      n["id"] = id;
    }
    const auto it = renamed.find(out.at("root").get<std::string>());
    if (it != renamed.end()) out["root"] = it->second;
  } catch (const std::exception&) {
    return certificate;
  }
  return out;
}

CheckReport check_certificate(const json& certificate) {
  CheckReport report;
  const auto reject = [&](const std::string& msg) { report.failures.push_back(msg); };
  if (!certificate.is_object() || certificate.size() != 3 || !certificate.contains("format") ||
      !certificate.contains("root") || !certificate.contains("nodes")) {
    reject("certificate must be {format, root, nodes}");
    return report;
  }
  if (certificate["format"] != kCertificateFormat) {
    reject("unsupported format");
    return report;
  }
  const json& nodes = certificate["nodes"];
  if (!nodes.is_array() || nodes.empty() || !certificate["root"].is_string()) {
    reject("certificate needs a root and a nonempty node list");
    return report;
  }

  std::map<std::string, Judgment> accepted;
  std::map<std::string, std::vector<std::string>> edges;
  std::set<std::string> seen;
  std::set<std::string> citations;
  std::string last;
  for (const auto& n : nodes) {
    ++report.nodes_checked;
    std::string label = "node " + std::to_string(report.nodes_checked);
    try {
      if (!n.is_object() || n.size() != 6) throw RuleFailure("node must have exactly six fields");
      for (const char* key : {"id", "rule", "params", "premises", "conclusion", "side_conditions"}) {
        if (!n.contains(key)) throw RuleFailure(std::string("node lacks '") + key + "'");
      }
      if (!n["id"].is_string() || !n["rule"].is_string() || !n["premises"].is_array()) {
        throw RuleFailure("malformed node header");
      }
      const std::string id = n["id"].get<std::string>();
      last = id;
      label = "node " + id + " (" + n["rule"].get<std::string>() + ")";
      if (!seen.insert(id).second) throw RuleFailure("duplicate node id");
      json body = n;
      body.erase("id");
      if (node_id(body) != id) throw RuleFailure("id does not match the node content");
      std::vector<Judgment> premises;
      for (const auto& p : n["premises"]) {
        if (!p.is_string()) throw RuleFailure("premise ids must be strings");
        const std::string pid = p.get<std::string>();
        edges[id].push_back(pid);
        if (!seen.count(pid)) throw RuleFailure("premise " + pid + " is not defined before use");
        const auto it = accepted.find(pid);
        if (it == accepted.end()) throw RuleFailure("premise " + pid + " was rejected");
        premises.push_back(it->second);
      }
      const RuleOutcome out = apply_rule(n["rule"].get<std::string>(), n["params"], premises);
      if (judgment_to_json(out.conclusion) != n["conclusion"]) {
        throw RuleFailure("recorded conclusion differs from the recomputed " + describe(out.conclusion));
      }
      json sides = json::array();
      for (const auto& s : out.side_conditions) sides.push_back(side_condition_to_json(s));
      if (sides != n["side_conditions"]) throw RuleFailure("side conditions differ from the recomputed ones");
      for (const auto& s : out.side_conditions) {
        if (s.status == SideCondition::Status::Cited) citations.insert(s.anchor);
      }
      accepted.emplace(id, out.conclusion);
    } catch (const std::exception& e) {
      reject(label + ": " + e.what());
    }
  }

  const std::string root = certificate["root"].get<std::string>();
  if (root != last) {
    reject("root must be the last node");
  } else {
    std::set<std::string> reachable;
    std::vector<std::string> stack{root};
    while (!stack.empty()) {
      const std::string id = stack.back();
      stack.pop_back();
      if (!reachable.insert(id).second) continue;
      for (const auto& p : edges[id]) stack.push_back(p);
    }
    if (reachable.size() != seen.size()) reject("certificate contains nodes the root does not use");
  }
  if (report.failures.empty()) {
    report.accepted = true;
    report.root_conclusion = accepted.at(root);
    report.citations.assign(citations.begin(), citations.end());
  }
  return report;
}

json report_to_json(const CheckReport& r) {
  json out = {{"accepted", r.accepted}, {"nodes_checked", r.nodes_checked}, {"failures", r.failures}};
  if (r.accepted) {
    json cites = json::array();
    for (const auto& c : r.citations) {
      const auto it = citation_index().find(c);
      cites.push_back({{"anchor", c}, {"statement", it == citation_index().end() ? "" : it->second}});
    }
    out["citations"] = std::move(cites);
    out["conclusion"] = judgment_to_json(*r.root_conclusion);
    out["statement"] = describe(*r.root_conclusion);
  }
  return out;
}

}  // namespace mffkit
