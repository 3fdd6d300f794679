// mffkit command line front end. Exit codes: 0 success, 1 mathematical
// rejection, 2 input error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mffkit/certify.hpp"
#include "mffkit/costlab.hpp"
#include "mffkit/cover.hpp"
#include "mffkit/lifts.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace mffkit;

namespace {

constexpr int kRejected = 1;
constexpr int kInputError = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  const std::string text = path == "-" ? std::string(std::istreambuf_iterator<char>(std::cin), {}) : read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports a byte offset; turn it into line and column.
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(path + ": invalid JSON", static_cast<int>(line), static_cast<int>(col));
  }
}

/// Writes to stdout, or atomically to the path (relative paths resolve under
/// MFFKIT_OUT_DIR when it is set).
void emit(const std::string& out, const std::string& content) {
  if (out.empty() || out == "-") {
    std::cout << content;
    return;
  }
  fs::path path(out);
  if (const char* dir = std::getenv("MFFKIT_OUT_DIR"); dir != nullptr && *dir != '\0' && path.is_relative()) {
    path = fs::path(dir) / path;
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InputError("cannot write '" + path.string() + "'");
    f << content;
    if (!f.flush()) throw InputError("cannot write '" + path.string() + "'");
  }
  fs::rename(tmp, path);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

CoverGraph load_cover(const std::string& arg) {
  if (fs::exists(arg)) return cover_from_json(read_json(arg));
  return make_cover(arg);
}

std::string render_cover(const CoverGraph& g, const std::string& format) {
  if (format == "dot") return cover_to_dot(g);
  if (format == "json") return dump(cover_to_json(g));
  throw InputError("unsupported format '" + format + "'");
}

SpanningTreeBasis load_basis(const CoverGraph& g, const std::string& tree) {
  if (tree.empty()) return basis_from_tree(g);
  if (tree == "paper") {
    if (g.rank() != 2 || g.vertex_count() < 1) throw InputError("--tree paper needs a grid cover");
    // Recover (k, n) from a: j -> j + n on kn vertices.
    const int n = g.map(1)[0];
    const int kn = g.vertex_count();
    if (n <= 0 || kn % n != 0 || !(g == make_grid_cover(kn / n, n))) throw InputError("--tree paper needs a grid cover");
    return basis_from_tree(g, grid_paper_tree(kn / n, n));
  }
  return basis_from_tree(g, tree_from_json(read_json(tree)));
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  int col = 1;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError("expected an integer list", 1, col);
    }
    col += static_cast<int>(item.size()) + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mffkit: measure free factor toolkit"};
  app.require_subcommand(1);
  std::string out;
  std::string format = "json";

  // cover
  auto* cover = app.add_subcommand("cover", "Build, fold and export cover graphs")->require_subcommand(1);
  std::string cover_spec;
  auto* cover_make = cover->add_subcommand("make", "Cover from a spec: rose:R, grid:K,N, kernel:P[:t1,..]");
  cover_make->add_option("spec", cover_spec, "cover specification")->required();
  int fold_rank = 2;
  std::string fold_words;
  auto* cover_fold = cover->add_subcommand("fold", "Stallings core graph of a subgroup");
  cover_fold->add_option("--rank", fold_rank, "ambient free rank")->required();
  cover_fold->add_option("--words", fold_words, "comma separated generators")->required();
  std::string export_file;
  auto* cover_export = cover->add_subcommand("export", "Re-export a cover JSON file");
  cover_export->add_option("file", export_file, "cover JSON")->required();
  for (auto* sub : {cover_make, cover_fold, cover_export}) {
    sub->add_option("--format", format, "json or dot");
    sub->add_option("-o,--out", out, "output path");
  }

  // lift
  auto* lift = app.add_subcommand("lift", "Complete lifts through finite covers")->require_subcommand(1);
  std::string lift_cover;
  std::string lift_word;
  std::string lift_tree;
  std::string lift_file;
  auto* lift_compute = lift->add_subcommand("compute", "Complete lift of a word");
  lift_compute->add_option("--cover", lift_cover, "spec or cover JSON file")->required();
  lift_compute->add_option("--word", lift_word, "word in the text grammar")->required();
  lift_compute->add_option("--tree", lift_tree, "tree JSON file, or 'paper' for the grid tree");
  lift_compute->add_option("-o,--out", out, "output path");
  auto* lift_verify = lift->add_subcommand("verify", "Check that a lift is a free basis inside the cover");
  lift_verify->add_option("file", lift_file, "lift JSON")->required();
  lift_verify->add_option("--cover", lift_cover, "spec or cover JSON file")->required();
  lift_verify->add_option("-o,--out", out, "output path");

  // cost
  auto* cost_cmd = app.add_subcommand("cost", "Finite cost laboratory")->require_subcommand(1);
  std::string cost_file;
  auto* cost_check = cost_cmd->add_subcommand("check", "Cost, treeing and complete-section checks");
  cost_check->add_option("file", cost_file, "JSON with space, relation and optional graphing, section")->required();
  cost_check->add_option("-o,--out", out, "output path");
  int ledger_n = 1;
  int ledger_k = 1;
  auto* cost_ledger_cmd = cost_cmd->add_subcommand("ledger", "Cost ledger of the lifting argument");
  cost_ledger_cmd->add_option("--n", ledger_n, "index")->required();
  cost_ledger_cmd->add_option("--k", ledger_k, "number of lifts")->required();
  cost_ledger_cmd->add_option("-o,--out", out, "output path");

  // certify
  auto* certify = app.add_subcommand("certify", "Proof certificates")->require_subcommand(1);
  std::string theorem;
  std::optional<int> opt_k, opt_n, opt_p, opt_genus, opt_boundaries, opt_rank;
  std::string opt_m, opt_v, opt_orders, opt_powers;
  auto* prove_cmd = certify->add_subcommand("prove", "Run a built-in proof script");
  prove_cmd->add_option("theorem", theorem, "bswords, two_letter, three_letter, surface, nonorientable_boundary, word, vfree")
      ->required();
  prove_cmd->add_option("--k", opt_k);
  prove_cmd->add_option("--n", opt_n);
  prove_cmd->add_option("--p", opt_p);
  prove_cmd->add_option("--m", opt_m, "comma separated exponents for bswords");
  prove_cmd->add_option("--genus", opt_genus);
  prove_cmd->add_option("--boundaries", opt_boundaries);
  prove_cmd->add_option("--v", opt_v, "word for word/vfree");
  prove_cmd->add_option("--rank", opt_rank, "free rank of v");
  prove_cmd->add_option("--orders", opt_orders, "torsion orders for vfree");
  prove_cmd->add_option("--powers", opt_powers, "torsion exponents for vfree");
  prove_cmd->add_option("-o,--out", out, "output path");
  std::string cert_file;
  auto* check_cmd = certify->add_subcommand("check", "Replay a certificate");
  check_cmd->add_option("file", cert_file, "certificate JSON, or - for stdin")->required();
  check_cmd->add_option("-o,--out", out, "report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*cover_make) {
      emit(out, render_cover(make_cover(cover_spec), format));
    } else if (*cover_fold) {
      emit(out, render_cover(fold(fold_rank, parse_word_list(fold_words)), format));
    } else if (*cover_export) {
      emit(out, render_cover(cover_from_json(read_json(export_file)), format));
    } else if (*lift_compute) {
      const CoverGraph g = load_cover(lift_cover);
      const Word w = parse_word(lift_word, Alphabet(g.rank()));
      emit(out, dump(lift_to_json(complete_lift(g, w, load_basis(g, lift_tree)))));
    } else if (*lift_verify) {
      const CoverGraph g = load_cover(lift_cover);
      const FreeLiftReport r = verify_free_lift(lift_from_json(read_json(lift_file)), g);
      json report = {{"accepted", r.accepted}, {"entries", r.entries}, {"folded_rank", r.folded_rank},
                     {"members", r.members}};
      if (!r.accepted) report["reason"] = r.reason;
      emit(out, dump(report));
      if (!r.accepted) return kRejected;
    } else if (*cost_check) {
      const json in = read_json(cost_file);
      const FiniteSpace space = space_from_json(in.at("space"));
      const FiniteRelation e = relation_from_json(in.at("relation"), space.size());
      json report = {{"relation_cost", to_string(relation_cost(space, e))}, {"classes", e.class_count()}};
      bool ok = true;
      if (in.contains("graphing")) {
        const Graphing phi = graphing_from_json(in["graphing"], space.size());
        report["graphing_cost"] = to_string(cost(space, phi));
        const bool generates = generated_partition(space.size(), phi) == e;
        report["generates"] = generates;
        if (generates) {
          report["treeing"] = is_treeing(space, phi, e);
        } else {
          ok = false;
        }
      }
      if (in.contains("section")) {
        const SectionReport s = restrict_and_check(space, e, in["section"].get<std::vector<int>>());
        report["section"] = section_report_to_json(s);
        ok = ok && s.holds;
      }
      emit(out, dump(report));
      if (!ok) return kRejected;
    } else if (*cost_ledger_cmd) {
      if (ledger_n < 1) throw InputError("index must be positive");
      const CostLedger l = cost_ledger(ledger_n, ledger_k, Rational(1, ledger_n));
      emit(out, dump(ledger_to_json(l)));
      if (!l.holds) return kRejected;
    } else if (*prove_cmd) {
      json params = json::object();
      if (opt_k) params["k"] = *opt_k;
      if (opt_n) params["n"] = *opt_n;
      if (opt_p) params["p"] = *opt_p;
      if (opt_genus) params["genus"] = *opt_genus;
      if (opt_boundaries) params["boundaries"] = *opt_boundaries;
      if (opt_rank) params["rank"] = *opt_rank;
      if (!opt_m.empty()) params["m"] = parse_int_list(opt_m);
      if (!opt_v.empty()) params["v"] = opt_v;
      if (!opt_orders.empty()) params["orders"] = parse_int_list(opt_orders);
      if (!opt_powers.empty()) params["powers"] = parse_int_list(opt_powers);
      emit(out, dump(prove(theorem, params).to_json()));
    } else if (*check_cmd) {
      const CheckReport r = check_certificate(read_json(cert_file));
      emit(out, dump(report_to_json(r)));
      if (!r.accepted) {
        std::cerr << "rejected: " << r.failures.front() << "\n";
        return kRejected;
      }
    }
  } catch (const RuleFailure& e) {
    std::cerr << "rejected: " << e.what() << "\n";
    return kRejected;
  } catch (const ParseError& e) {
    std::cerr << "error: line " << e.line() << ", column " << e.column() << ": " << e.message() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return 0;
}
