#pragma once

#include "pdpomdp/belief.hpp"
#include "pdpomdp/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pdpomdp {

/// A parsed `.pdp` file: model, initial belief and target states.
struct ModelFile {
  Pomdp model;
  SubBelief init;
  std::vector<StateId> targets;
};

/// Parses the line format
///
///   pomdp <name>
///   states: s1 s2 ...
///   actions: a1 ...
///   observations: o1 ...
///   init: s1 1/2, s2 0.5
///   target: s3
///   trans: <state> <action> -> <obs> <state'> <prob> ; ...
///
/// `#` starts a comment. Throws SyntaxError (with line/column) or
/// ValidationError for semantic problems.
ModelFile parse_model(std::string_view text);
ModelFile load_model(const std::filesystem::path& path);

/// Canonical text: identifiers sorted, probabilities in lowest terms.
std::string emit_model(const Pomdp& m, const SubBelief& init, const std::vector<StateId>& targets);

/// Equality of (model, belief, targets) up to identifier order.
bool same_semantics(const ModelFile& a, const ModelFile& b);

void write_text_file(const std::filesystem::path& path, const std::string& text);

/// {"exact": "p/q", "decimal": "..."}.
nlohmann::json rational_json(const Rational& value);

struct ResultDocument {
  std::string model;
  Rational epsilon;
  Rational eta;
  Rational lower;
  Rational upper;
  std::uint64_t nodes_expanded = 0;
  std::uint64_t max_depth = 0;
  std::string mode = "anytime";
  std::string status = "converged";
  double wall_time_ms = 0;
  std::optional<Integer> certified_depth;
};

nlohmann::json to_json(const ResultDocument& doc, bool include_timing = false);

}  // namespace pdpomdp
