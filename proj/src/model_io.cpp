#include "pdpomdp/model_io.hpp"
#include "pdpomdp/error.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace pdpomdp {

namespace {

struct Token {
  std::string text;
  std::size_t column;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == ' ' || c == '\t') {
      ++i;
      continue;
    }
    if (c == ',' || c == ';' || c == ':') {
      tokens.push_back({std::string(1, c), i + 1});
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
      tokens.push_back({"->", i + 1});
      i += 2;
      continue;
    }
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != ',' && line[i] != ';' &&
           line[i] != ':' && !(line[i] == '-' && i + 1 < line.size() && line[i + 1] == '>')) {
      ++i;
    }
    tokens.push_back({std::string(line.substr(start, i - start)), start + 1});
  }
  return tokens;
}

enum class Section { Header, States, Actions, Observations, Init, Target, Trans };

const char* section_name(Section s) {
  switch (s) {
    case Section::Header: return "pomdp";
    case Section::States: return "states";
    case Section::Actions: return "actions";
    case Section::Observations: return "observations";
    case Section::Init: return "init";
    case Section::Target: return "target";
    case Section::Trans: return "trans";
  }
  return "?";
}

class LineParser {
 public:
  LineParser(std::size_t line, std::vector<Token> tokens, std::size_t end_column)
      : line_(line), tokens_(std::move(tokens)), end_column_(end_column) {}

  bool done() const { return pos_ >= tokens_.size(); }
  const Token* peek() const { return done() ? nullptr : &tokens_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    std::size_t col = done() ? end_column_ : tokens_[pos_].column;
    throw SyntaxError(line_, col, what);
  }

  std::string identifier(const char* what) {
    if (done()) fail(std::string("expected ") + what);
    const Token& t = tokens_[pos_];
    if (!is_valid_identifier(t.text)) fail(std::string("expected ") + what + ", found '" + t.text + "'");
    ++pos_;
    return t.text;
  }

  Rational probability() {
    if (done()) fail("expected a probability");
    const Token& t = tokens_[pos_];
    auto r = parse_rational(t.text);
    if (!r) fail("malformed probability '" + t.text + "'");
    ++pos_;
    return *r;
  }

  void expect(const char* symbol) {
    if (done() || tokens_[pos_].text != symbol) fail(std::string("expected '") + symbol + "'");
    ++pos_;
  }

  bool accept(const char* symbol) {
    if (!done() && tokens_[pos_].text == symbol) {
      ++pos_;
      return true;
    }
    return false;
  }

  void finish() const {
    if (!done()) fail("unexpected '" + tokens_[pos_].text + "'");
  }

 private:
  std::size_t line_;
  std::vector<Token> tokens_;
  std::size_t end_column_;
  std::size_t pos_ = 0;
};

struct ParsedText {
  RawModel raw;
  std::vector<std::pair<std::string, Rational>> init;
  std::vector<std::string> targets;
};

ParsedText parse_text(std::string_view text) {
  ParsedText out;
  Section next = Section::Header;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;

    LineParser p(line_no, tokens, line.size() + 1);
    const std::string keyword = tokens.front().text;
    Section section;
    if (keyword == "pomdp") section = Section::Header;
    else if (keyword == "states") section = Section::States;
    else if (keyword == "actions") section = Section::Actions;
    else if (keyword == "observations") section = Section::Observations;
    else if (keyword == "init") section = Section::Init;
    else if (keyword == "target") section = Section::Target;
    else if (keyword == "trans") section = Section::Trans;
    else p.fail("unknown declaration '" + keyword + "'");

    if (section != next) {
      p.fail(std::string("expected '") + section_name(next) + "' declaration, found '" + keyword + "'");
    }
    p.identifier("keyword");
    switch (section) {
      case Section::Header:
        out.raw.name = p.identifier("model name");
        p.finish();
        break;
      case Section::States:
      case Section::Actions:
      case Section::Observations: {
        p.expect(":");
        auto& list = section == Section::States    ? out.raw.states
                     : section == Section::Actions ? out.raw.actions
                                                   : out.raw.observations;
        while (!p.done()) list.push_back(p.identifier("identifier"));
        break;
      }
      case Section::Init:
        p.expect(":");
        do {
          std::string s = p.identifier("state");
          out.init.emplace_back(s, p.probability());
        } while (p.accept(","));
        p.finish();
        break;
      case Section::Target:
        p.expect(":");
        while (!p.done()) out.targets.push_back(p.identifier("state"));
        break;
      case Section::Trans: {
        p.expect(":");
        RawRow row;
        row.state = p.identifier("state");
        row.action = p.identifier("action");
        p.expect("->");
        do {
          RawEdge e;
          e.obs = p.identifier("observation");
          e.next = p.identifier("state");
          e.prob = p.probability();
          row.edges.push_back(std::move(e));
        } while (p.accept(";"));
        p.finish();
        out.raw.rows.push_back(std::move(row));
        break;
      }
    }
    if (section != Section::Trans) next = static_cast<Section>(static_cast<int>(section) + 1);
    if (eol == text.size()) break;
  }
  if (next != Section::Trans) {
    throw SyntaxError(line_no, 1, std::string("missing '") + section_name(next) + "' declaration");
  }
  return out;
}

template <class Less>
std::vector<std::size_t> order_by(std::size_t n, Less less) {
  std::vector<std::size_t> ix(n);
  for (std::size_t i = 0; i < n; ++i) ix[i] = i;
  std::sort(ix.begin(), ix.end(), less);
  return ix;
}

}  // namespace

ModelFile parse_model(std::string_view text) {
  ParsedText parsed = parse_text(text);
  std::vector<Issue> issues;
  ModelFile file;
  try {
    file.model = validate(parsed.raw);
  } catch (const ValidationError& e) {
    issues = e.issues();
  }
  auto state_of = [&](const std::string& name) -> std::optional<StateId> {
    auto it = std::find(parsed.raw.states.begin(), parsed.raw.states.end(), name);
    if (it == parsed.raw.states.end()) return std::nullopt;
    return static_cast<StateId>(it - parsed.raw.states.begin());
  };

  std::vector<SubBelief::Entry> init;
  std::set<StateId> init_seen;
  Rational init_total = 0;
  for (const auto& [name, mass] : parsed.init) {
    auto q = state_of(name);
    init_total += mass;
    if (!q) {
      issues.push_back({ErrorKind::UnknownIdentifier, "unknown state '" + name + "' in init"});
      continue;
    }
    if (mass <= 0) {
      issues.push_back({ErrorKind::InvalidInitialBelief, "non-positive initial mass for '" + name + "'"});
      continue;
    }
    if (!init_seen.insert(*q).second) {
      issues.push_back({ErrorKind::InvalidInitialBelief, "state '" + name + "' listed twice in init"});
      continue;
    }
    init.emplace_back(*q, mass);
  }
  if (init_total != 1) {
    issues.push_back({ErrorKind::InvalidInitialBelief,
                      "initial masses sum to " + exact_string(init_total) + ", not 1"});
  }
  std::set<StateId> targets;
  for (const auto& name : parsed.targets) {
    auto q = state_of(name);
    if (!q) {
      issues.push_back({ErrorKind::UnknownIdentifier, "unknown target state '" + name + "'"});
    } else if (!targets.insert(*q).second) {
      issues.push_back({ErrorKind::DuplicateIdentifier, "target '" + name + "' listed twice"});
    }
  }
  if (parsed.targets.empty()) issues.push_back({ErrorKind::EmptyTargets, "target set is empty"});
  if (!issues.empty()) throw ValidationError(std::move(issues));

  file.init = SubBelief::from_entries(std::move(init));
  file.targets.assign(targets.begin(), targets.end());
  return file;
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

std::string emit_model(const Pomdp& m, const SubBelief& init, const std::vector<StateId>& targets) {
  auto by_name = [](const std::vector<std::string>& names) {
    return order_by(names.size(), [&](std::size_t x, std::size_t y) { return names[x] < names[y]; });
  };
  auto states = by_name(m.states);
  auto actions = by_name(m.actions);
  auto observations = by_name(m.observations);

  std::ostringstream out;
  out << "pomdp " << m.name << "\n";
  auto list = [&](const char* key, const std::vector<std::string>& names, const std::vector<std::size_t>& order) {
    out << key << ":";
    for (auto i : order) out << " " << names[i];
    out << "\n";
  };
  list("states", m.states, states);
  list("actions", m.actions, actions);
  list("observations", m.observations, observations);

  auto init_entries = init.entries();
  std::sort(init_entries.begin(), init_entries.end(),
            [&](const auto& x, const auto& y) { return m.states[x.first] < m.states[y.first]; });
  out << "init:";
  for (std::size_t i = 0; i < init_entries.size(); ++i) {
    out << (i == 0 ? " " : ", ") << m.states[init_entries[i].first] << " "
        << exact_string(init_entries[i].second);
  }
  out << "\n";

  std::vector<std::string> target_names;
  for (StateId t : targets) target_names.push_back(m.states[t]);
  std::sort(target_names.begin(), target_names.end());
  out << "target:";
  for (const auto& t : target_names) out << " " << t;
  out << "\n";

  for (auto q : states) {
    for (auto a : actions) {
      auto edges = m.out(static_cast<StateId>(q), static_cast<ActionId>(a));
      std::sort(edges.begin(), edges.end(), [&](const Transition& x, const Transition& y) {
        return std::tie(m.observations[x.obs], m.states[x.next]) <
               std::tie(m.observations[y.obs], m.states[y.next]);
      });
      out << "trans: " << m.states[q] << " " << m.actions[a] << " ->";
      for (std::size_t i = 0; i < edges.size(); ++i) {
        out << (i == 0 ? " " : " ; ") << m.observations[edges[i].obs] << " " << m.states[edges[i].next]
            << " " << exact_string(edges[i].prob);
      }
      out << "\n";
    }
  }
  return out.str();
}

bool same_semantics(const ModelFile& a, const ModelFile& b) {
  auto sorted = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  const Pomdp& x = a.model;
  const Pomdp& y = b.model;
  if (x.name != y.name || sorted(x.states) != sorted(y.states) || sorted(x.actions) != sorted(y.actions) ||
      sorted(x.observations) != sorted(y.observations)) {
    return false;
  }
  using Edge = std::tuple<std::string, std::string, Rational>;
  auto rows = [](const Pomdp& m) {
    std::map<std::pair<std::string, std::string>, std::vector<Edge>> out;
    for (StateId q = 0; q < m.num_states(); ++q) {
      for (ActionId a = 0; a < m.num_actions(); ++a) {
        auto& edges = out[{m.states[q], m.actions[a]}];
        for (const auto& t : m.out(q, a)) edges.emplace_back(m.observations[t.obs], m.states[t.next], t.prob);
        std::sort(edges.begin(), edges.end());
      }
    }
    return out;
  };
  if (rows(x) != rows(y)) return false;
  auto init = [](const ModelFile& f) {
    std::map<std::string, Rational> out;
    for (const auto& [q, mass] : f.init.entries()) out[f.model.states[q]] = mass;
    return out;
  };
  auto targets = [](const ModelFile& f) {
    std::vector<std::string> out;
    for (StateId t : f.targets) out.push_back(f.model.states[t]);
    std::sort(out.begin(), out.end());
    return out;
  };
  return init(a) == init(b) && targets(a) == targets(b);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path.string() + "'");
  out << text;
}

nlohmann::json rational_json(const Rational& value) {
  return {{"exact", exact_string(value)}, {"decimal", decimal_string(value)}};
}

nlohmann::json to_json(const ResultDocument& doc, bool include_timing) {
  nlohmann::json j;
  j["model"] = doc.model;
  j["mode"] = doc.mode;
  j["status"] = doc.status;
  j["epsilon"] = rational_json(doc.epsilon);
  j["eta"] = rational_json(doc.eta);
  j["lower"] = rational_json(doc.lower);
  j["upper"] = rational_json(doc.upper);
  j["width"] = rational_json(doc.upper - doc.lower);
  j["nodes_expanded"] = doc.nodes_expanded;
  j["max_depth"] = doc.max_depth;
  if (doc.certified_depth) j["certified_depth"] = doc.certified_depth->get_str();
  if (include_timing) j["wall_time_ms"] = doc.wall_time_ms;
  return j;
}

}  // namespace pdpomdp
