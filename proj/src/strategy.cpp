#include "pdpomdp/strategy.hpp"
#include "pdpomdp/error.hpp"

#include <algorithm>
#include <sstream>

namespace pdpomdp {

std::size_t StrategySpec::next(std::size_t mem, ActionId a, ObsId o) const {
  auto it = update.find({mem, a, o});
  return it == update.end() ? mem : it->second;
}

void validate_strategy(const Pomdp& m, const StrategySpec& s) {
  std::vector<Issue> issues;
  if (s.memory.empty()) issues.push_back({ErrorKind::InvalidArgument, "strategy has no memory states"});
  if (s.start >= s.memory.size()) issues.push_back({ErrorKind::UnknownIdentifier, "start memory out of range"});
  if (s.choose.size() != s.memory.size()) {
    issues.push_back({ErrorKind::InvalidArgument, "one action distribution per memory state is required"});
  }
  for (std::size_t i = 0; i < s.choose.size() && i < s.memory.size(); ++i) {
    Rational total = 0;
    for (const auto& [a, p] : s.choose[i]) {
      if (a >= m.num_actions()) issues.push_back({ErrorKind::UnknownIdentifier, "action id out of range"});
      if (p <= 0) issues.push_back({ErrorKind::NonPositiveProbability, "memory " + s.memory[i] + " has a non-positive choice"});
      total += p;
    }
    if (total != 1) {
      issues.push_back({ErrorKind::DistributionSum,
                        "choices at memory " + s.memory[i] + " sum to " + exact_string(total)});
    }
  }
  for (const auto& [key, target] : s.update) {
    if (std::get<0>(key) >= s.memory.size() || target >= s.memory.size()) {
      issues.push_back({ErrorKind::UnknownIdentifier, "memory update out of range"});
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

namespace {

struct Token {
  std::string text;
  std::size_t column;
};

std::vector<Token> split_line(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '#') break;
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    if (line[i] == ':') {
      out.push_back({":", i + 1});
      ++i;
      continue;
    }
    if (line.compare(i, 2, "->") == 0) {
      out.push_back({"->", i + 1});
      i += 2;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line[j] != ':' &&
           line[j] != '#' && line.compare(j, 2, "->") != 0) {
      ++j;
    }
    out.push_back({line.substr(i, j - i), i + 1});
    i = j;
  }
  return out;
}

}  // namespace

StrategySpec parse_strategy(const Pomdp& m, std::string_view text) {
  StrategySpec s;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool have_memory = false;
  auto memory_index = [&](const Token& t, std::size_t ln) {
    auto it = std::find(s.memory.begin(), s.memory.end(), t.text);
    if (it == s.memory.end()) throw SyntaxError(ln, t.column, "unknown memory state '" + t.text + "'");
    return static_cast<std::size_t>(it - s.memory.begin());
  };
  auto action_index = [&](const Token& t, std::size_t ln) {
    auto a = m.find_action(t.text);
    if (!a) throw SyntaxError(ln, t.column, "unknown action '" + t.text + "'");
    return *a;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto tokens = split_line(line);
    if (tokens.empty()) continue;
    if (tokens.size() < 2 || tokens[1].text != ":") {
      throw SyntaxError(lineno, tokens[0].column, "expected '<keyword>:'");
    }
    const std::string& kw = tokens[0].text;
    auto expect = [&](std::size_t n) {
      if (tokens.size() != n) {
        throw SyntaxError(lineno, tokens.back().column, "wrong number of fields for '" + kw + "'");
      }
    };
    if (kw == "memory") {
      if (have_memory) throw SyntaxError(lineno, 1, "duplicate 'memory' declaration");
      for (std::size_t i = 2; i < tokens.size(); ++i) {
        if (!is_valid_identifier(tokens[i].text)) throw SyntaxError(lineno, tokens[i].column, "malformed identifier");
        if (std::find(s.memory.begin(), s.memory.end(), tokens[i].text) != s.memory.end()) {
          throw SyntaxError(lineno, tokens[i].column, "duplicate memory state '" + tokens[i].text + "'");
        }
        s.memory.push_back(tokens[i].text);
      }
      s.choose.assign(s.memory.size(), {});
      have_memory = true;
    } else if (!have_memory) {
      throw SyntaxError(lineno, 1, "'memory' must come first");
    } else if (kw == "start") {
      expect(3);
      s.start = memory_index(tokens[2], lineno);
    } else if (kw == "choose") {
      expect(5);
      std::size_t mem = memory_index(tokens[2], lineno);
      ActionId a = action_index(tokens[3], lineno);
      auto p = parse_rational(tokens[4].text);
      if (!p) throw SyntaxError(lineno, tokens[4].column, "malformed probability");
      s.choose[mem].emplace_back(a, *p);
    } else if (kw == "update") {
      expect(7);
      if (tokens[5].text != "->") throw SyntaxError(lineno, tokens[5].column, "expected '->'");
      std::size_t mem = memory_index(tokens[2], lineno);
      ActionId a = action_index(tokens[3], lineno);
      auto o = m.find_observation(tokens[4].text);
      if (!o) throw SyntaxError(lineno, tokens[4].column, "unknown observation '" + tokens[4].text + "'");
      if (!s.update.emplace(std::make_tuple(mem, a, *o), memory_index(tokens[6], lineno)).second) {
        throw SyntaxError(lineno, 1, "duplicate memory update");
      }
    } else {
      throw SyntaxError(lineno, tokens[0].column, "unknown keyword '" + kw + "'");
    }
  }
  if (!have_memory) throw SyntaxError(lineno + 1, 1, "missing 'memory' declaration");
  validate_strategy(m, s);
  return s;
}

StrategySpec wait_then_switch(const Pomdp& m, std::size_t k, ActionId wait, ActionId switch_to,
                              const std::vector<std::pair<ObsId, ActionId>>& escapes) {
  StrategySpec s;
  for (std::size_t i = 0; i <= k; ++i) {
    s.memory.push_back("w" + std::to_string(i));
    s.choose.push_back({{i < k ? wait : switch_to, Rational(1)}});
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (ObsId o = 0; o < m.num_observations(); ++o) s.update[{i, wait, o}] = i + 1;
  }
  for (std::size_t e = 0; e < escapes.size(); ++e) {
    const std::size_t mem = s.memory.size();
    s.memory.push_back("escape" + std::to_string(e));
    s.choose.push_back({{escapes[e].second, Rational(1)}});
    for (std::size_t i = 0; i < k; ++i) s.update[{i, wait, escapes[e].first}] = mem;
  }
  validate_strategy(m, s);
  return s;
}

StrategySpec uniform_in_sec(const Pomdp& m, const Sec& f, Support start) {
  auto it = f.find(start);
  if (it == f.end()) throw Error(ErrorKind::InvalidArgument, "the start support is outside the SEC");
  StrategySpec s;
  std::map<Support, std::size_t> index;
  for (const auto& [support, actions] : f) {
    index[support] = s.memory.size();
    s.memory.push_back("m" + std::to_string(s.memory.size()));
    std::vector<std::pair<ActionId, Rational>> dist;
    for (ActionId a : actions) dist.emplace_back(a, Rational(1, actions.size()));
    s.choose.push_back(std::move(dist));
  }
  s.start = index.at(start);
  for (const auto& [support, actions] : f) {
    for (ActionId a : actions) {
      for (ObsId o = 0; o < m.num_observations(); ++o) {
        Support next = support_step(m, support, a, o);
        if (auto target = index.find(next); target != index.end()) {
          s.update[{index.at(support), a, o}] = target->second;
        }
      }
    }
  }
  validate_strategy(m, s);
  return s;
}

}  // namespace pdpomdp
