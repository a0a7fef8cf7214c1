#include "pdpomdp/cli.hpp"
#include "pdpomdp/dot.hpp"
#include "pdpomdp/error.hpp"
#include "pdpomdp/model_io.hpp"
#include "pdpomdp/normalize.hpp"
#include "pdpomdp/oracles.hpp"
#include "pdpomdp/unfolder.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pdpomdp {

namespace {

using nlohmann::json;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return kParse;
    case ErrorKind::InvalidArgument: return kUsage;
    case ErrorKind::NodeBudgetExceeded:
    case ErrorKind::NotFinite:
    case ErrorKind::TooManyStates: return kBudget;
    default: return kSemantic;
  }
}

json names_of(Support s, const Pomdp& m) {
  json out = json::array();
  for (StateId q : s.states()) out.push_back(m.states[q]);
  return out;
}

json belief_json(const SubBelief& b, const Pomdp& m) {
  json out = json::object();
  for (const auto& [q, mass] : b.entries()) out[m.states[q]] = rational_json(mass);
  return out;
}

Rational parse_positive(const std::string& text, const char* what) {
  auto r = parse_rational(text);
  if (!r || *r <= 0) throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be a positive rational");
  return *r;
}

std::uint64_t default_node_budget() {
  if (const char* env = std::getenv("PDPOMDP_NODE_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return kDefaultNodeBudget;
}

struct Loaded {
  ModelFile file;
  Normalization norm;
  SubBelief init;
};

Loaded load_normalized(const std::string& path) {
  Loaded l{load_model(path), {}, {}};
  l.norm = normalize(l.file.model, l.file.targets);
  l.init = l.norm.map_belief(l.file.init);
  return l;
}

json witness_json(const Pomdp& m, const DeterminismWitness& w) {
  return {{"state", m.states[w.state]},
          {"action", m.actions[w.action]},
          {"observation", m.observations[w.obs]},
          {"successors", {m.states[w.first], m.states[w.second]}}};
}

// Exit code 3 with the witness when the model is not posterior-deterministic.
bool reject_not_pd(const Pomdp& m, std::ostream& out, std::ostream& err) {
  auto w = check_posterior_deterministic(m);
  if (!w) return false;
  out << json{{"error", to_string(ErrorKind::NotPosteriorDeterministic)},
               {"witness", witness_json(m, *w)}}.dump(2)
      << '\n';
  err << "error: model is not posterior-deterministic\n";
  return true;
}

StrategySpec strategy_from(const std::string& spec, const Pomdp& m, const SubBelief& init) {
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream in(s);
    for (std::string part; std::getline(in, part, sep);) parts.push_back(part);
    return parts;
  };
  auto action = [&](const std::string& name) {
    auto a = m.find_action(name);
    if (!a) throw Error(ErrorKind::InvalidArgument, "unknown action '" + name + "'");
    return *a;
  };
  if (spec == "uniform-sec") {
    SecReport r = maximal_sec_of(m, init.support());
    return uniform_in_sec(m, r.sec, init.support());
  }
  if (spec.rfind("wait:", 0) == 0) {
    auto parts = split(spec, ':');
    if (parts.size() < 4) throw Error(ErrorKind::InvalidArgument, "expected wait:K:WAIT:SWITCH[:OBS=ACTION...]");
    std::size_t k = std::stoul(parts[1]);
    std::vector<std::pair<ObsId, ActionId>> escapes;
    for (std::size_t i = 4; i < parts.size(); ++i) {
      auto kv = split(parts[i], '=');
      auto o = kv.size() == 2 ? m.find_observation(kv[0]) : std::nullopt;
      if (!o) throw Error(ErrorKind::InvalidArgument, "bad escape '" + parts[i] + "'");
      escapes.emplace_back(*o, action(kv[1]));
    }
    return wait_then_switch(m, k, action(parts[2]), action(parts[3]), escapes);
  }
  std::ifstream in(spec, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open strategy '" + spec + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_strategy(m, text.str());
}

int cmd_check(const std::string& path, std::ostream& out, std::ostream& err) {
  ModelFile f = load_model(path);
  if (reject_not_pd(f.model, out, err)) {
    return kSemantic;
  }
  out << json{{"posterior_deterministic", true}}.dump(2) << '\n';
  return kOk;
}

int cmd_normalize(const std::string& path, const std::string& output, std::ostream& out) {
  ModelFile f = load_model(path);
  Normalization n = normalize(f.model, f.targets);
  write_text_file(output, emit_model(n.model, n.map_belief(f.init), {n.model.normalized->top}));
  json merged = json::array();
  for (StateId q : n.merged_into_bot) merged.push_back(f.model.states[q]);
  out << json{{"output", output},
              {"states", n.model.num_states()},
              {"top", n.model.states[n.model.normalized->top]},
              {"bot", n.model.states[n.model.normalized->bot]},
              {"merged_into_bot", merged},
              {"already_normal", n.already_normal}}
             .dump(2)
      << '\n';
  return kOk;
}

int cmd_info(const std::string& path, const std::string& dot, std::ostream& out, std::ostream& err) {
  Loaded l = load_normalized(path);
  const Pomdp& m = l.norm.model;
  if (reject_not_pd(l.file.model, out, err)) return kSemantic;
  AnalysisContext ctx(m, {l.init.support()});
  json secs = json::array();
  for (const SecReport& r : ctx.reports()) {
    json domain = json::array();
    json actions = json::array();
    for (const auto& [s, acts] : r.sec) {
      domain.push_back(names_of(s, m));
      json a = json::array();
      for (ActionId id : acts) a.push_back(m.actions[id]);
      actions.push_back(a);
    }
    json blocks = json::array();
    for (Support b : indistinguishability_partition(ctx.kernel(), r.sec, r.sec.begin()->first).blocks) {
      blocks.push_back(names_of(b, m));
    }
    secs.push_back({{"domain", domain},
                    {"actions", actions},
                    {"distinguishing", r.distinguishing},
                    {"trivial", r.trivial},
                    {"bottom", r.bottom},
                    {"partition", blocks}});
  }
  json ranks = json::array();
  for (std::size_t v = 0; v < ctx.graph().size(); ++v) {
    ranks.push_back({{"support", names_of(ctx.graph().node(v), m)}, {"rank", ctx.ranks().rank_of_node(v)}});
  }
  auto init_sec = ctx.sec_of(l.init.support());
  json doc{{"model", m.name},
           {"states", m.num_states()},
           {"actions", m.num_actions()},
           {"observations", m.num_observations()},
           {"initial", {{"belief", belief_json(l.init, m)},
                        {"rank", ctx.rank(l.init.support())},
                        {"sec", init_sec ? json(*init_sec) : json(nullptr)}}},
           {"support_graph", {{"nodes", ctx.graph().size()}, {"full_lattice", ctx.full_lattice()}}},
           {"maximal_secs", secs},
           {"ranks", ranks}};
  if (!dot.empty()) write_text_file(dot, support_graph_dot(ctx));
  out << doc.dump(2) << '\n';
  return kOk;
}

struct ApproxArgs {
  std::string epsilon;
  std::string mode = "anytime";
  std::uint64_t node_budget = 0;
  std::string memo = "on";
  std::string tree_dot;
  std::uint64_t tree_depth = 4;
  bool timing = false;
  bool progress = false;
};

int cmd_approx(const std::string& path, const ApproxArgs& a, std::ostream& out, std::ostream& err) {
  const Rational eps = parse_positive(a.epsilon, "--epsilon");
  Loaded l = load_normalized(path);
  const Pomdp& m = l.norm.model;
  if (reject_not_pd(l.file.model, out, err)) return kSemantic;
  ApproxOptions opts;
  opts.mode = a.mode == "certified" ? Mode::Certified : Mode::Anytime;
  opts.memo = a.memo == "on";
  opts.node_budget = a.node_budget ? a.node_budget : default_node_budget();
  if (a.progress) opts.progress = &err;

  auto start = std::chrono::steady_clock::now();
  ApproxResult r = approximate(m, l.init, eps, opts);
  auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);

  ResultDocument doc;
  doc.model = l.file.model.name;
  doc.epsilon = eps;
  doc.eta = r.params.eta;
  doc.lower = r.lower;
  doc.upper = r.upper;
  doc.nodes_expanded = r.nodes_expanded;
  doc.max_depth = r.depth;
  doc.mode = a.mode;
  doc.status = r.converged ? "converged" : "budget_exceeded";
  doc.wall_time_ms = elapsed.count();
  doc.certified_depth = r.certified_depth;

  if (!a.tree_dot.empty()) {
    AnalysisContext ctx(m, {l.init.support()});
    Unfolder u(ctx, r.params.eta, UnfoldOptions{true, opts.node_budget, 100000});
    write_text_file(a.tree_dot, tree_dot(u, Label{l.init, std::nullopt}, a.tree_depth));
  }
  out << to_json(doc, a.timing).dump(2) << '\n';
  if (!r.converged) {
    err << "error: node budget exhausted before width " << exact_string(eps) << '\n';
    return kBudget;
  }
  return kOk;
}

int cmd_decide(const std::string& path, const std::string& threshold, const std::string& epsilon,
               std::uint64_t node_budget, std::ostream& out, std::ostream& err) {
  const Rational eps = parse_positive(epsilon, "--epsilon");
  auto v = parse_rational(threshold);
  if (!v || *v > 1) throw Error(ErrorKind::InvalidArgument, "--threshold must be a rational in [0, 1]");
  Loaded l = load_normalized(path);
  const Pomdp& m = l.norm.model;
  if (reject_not_pd(l.file.model, out, err)) return kSemantic;
  ApproxOptions opts;
  opts.node_budget = node_budget ? node_budget : default_node_budget();
  ApproxResult r = approximate(m, l.init, eps, opts);
  json doc{{"model", l.file.model.name},
           {"threshold", rational_json(*v)},
           {"epsilon", rational_json(eps)},
           {"lower", rational_json(r.lower)},
           {"upper", rational_json(r.upper)},
           {"width", rational_json(r.width())}};
  if (!r.converged) {
    doc["status"] = "budget_exceeded";
    out << doc.dump(2) << '\n';
    err << "error: node budget exhausted before width " << exact_string(eps) << '\n';
    return kBudget;
  }
  doc["status"] = "converged";
  doc["verdict"] = classify(r, *v, eps) == Verdict::CaseI ? "CaseI" : "CaseII";
  out << doc.dump(2) << '\n';
  return kOk;
}

int cmd_oracle(const std::string& path, const std::string& which, std::size_t horizon, std::size_t cap,
               std::ostream& out, std::ostream& err) {
  Loaded l = load_normalized(path);
  const Pomdp& m = l.norm.model;
  if (reject_not_pd(l.file.model, out, err)) return kSemantic;
  json doc{{"model", l.file.model.name}, {"oracle", which}};
  if (which == "naive") {
    doc["horizon"] = horizon;
    doc["value"] = rational_json(naive_lower_bound(m, l.init, horizon));
  } else {
    ExactOptions opts;
    opts.cap = cap;
    doc["cap"] = cap;
    doc["value"] = exact_finite_belief_value(m, l.init, opts);
  }
  out << doc.dump(2) << '\n';
  return kOk;
}

int cmd_simulate(const std::string& path, const std::string& strategy, std::uint64_t runs, std::uint64_t horizon,
                 std::uint64_t seed, std::ostream& out, std::ostream& err) {
  Loaded l = load_normalized(path);
  const Pomdp& m = l.norm.model;
  if (reject_not_pd(l.file.model, out, err)) return kSemantic;
  SimulationReport r = simulate(m, l.init, strategy_from(strategy, m, l.init), runs, horizon, seed);
  out << json{{"model", l.file.model.name},
              {"strategy", strategy},
              {"runs", r.runs},
              {"horizon", r.horizon},
              {"hits", r.hits},
              {"estimate", r.estimate},
              {"interval", {r.interval_low, r.interval_high}},
              {"seed", r.seed}}
             .dump(2)
      << '\n';
  return kOk;
}

int cmd_gen(const GeneratorConfig& config, const std::string& output, std::ostream& out) {
  ModelFile f = generate_random_pd(config);
  write_text_file(output, emit_model(f.model, f.init, f.targets));
  out << json{{"output", output},
              {"states", f.model.num_states()},
              {"seed", config.seed},
              {"posterior_deterministic", !check_posterior_deterministic(f.model).has_value()}}
             .dump(2)
      << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reachability value bounds for posterior-deterministic POMDPs", "pdpomdp"};
  app.require_subcommand(1);

  std::string model;
  std::string output;
  std::string dot;
  ApproxArgs approx;
  std::string threshold;
  std::string which = "exact";
  std::size_t horizon = 10;
  std::size_t cap = 100000;
  std::string strategy;
  std::uint64_t runs = 10000;
  std::uint64_t sim_horizon = 100;
  std::uint64_t seed = 0;
  GeneratorConfig gen;
  bool mdp = false;

  auto* check = app.add_subcommand("check", "Check posterior determinism");
  check->add_option("model", model, "Model file")->required();

  auto* norm = app.add_subcommand("normalize", "Write the normalized model");
  norm->add_option("model", model, "Model file")->required();
  norm->add_option("-o,--output", output, "Output file")->required();

  auto* info = app.add_subcommand("info", "Support graph, maximal SECs and ranks");
  info->add_option("model", model, "Model file")->required();
  info->add_option("--dot", dot, "Write the support graph as DOT");

  auto* ap = app.add_subcommand("approx", "Lower and upper bounds on the value");
  ap->add_option("model", model, "Model file")->required();
  ap->add_option("--epsilon", approx.epsilon, "Target width")->required();
  ap->add_option("--mode", approx.mode, "anytime or certified")->check(CLI::IsMember({"anytime", "certified"}));
  ap->add_option("--node-budget", approx.node_budget, "Maximum node expansions");
  ap->add_option("--memo", approx.memo, "Memoize subtree statistics")->check(CLI::IsMember({"on", "off"}));
  ap->add_option("--tree-dot", approx.tree_dot, "Write the tree prefix as DOT");
  ap->add_option("--tree-depth", approx.tree_depth, "Depth of the DOT tree prefix");
  ap->add_flag("--timing", approx.timing, "Include wall_time_ms");
  ap->add_flag("--progress", approx.progress, "Report widths on stderr");

  auto* dc = app.add_subcommand("decide", "Threshold decision");
  dc->add_option("model", model, "Model file")->required();
  dc->add_option("--threshold", threshold, "Threshold v")->required();
  dc->add_option("--epsilon", approx.epsilon, "Promise gap")->required();
  dc->add_option("--node-budget", approx.node_budget, "Maximum node expansions");

  auto* orc = app.add_subcommand("oracle", "Reference values");
  orc->add_option("model", model, "Model file")->required();
  orc->add_option("--which", which, "naive or exact")->check(CLI::IsMember({"naive", "exact"}));
  orc->add_option("--horizon", horizon, "Steps for the naive oracle");
  orc->add_option("--cap", cap, "Belief cap for the exact oracle");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo evaluation of a strategy");
  sim->add_option("model", model, "Model file")->required();
  sim->add_option("--strategy", strategy,
                  "Strategy file, uniform-sec, or wait:K:WAIT:SWITCH[:OBS=ACTION...]")
      ->required();
  sim->add_option("--runs", runs, "Number of runs");
  sim->add_option("--horizon", sim_horizon, "Steps per run");
  sim->add_option("--seed", seed, "Random seed");

  auto* g = app.add_subcommand("gen", "Random posterior-deterministic model");
  g->add_option("--states", gen.states, "Number of states")->required();
  g->add_option("--actions", gen.actions, "Number of actions")->required();
  g->add_option("--obs", gen.observations, "Number of observations")->required();
  g->add_option("--branching", gen.branching, "Observations per state and action");
  g->add_option("--seed", gen.seed, "Random seed")->required();
  g->add_flag("--mdp", mdp, "Fully observable instance");
  g->add_option("-o,--output", output, "Output file")->required();

  std::vector<std::string> argv_storage{"pdpomdp"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, err, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*check) return cmd_check(model, out, err);
    if (*norm) return cmd_normalize(model, output, out);
    if (*info) return cmd_info(model, dot, out, err);
    if (*ap) return cmd_approx(model, approx, out, err);
    if (*dc) return cmd_decide(model, threshold, approx.epsilon, approx.node_budget, out, err);
    if (*orc) return cmd_oracle(model, which, horizon, cap, out, err);
    if (*sim) return cmd_simulate(model, strategy, runs, sim_horizon, seed, out, err);
    if (*g) {
      gen.fully_observable = mdp;
      return cmd_gen(gen, output, out);
    }
  } catch (const SyntaxError& e) {
    out << json{{"error", to_string(e.kind())}, {"line", e.line()}, {"column", e.column()}, {"message", e.what()}}
               .dump(2)
        << '\n';
    err << "error: " << e.what() << '\n';
    return kParse;
  } catch (const ValidationError& e) {
    json issues = json::array();
    for (const Issue& i : e.issues()) issues.push_back({{"kind", to_string(i.kind)}, {"message", i.message}});
    out << json{{"error", "ValidationError"}, {"issues", issues}}.dump(2) << '\n';
    err << "error: " << e.what() << '\n';
    return kSemantic;
  } catch (const Error& e) {
    out << json{{"error", to_string(e.kind())}, {"message", e.what()}}.dump(2) << '\n';
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    out << json{{"error", "Internal"}, {"message", e.what()}}.dump(2) << '\n';
    err << "error: " << e.what() << '\n';
    return kSemantic;
  }
  return kUsage;
}

}  // namespace pdpomdp
