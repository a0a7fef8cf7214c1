#include "pdpomdp/unfolder.hpp"
#include "pdpomdp/error.hpp"
#include "pdpomdp/normalize.hpp"

#include <mpfr.h>

#include <algorithm>
#include <ostream>

namespace pdpomdp {

namespace {

// (p * eta)^N / 2^n grows to millions of bits beyond this.
constexpr std::size_t kMaxStatesForC = 16;

Rational power(const Rational& base, unsigned long exponent) {
  Rational out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), exponent);
  out.canonicalize();
  return out;
}

Integer ceil_of(const Rational& q) {
  Integer out;
  mpz_cdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

}  // namespace

ApproxParams ApproxParams::make(const Pomdp& normalized, const Rational& epsilon) {
  return make(normalized.num_states(), normalized.min_probability(), epsilon);
}

ApproxParams ApproxParams::make(std::size_t num_states, const Rational& p_min, const Rational& epsilon) {
  if (epsilon <= 0) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
  if (num_states == 0) throw Error(ErrorKind::InvalidArgument, "the model has no states");
  ApproxParams p;
  p.epsilon = epsilon;
  p.num_states = num_states;
  p.p_min = p_min;
  p.eta = epsilon / Rational(2 * num_states);
  mpz_ui_pow_ui(p.big_n.get_mpz_t(), 2, num_states + 1);
  if (num_states <= kMaxStatesForC) {
    Integer two_n;
    mpz_ui_pow_ui(two_n.get_mpz_t(), 2, num_states);
    p.c = power(p_min * p.eta, p.big_n.get_ui()) / Rational(two_n);
  }
  return p;
}

Integer certified_depth(const ApproxParams& p) {
  if (p.c == 0) {
    throw Error(ErrorKind::TooManyStates, "the certified depth is only computed up to " +
                                              std::to_string(kMaxStatesForC) + " states");
  }
  const Rational factor = Rational(p.big_n) / p.c;
  // Enough bits that the rounding error times factor stays far below 1.
  const long bits = static_cast<long>(mpz_sizeinbase(factor.get_num_mpz_t(), 2)) -
                    static_cast<long>(mpz_sizeinbase(factor.get_den_mpz_t(), 2)) + 128;
  const mpfr_prec_t prec = std::max<long>(bits, 128);

  mpfr_t ln2, lninv;
  mpfr_inits2(prec, ln2, lninv, static_cast<mpfr_ptr>(nullptr));
  mpfr_const_log2(ln2, MPFR_RNDU);
  mpfr_mul_ui(ln2, ln2, p.num_states + 1, MPFR_RNDU);
  Rational inv = 1 / p.epsilon;
  mpfr_set_q(lninv, inv.get_mpq_t(), MPFR_RNDU);
  mpfr_log(lninv, lninv, MPFR_RNDU);
  mpfr_add(ln2, ln2, lninv, MPFR_RNDU);
  Rational bound;
  mpfr_get_q(bound.get_mpq_t(), ln2);
  mpfr_clears(ln2, lninv, static_cast<mpfr_ptr>(nullptr));

  Integer n = ceil_of(factor * bound);
  return n < 0 ? Integer(0) : n;
}

AnalysisContext::AnalysisContext(Pomdp normalized, const std::vector<Support>& roots,
                                 std::size_t support_budget)
    : model_((require_normalized(normalized), std::move(normalized))),
      graph_(Kernel(model_), support_budget) {
  const std::size_t n = model_.num_states();
  if (n < 63 && (std::uint64_t{1} << n) - 1 <= support_budget) {
    graph_.add_all_supports();
    full_ = true;
  } else {
    for (Support r : roots) graph_.add_root(r);
    graph_.add_root(Support::singleton(model_.normalized->top));
    graph_.add_root(Support::singleton(model_.normalized->bot));
  }
  ranks_ = rank_table(graph_);
  secs_ = maximal_sec_decomposition(graph_);
  for (const Sec& f : secs_.secs) reports_.push_back(describe_sec(model_, kernel(), f));
}

std::size_t AnalysisContext::node(Support s) const {
  auto id = graph_.find(s);
  if (!id) throw Error(ErrorKind::Internal, "support " + format_support(s, model_.states) + " was not explored");
  return *id;
}

std::uint64_t AnalysisContext::rank(Support s) const { return ranks_.rank_of_node(node(s)); }

Rational AnalysisContext::rank(const SubBelief& b) const {
  if (b.empty()) return 0;
  return b.mass() * Rational(static_cast<unsigned long>(rank(b.support())));
}

std::optional<std::size_t> AnalysisContext::sec_of(Support s) const { return secs_.sec_of_node[node(s)]; }

const Partition& AnalysisContext::partition(std::size_t sec, Support s) const {
  auto key = std::make_pair(sec, s.bits());
  auto it = partitions_.find(key);
  if (it == partitions_.end()) {
    it = partitions_.emplace(key, indistinguishability_partition(kernel(), secs_.secs[sec], s)).first;
  }
  return it->second;
}

std::string to_string(Rule r) {
  switch (r) {
    case Rule::Observation: return "observation";
    case Rule::Terminal: return "terminal";
    case Rule::Cut: return "cut";
    case Rule::Split: return "split";
    case Rule::Exit: return "exit";
    case Rule::Actions: return "actions";
    case Rule::EmptyCut: return "empty-cut";
    case Rule::Frontier: return "frontier";
  }
  return "unknown";
}

std::string Label::key() const {
  std::string k = belief.key();
  if (action) k += "#" + std::to_string(*action);
  return k;
}

std::string Label::format(const Pomdp& m) const {
  std::string out = belief.format(m.states);
  if (action) out = "(" + out + ", " + m.actions[*action] + ")";
  return out;
}

Unfolder::Unfolder(const AnalysisContext& ctx, Rational eta, UnfoldOptions options)
    : ctx_(ctx), eta_(std::move(eta)), options_(options) {}

Expansion Unfolder::compute(const Label& label) {
  const Pomdp& m = ctx_.model();
  const SubBelief& b = label.belief;
  Expansion e{Rule::Actions, {}};
  if (label.action) {
    e.rule = Rule::Observation;
    for (ObsId o = 0; o < m.num_observations(); ++o) {
      Rational p = obs_probability(m, b, *label.action, o);
      if (p > 0) e.children.push_back({p, Label{belief_update(m, b, *label.action, o), std::nullopt}});
    }
    return e;
  }
  const Support s = b.support();
  if (ctx_.is_top(s) || ctx_.is_bot(s)) {
    e.rule = Rule::Terminal;
    return e;
  }
  if (b.min_entry() < eta_) {
    try {
      e.children.push_back({1, Label{cut(b, eta_), std::nullopt}});
      e.rule = Rule::Cut;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::EmptyResult) throw;
      e.rule = Rule::EmptyCut;
    }
    return e;
  }
  if (auto sec = ctx_.sec_of(s)) {
    const SecReport& report = ctx_.reports()[*sec];
    if (report.distinguishing) {
      e.rule = Rule::Split;
      for (Support block : ctx_.partition(*sec, s).blocks) {
        SubBelief part = restrict(b, block);
        e.children.push_back({part.mass() / b.mass(), Label{part.scaled(b.mass() / part.mass()), std::nullopt}});
      }
    } else {
      e.rule = Rule::Exit;
      for (auto& [c, a] : enumerate_exit_frontier(m, report.sec, b, options_.frontier_cap)) {
        e.children.push_back({1, Label{std::move(c), a}});
      }
    }
    return e;
  }
  for (ActionId a = 0; a < m.num_actions(); ++a) e.children.push_back({1, Label{b, a}});
  return e;
}

const Expansion& Unfolder::expand(const Label& label) {
  std::string key = label.key();
  auto it = expansions_.find(key);
  if (it == expansions_.end()) it = expansions_.emplace(std::move(key), compute(label)).first;
  return it->second;
}

Stats Unfolder::leaf_stats(const Label& label) const {
  const SubBelief& b = label.belief;
  Stats s{0, ctx_.rank(b)};
  if (!b.empty() && ctx_.is_top(b.support())) s.value = b.mass();
  return s;
}

Stats Unfolder::combine(const Expansion& e, const std::vector<Stats>& children) const {
  Stats out{0, 0};
  switch (e.rule) {
    case Rule::Observation:
    case Rule::Split:
      for (std::size_t i = 0; i < children.size(); ++i) {
        out.value += e.children[i].weight * children[i].value;
        out.rankhat += e.children[i].weight * children[i].rankhat;
      }
      break;
    case Rule::Cut:
      out = children.front();
      break;
    case Rule::Exit:
    case Rule::Actions:
      for (std::size_t i = 0; i < children.size(); ++i) {
        if (i == 0 || children[i].value > out.value) out.value = children[i].value;
        if (i == 0 || children[i].rankhat > out.rankhat) out.rankhat = children[i].rankhat;
      }
      break;
    default:
      throw Error(ErrorKind::Internal, "combine called on a leaf");
  }
  return out;
}

void Unfolder::count_expansion() {
  if (expanded_ >= options_.node_budget) {
    throw Error(ErrorKind::NodeBudgetExceeded,
                "the unfolding exceeds the node budget of " + std::to_string(options_.node_budget));
  }
  ++expanded_;
}

Stats Unfolder::evaluate(const Label& root, std::uint64_t depth) {
  if (depth == 0) return leaf_stats(root);
  std::string key;
  if (options_.memo) {
    key = root.key() + "@" + std::to_string(depth);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  }
  count_expansion();
  const Expansion& e = expand(root);
  Stats out;
  if (e.rule == Rule::Terminal) {
    out = leaf_stats(root);
  } else if (e.rule == Rule::EmptyCut) {
    out = Stats{0, 0};
  } else {
    std::vector<Stats> children;
    children.reserve(e.children.size());
    for (const Child& c : e.children) children.push_back(evaluate(c.label, depth - 1));
    out = combine(e, children);
  }
  if (options_.memo) memo_.emplace(std::move(key), out);
  return out;
}

std::unique_ptr<UnfoldNode> Unfolder::build_tree(const Label& root, std::uint64_t depth) {
  auto node = std::make_unique<UnfoldNode>();
  node->label = root;
  if (depth == 0) {
    node->rule = Rule::Frontier;
    node->stats = leaf_stats(root);
    return node;
  }
  count_expansion();
  const Expansion& e = expand(root);
  node->rule = e.rule;
  if (e.rule == Rule::Terminal) {
    node->stats = leaf_stats(root);
  } else if (e.rule == Rule::EmptyCut) {
    node->stats = Stats{0, 0};
  } else {
    std::vector<Stats> children;
    for (const Child& c : e.children) {
      auto child = build_tree(c.label, depth - 1);
      children.push_back(child->stats);
      node->children.emplace_back(c.weight, std::move(child));
    }
    node->stats = combine(e, children);
  }
  return node;
}

Rational upper_bound(const Stats& s, const SubBelief& b, const Rational& eta) {
  Rational hi = s.value + s.rankhat + Rational(static_cast<unsigned long>(b.size())) * eta;
  return hi < b.mass() ? hi : b.mass();
}

namespace {

struct Probe {
  bool finite = false;
  std::uint64_t height = 0;
};

// Height of the label graph below root, or finite = false when it is cyclic
// or larger than the budget.
Probe probe_labels(Unfolder& u, const Label& root, std::uint64_t budget) {
  enum class Mark { Open, Done };
  std::unordered_map<std::string, std::pair<Mark, std::uint64_t>> marks;
  struct Frame {
    Label label;
    std::string key;
    std::size_t next = 0;
    std::uint64_t height = 0;
  };
  std::vector<Frame> stack;
  stack.push_back({root, root.key()});
  marks[stack.back().key] = {Mark::Open, 0};
  std::uint64_t result = 0;
  while (!stack.empty()) {
    Frame& f = stack.back();
    const Expansion& e = u.expand(f.label);
    if (f.next < e.children.size()) {
      const Label& child = e.children[f.next++].label;
      std::string key = child.key();
      auto it = marks.find(key);
      if (it == marks.end()) {
        if (marks.size() >= budget) return {};
        marks[key] = {Mark::Open, 0};
        stack.push_back({child, std::move(key)});
      } else if (it->second.first == Mark::Open) {
        return {};
      } else {
        f.height = std::max(f.height, it->second.second + 1);
      }
      continue;
    }
    std::uint64_t h = f.height;
    marks[f.key] = {Mark::Done, h};
    stack.pop_back();
    if (stack.empty()) {
      result = h;
    } else {
      stack.back().height = std::max(stack.back().height, h + 1);
    }
  }
  return {true, result};
}

}  // namespace

ApproxResult approximate(const Pomdp& normalized, const SubBelief& b, const Rational& epsilon,
                         const ApproxOptions& options) {
  require_normalized(normalized);
  if (auto w = check_posterior_deterministic(normalized)) {
    throw Error(ErrorKind::NotPosteriorDeterministic,
                "state " + normalized.states[w->state] + " action " + normalized.actions[w->action] +
                    " observation " + normalized.observations[w->obs] + " has successors " +
                    normalized.states[w->first] + " and " + normalized.states[w->second]);
  }
  if (b.mass() != 1) throw Error(ErrorKind::InvalidArgument, "the initial belief must have mass 1");

  ApproxResult r;
  r.params = ApproxParams::make(normalized, epsilon);
  r.lower = 0;
  r.upper = 1;
  AnalysisContext ctx(normalized, {b.support()});
  Unfolder u(ctx, r.params.eta, UnfoldOptions{options.memo, options.node_budget, 100000});
  const Label root{b, std::nullopt};

  auto record = [&](std::uint64_t depth) {
    Stats s = u.evaluate(root, depth);
    r.lower = s.value;
    r.upper = upper_bound(s, b, r.params.eta);
    r.depth = depth;
    r.nodes_expanded = u.nodes_expanded();
    if (options.progress) {
      *options.progress << "depth " << depth << " width " << decimal_string(r.width()) << '\n';
    }
  };

  if (options.mode == Mode::Certified) {
    r.certified_depth = certified_depth(r.params);
    Probe p;
    try {
      p = probe_labels(u, root, options.node_budget);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::NodeBudgetExceeded) throw;
    }
    if (!p.finite) {
      r.nodes_expanded = u.nodes_expanded();
      return r;
    }
    // One level past the height so that childless nodes are expanded, not frontier.
    Integer full = Integer(p.height) + 1;
    Integer depth = *r.certified_depth < full ? *r.certified_depth : full;
    try {
      record(depth.get_ui());
      r.converged = r.width() <= epsilon;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::NodeBudgetExceeded) throw;
      r.nodes_expanded = u.nodes_expanded();
    }
    return r;
  }

  const std::uint64_t step =
      r.params.big_n.fits_ulong_p() ? std::min<std::uint64_t>(r.params.big_n.get_ui(), 1u << 20) : 1u << 20;
  for (std::uint64_t depth = 0;; depth += step) {
    try {
      record(depth);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::NodeBudgetExceeded) throw;
      r.nodes_expanded = u.nodes_expanded();
      return r;
    }
    if (r.width() <= epsilon) {
      r.converged = true;
      return r;
    }
  }
}

Verdict classify(const ApproxResult& bounds, const Rational& v, const Rational& epsilon) {
  return bounds.upper < v + epsilon ? Verdict::CaseII : Verdict::CaseI;
}

Decision decide(const Pomdp& normalized, const SubBelief& b, const Rational& v, const Rational& epsilon,
                const ApproxOptions& options) {
  if (v < 0 || v > 1) throw Error(ErrorKind::InvalidArgument, "the threshold must lie in [0, 1]");
  ApproxResult r = approximate(normalized, b, epsilon, options);
  if (!r.converged) {
    throw Error(ErrorKind::NodeBudgetExceeded, "bounds did not reach width " + exact_string(epsilon));
  }
  Verdict verdict = classify(r, v, epsilon);
  return {verdict, std::move(r)};
}

}  // namespace pdpomdp
