#include "pdpomdp/oracles.hpp"
#include "pdpomdp/error.hpp"
#include "pdpomdp/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

namespace pdpomdp {

namespace {

bool only_top_or_bot(const Pomdp& m, Support s) {
  const auto& marks = *m.normalized;
  return s == Support::singleton(marks.top) || s == Support::singleton(marks.bot);
}

class NaiveSolver {
 public:
  NaiveSolver(const Pomdp& m, std::uint64_t budget) : m_(m), budget_(budget) {}

  Rational value(const SubBelief& b, std::size_t n) {
    const StateId top = m_.normalized->top;
    if (n == 0 || only_top_or_bot(m_, b.support())) return b.at(top);
    std::string key = b.key() + "@" + std::to_string(n);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (memo_.size() >= budget_) {
      throw Error(ErrorKind::NodeBudgetExceeded, "naive unfolding exceeds " + std::to_string(budget_) + " nodes");
    }
    Rational best = 0;
    for (ActionId a = 0; a < m_.num_actions(); ++a) {
      Rational total = 0;
      for (ObsId o = 0; o < m_.num_observations(); ++o) {
        Rational p = obs_probability(m_, b, a, o);
        if (p > 0) total += p * value(belief_update(m_, b, a, o), n - 1);
      }
      if (total > best) best = total;
    }
    memo_.emplace(std::move(key), best);
    return best;
  }

 private:
  const Pomdp& m_;
  std::uint64_t budget_;
  std::unordered_map<std::string, Rational> memo_;
};

}  // namespace

Rational naive_lower_bound(const Pomdp& normalized, const SubBelief& b, std::size_t n, std::uint64_t node_budget) {
  require_normalized(normalized);
  NaiveSolver solver(normalized, node_budget);
  return solver.value(b, n);
}

double exact_finite_belief_value(const Pomdp& normalized, const SubBelief& b, const ExactOptions& options) {
  require_normalized(normalized);
  const Pomdp& m = normalized;
  if (b.empty()) return 0;
  const SubBelief start = b.scaled(1 / b.mass());

  struct Move {
    double p;
    std::size_t next;
  };
  std::vector<SubBelief> beliefs{start};
  std::unordered_map<std::string, std::size_t> index{{start.key(), 0}};
  std::vector<std::vector<std::vector<Move>>> moves;
  std::vector<double> fixed;  // -1 when the value is not fixed
  for (std::size_t i = 0; i < beliefs.size(); ++i) {
    const SubBelief cur = beliefs[i];
    moves.emplace_back();
    const Support s = cur.support();
    if (only_top_or_bot(m, s)) {
      fixed.push_back(s == Support::singleton(m.normalized->top) ? 1.0 : 0.0);
      continue;
    }
    fixed.push_back(-1);
    for (ActionId a = 0; a < m.num_actions(); ++a) {
      std::vector<Move> row;
      for (ObsId o = 0; o < m.num_observations(); ++o) {
        Rational p = obs_probability(m, cur, a, o);
        if (p == 0) continue;
        SubBelief next = belief_update(m, cur, a, o);
        auto [it, inserted] = index.emplace(next.key(), beliefs.size());
        if (inserted) {
          if (beliefs.size() >= options.cap) {
            throw Error(ErrorKind::NotFinite, "more than " + std::to_string(options.cap) + " reachable beliefs");
          }
          beliefs.push_back(std::move(next));
        }
        row.push_back({p.get_d(), it->second});
      }
      moves.back().push_back(std::move(row));
    }
  }

  std::vector<double> x(beliefs.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (fixed[i] >= 0) x[i] = fixed[i];
  }
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    double diff = 0;
    std::vector<double> y = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (fixed[i] >= 0) continue;
      double best = 0;
      for (const auto& row : moves[i]) {
        double v = 0;
        for (const Move& mv : row) v += mv.p * x[mv.next];
        best = std::max(best, v);
      }
      y[i] = best;
      diff = std::max(diff, std::abs(best - x[i]));
    }
    x = std::move(y);
    if (diff < options.tolerance) break;
  }
  return x[0] * b.mass().get_d();
}

std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t runs) {
  if (runs == 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  const double n = static_cast<double>(runs);
  const double p = static_cast<double>(hits) / n;
  const double denom = 1 + z * z / n;
  const double center = (p + z * z / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
  return {std::min(p, std::max(0.0, center - half)), std::max(p, std::min(1.0, center + half))};
}

SimulationReport simulate(const Pomdp& normalized, const SubBelief& b, const StrategySpec& strategy,
                          std::uint64_t runs, std::uint64_t horizon, std::uint64_t seed) {
  require_normalized(normalized);
  validate_strategy(normalized, strategy);
  const Pomdp& m = normalized;
  const StateId top = m.normalized->top;
  const StateId bot = m.normalized->bot;

  auto pick = [](std::mt19937_64& gen, const auto& weights) {
    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    double u = std::uniform_real_distribution<double>(0.0, total)(gen);
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (u < weights[i]) return i;
      u -= weights[i];
    }
    return weights.size() - 1;
  };

  std::vector<double> init_w;
  for (const auto& [q, p] : b.entries()) init_w.push_back(p.get_d());
  std::vector<std::vector<double>> choose_w;
  for (const auto& dist : strategy.choose) {
    choose_w.emplace_back();
    for (const auto& [a, p] : dist) choose_w.back().push_back(p.get_d());
  }
  std::vector<std::vector<std::vector<double>>> trans_w(m.num_states());
  for (StateId q = 0; q < m.num_states(); ++q) {
    for (ActionId a = 0; a < m.num_actions(); ++a) {
      trans_w[q].emplace_back();
      for (const Transition& t : m.out(q, a)) trans_w[q].back().push_back(t.prob.get_d());
    }
  }

  SimulationReport r;
  r.runs = runs;
  r.horizon = horizon;
  r.seed = seed;
  for (std::uint64_t run = 0; run < runs; ++run) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(run), static_cast<std::uint32_t>(run >> 32)};
    std::mt19937_64 gen(seq);
    StateId q = b.entries()[pick(gen, init_w)].first;
    std::size_t mem = strategy.start;
    for (std::uint64_t t = 0; t < horizon && q != top && q != bot; ++t) {
      ActionId a = strategy.choose[mem][pick(gen, choose_w[mem])].first;
      const Transition& tr = m.out(q, a)[pick(gen, trans_w[q][a])];
      mem = strategy.next(mem, a, tr.obs);
      q = tr.next;
    }
    if (q == top) ++r.hits;
  }
  r.estimate = runs == 0 ? 0.0 : static_cast<double>(r.hits) / static_cast<double>(runs);
  std::tie(r.interval_low, r.interval_high) = wilson_interval(r.hits, runs);
  return r;
}

namespace {

// k positive integers summing to total, uniformly over compositions.
std::vector<std::uint64_t> composition(std::mt19937_64& gen, std::uint64_t total, std::size_t k) {
  std::vector<std::uint64_t> cuts(total - 1);
  std::iota(cuts.begin(), cuts.end(), 1);
  for (std::size_t i = 0; i + 1 < k; ++i) {
    std::uniform_int_distribution<std::size_t> d(i, cuts.size() - 1);
    std::swap(cuts[i], cuts[d(gen)]);
  }
  cuts.resize(k - 1);
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::uint64_t> parts;
  std::uint64_t prev = 0;
  for (std::uint64_t c : cuts) {
    parts.push_back(c - prev);
    prev = c;
  }
  parts.push_back(total - prev);
  return parts;
}

Rational fraction(std::uint64_t num, std::uint64_t den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

std::vector<std::size_t> distinct_sample(std::mt19937_64& gen, std::size_t n, std::size_t k) {
  std::vector<std::size_t> items(n);
  std::iota(items.begin(), items.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> d(i, n - 1);
    std::swap(items[i], items[d(gen)]);
  }
  items.resize(k);
  std::sort(items.begin(), items.end());
  return items;
}

}  // namespace

ModelFile generate_random_pd(const GeneratorConfig& config) {
  if (config.states < 2 || config.actions < 1 || (!config.fully_observable && config.observations < 1)) {
    throw Error(ErrorKind::InvalidArgument, "need at least 2 states, 1 action and 1 observation");
  }
  constexpr std::uint64_t kMaxDenominator = 16;
  std::mt19937_64 gen(config.seed);
  RawModel raw;
  raw.name = "random_" + std::to_string(config.seed);
  for (std::size_t i = 0; i < config.states; ++i) raw.states.push_back("s" + std::to_string(i));
  for (std::size_t i = 0; i < config.actions; ++i) raw.actions.push_back("a" + std::to_string(i));
  if (config.fully_observable) {
    for (std::size_t i = 0; i < config.states; ++i) raw.observations.push_back("at_s" + std::to_string(i));
  } else {
    for (std::size_t i = 0; i < config.observations; ++i) raw.observations.push_back("o" + std::to_string(i));
  }
  const std::size_t width = config.fully_observable ? config.states : config.observations;
  const std::size_t k =
      std::clamp<std::size_t>(config.branching, 1, std::min<std::size_t>(width, kMaxDenominator));

  for (std::size_t q = 0; q < config.states; ++q) {
    for (std::size_t a = 0; a < config.actions; ++a) {
      RawRow row{raw.states[q], raw.actions[a], {}};
      auto picks = distinct_sample(gen, width, k);
      std::uint64_t den = std::uniform_int_distribution<std::uint64_t>(k, kMaxDenominator)(gen);
      auto weights = composition(gen, den, k);
      for (std::size_t i = 0; i < k; ++i) {
        std::size_t next = config.fully_observable
                               ? picks[i]
                               : std::uniform_int_distribution<std::size_t>(0, config.states - 1)(gen);
        row.edges.push_back({raw.observations[picks[i]], raw.states[next], fraction(weights[i], den)});
      }
      raw.rows.push_back(std::move(row));
    }
  }

  ModelFile out;
  out.model = validate(raw);
  const StateId target = static_cast<StateId>(config.states - 1);
  out.targets = {target};
  if (config.fully_observable) {
    out.init = SubBelief::dirac(0);
  } else {
    std::size_t size = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(3, config.states - 1))(gen);
    auto support = distinct_sample(gen, config.states - 1, size);
    std::uint64_t den = std::uniform_int_distribution<std::uint64_t>(std::max<std::size_t>(size, 1), kMaxDenominator)(gen);
    auto weights = composition(gen, den, size);
    std::vector<SubBelief::Entry> entries;
    for (std::size_t i = 0; i < size; ++i) {
      entries.emplace_back(static_cast<StateId>(support[i]), fraction(weights[i], den));
    }
    out.init = SubBelief::from_entries(std::move(entries));
  }
  return out;
}

}  // namespace pdpomdp
