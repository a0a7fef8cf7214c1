#include "pdpomdp/kernel.hpp"
#include "pdpomdp/error.hpp"

namespace pdpomdp {

Kernel::Kernel(const Pomdp& m)
    : states_(m.num_states()), actions_(m.num_actions()), observations_(m.num_observations()) {
  if (states_ > kMaxSupportStates) {
    throw Error(ErrorKind::TooManyStates, "support analyses handle at most 64 states");
  }
  succ_.assign(states_ * actions_ * observations_, Support{});
  prob_.assign(states_ * actions_ * observations_, Rational(0));
  for (StateId q = 0; q < states_; ++q) {
    for (ActionId a = 0; a < actions_; ++a) {
      for (const auto& t : m.out(q, a)) {
        auto i = index(q, a, t.obs);
        succ_[i] = succ_[i].with(t.next);
        prob_[i] += t.prob;
      }
    }
  }
}

std::optional<StateId> Kernel::successor(StateId q, ActionId a, ObsId o) const {
  Support s = successors(q, a, o);
  if (s.empty()) return std::nullopt;
  return s.states().front();
}

Support Kernel::step(Support s, ActionId a, ObsId o) const {
  Support out;
  for (std::uint64_t b = s.bits(); b != 0; b &= b - 1) {
    auto q = static_cast<StateId>(std::countr_zero(b));
    out = out | successors(q, a, o);
  }
  return out;
}

Support Kernel::all_states() const {
  return Support(states_ == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << states_) - 1));
}

Support support_step(const Pomdp& m, Support s, ActionId a, ObsId o) {
  Support out;
  for (StateId q : s.states()) {
    for (const auto& t : m.out(q, a)) {
      if (t.obs == o) out = out.with(t.next);
    }
  }
  return out;
}

}  // namespace pdpomdp
