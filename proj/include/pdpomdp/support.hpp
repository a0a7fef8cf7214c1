#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace pdpomdp {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;
using ObsId = std::uint32_t;

/// Support analyses run on at most this many states.
inline constexpr std::size_t kMaxSupportStates = 64;

/// A belief support: a set of states stored as a bitmask.
class Support {
 public:
  constexpr Support() = default;
  constexpr explicit Support(std::uint64_t bits) : bits_(bits) {}

  static Support of(std::initializer_list<StateId> states) {
    Support s;
    for (StateId q : states) s = s.with(q);
    return s;
  }
  static Support of(const std::vector<StateId>& states) {
    Support s;
    for (StateId q : states) s = s.with(q);
    return s;
  }
  static constexpr Support singleton(StateId q) { return Support(std::uint64_t{1} << q); }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr bool contains(StateId q) const { return (bits_ >> q) & 1u; }
  constexpr Support with(StateId q) const { return Support(bits_ | (std::uint64_t{1} << q)); }
  constexpr Support operator|(Support o) const { return Support(bits_ | o.bits_); }
  constexpr Support operator&(Support o) const { return Support(bits_ & o.bits_); }
  constexpr bool subset_of(Support o) const { return (bits_ & ~o.bits_) == 0; }

  std::vector<StateId> states() const {
    std::vector<StateId> out;
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
      out.push_back(static_cast<StateId>(std::countr_zero(b)));
    }
    return out;
  }

  friend constexpr bool operator==(Support, Support) = default;
  friend constexpr auto operator<=>(Support a, Support b) { return a.bits_ <=> b.bits_; }

 private:
  std::uint64_t bits_ = 0;
};

/// Renders as "{q1,q2}" using the given state names, in state order.
std::string format_support(Support s, const std::vector<std::string>& names);

}  // namespace pdpomdp
