#include "helpers.hpp"
#include "pdpomdp/error.hpp"

#include <doctest.h>

using namespace pdpomdp;
using testing::q;

TEST_CASE("SubBelief construction") {
  auto b = SubBelief::from_entries({{2, q("1/4")}, {0, q("1/2")}});
  CHECK(b.mass() == q("3/4"));
  CHECK(b.entries().front().first == 0);
  CHECK(b.support() == Support::of({0, 2}));
  CHECK(b.min_entry() == q("1/4"));
  CHECK(b.at(1) == 0);
  CHECK(b.key() == "0:1/2,2:1/4");
  CHECK_THROWS_AS(SubBelief::from_entries({{0, q("1/2")}, {0, q("1/4")}}), Error);
  CHECK_THROWS_AS(SubBelief::from_entries({{0, q("0")}}), Error);
  CHECK_THROWS_AS(SubBelief::from_entries({{0, q("3/4")}, {1, q("1/2")}}), Error);
}

TEST_CASE("belief update on the waiting gadget keeps mass") {
  auto c = testing::load("g1");
  const Pomdp& m = c.model();
  auto b = SubBelief::from_entries({{c.id("q1"), q("1/2")}, {c.id("q2"), q("1/2")}});
  ActionId a = c.action("a");
  CHECK(obs_probability(m, b, a, c.obs("o1")) == q("3/4"));
  CHECK(obs_probability(m, b, a, c.obs("o2")) == q("1/4"));
  auto b1 = belief_update(m, b, a, c.obs("o1"));
  CHECK(b1 == SubBelief::from_entries({{c.id("q1"), q("2/3")}, {c.id("q2"), q("1/3")}}));
  auto b2 = belief_update(m, b, a, c.obs("o2"));
  CHECK(b2 == SubBelief::dirac(c.id("q4")));

  auto half = b.scaled(q("1/2"));
  CHECK(belief_update(m, half, a, c.obs("o1")).mass() == q("1/2"));
  CHECK(obs_probability(m, half, a, c.obs("o1")) == q("3/4"));
  try {
    belief_update(m, b, a, c.obs("win"));
    FAIL("expected ZeroObservationProbability");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroObservationProbability);
  }
}

TEST_CASE("cut and restrict") {
  auto b = SubBelief::from_entries({{0, q("199/200")}, {1, q("1/200")}});
  CHECK(cut(b, q("1/100")) == SubBelief::from_entries({{0, q("199/200")}}));
  CHECK(cut(b, q("1/200")) == b);
  try {
    cut(b, 1);
    FAIL("expected EmptyResult");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyResult);
  }
  CHECK(restrict(b, Support::of({1, 5})) == SubBelief::from_entries({{1, q("1/200")}}));
  CHECK(restrict(b, Support::of({5})).empty());
}
