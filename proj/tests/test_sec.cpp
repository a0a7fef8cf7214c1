#include "helpers.hpp"
#include "pdpomdp/error.hpp"
#include "pdpomdp/sec.hpp"

#include <doctest.h>

using namespace pdpomdp;
using testing::q;

namespace {

struct Gadget {
  testing::Corpus c = testing::load("scenario1");
  Kernel k{c.model()};
  ActionId a = c.action("a");
  Sec f1{{c.support({"q", "q1", "q2"}), {a}}};
  Sec f2{{c.support({"q", "q1"}), {a}}, {c.support({"q", "q2"}), {a}}};
  Sec f3{{c.support({"q1", "q2"}), {a}}};
  Sec f4{{c.support({"q", "q1"}), {a}}, {c.support({"q", "q2"}), {a}}, {c.support({"q1", "q2"}), {a}}};
};

}  // namespace

TEST_CASE("SEC axioms on the three-state gadget") {
  Gadget g;
  CHECK(is_sec(g.k, g.f1));
  CHECK(is_sec(g.k, g.f2));
  CHECK(is_sec(g.k, g.f3));
  auto v = check_sec(g.k, g.f4);
  REQUIRE(v.has_value());
  CHECK(v->axiom == Axiom::StrongConnectivity);
  CHECK(v->describe(g.c.model()).find("strong connectivity") != std::string::npos);

  Sec top{{Support::singleton(g.c.top()), {0, 1}}};
  CHECK(is_sec(g.k, top));

  Sec leaky{{g.c.support({"q1", "q2"}), {g.a, g.c.action("b")}}};
  auto closure = check_sec(g.k, leaky);
  REQUIRE(closure.has_value());
  CHECK(closure->axiom == Axiom::Closure);

  Sec empty_actions{{g.c.support({"q1", "q2"}), {}}};
  CHECK(check_sec(g.k, empty_actions)->axiom == Axiom::NonEmptiness);
  try {
    check_sec(g.k, Sec{});
    FAIL("expected EmptyDomain");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyDomain);
  }
}

TEST_CASE("sec_union") {
  Gadget g;
  try {
    sec_union(g.f2, g.f3);
    FAIL("expected DisjointDomains");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DisjointDomains);
  }
  CHECK(sec_union(g.f1, g.f1) == g.f1);
}

TEST_CASE("maximal SECs of the three-state gadget") {
  Gadget g;
  const Pomdp& m = g.c.model();
  SecReport r2 = maximal_sec_of(m, g.c.support({"q", "q1"}));
  CHECK(r2.sec == g.f2);
  CHECK(r2.distinguishing);
  CHECK_FALSE(r2.bottom);
  CHECK(maximal_sec_of(m, g.c.support({"q", "q1", "q2"})).sec == g.f1);
  SecReport r3 = maximal_sec_of(m, g.c.support({"q1", "q2"}));
  CHECK(r3.sec == g.f3);
  CHECK_FALSE(r3.distinguishing);

  SecReport top = maximal_sec_of(m, Support::singleton(g.c.top()));
  CHECK(top.trivial);
  CHECK(top.bottom);
  CHECK_FALSE(top.distinguishing);
}

TEST_CASE("a support that drains out of every cycle is in no SEC") {
  auto c = testing::parse(R"(pomdp drain
states: s goal dead
actions: a
observations: x y
init: s 1
target: goal
trans: s a -> x goal 1/2 ; y dead 1/2
trans: goal a -> x goal 1
trans: dead a -> y dead 1
)");
  Support s = Support::singleton(c.id("s"));
  try {
    maximal_sec_of(c.model(), s);
    FAIL("expected NotInAnySec");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotInAnySec);
  }
  // The only candidate with s in its domain.
  CHECK_FALSE(is_sec(Kernel(c.model()), Sec{{s, {0}}}));
}

TEST_CASE("indistinguishability partitions") {
  Gadget g;
  Partition p1 = indistinguishability_partition(g.k, g.f1, g.c.support({"q", "q1", "q2"}));
  REQUIRE(p1.blocks.size() == 2);
  CHECK(p1.blocks[0] == g.c.support({"q"}));
  CHECK(p1.blocks[1] == g.c.support({"q1", "q2"}));
  CHECK(indistinguishability_partition(g.k, g.f3, g.c.support({"q1", "q2"})).blocks.size() == 1);
  Sec single{{g.c.support({"q"}), {g.a}}};
  CHECK(indistinguishability_partition(g.k, single, g.c.support({"q"})).blocks.size() == 1);

  CHECK(is_distinguishing(g.k, g.f1));
  CHECK(is_distinguishing(g.k, g.f2));
  CHECK_FALSE(is_distinguishing(g.k, g.f3));
  CHECK(distinguishing_consistent(g.k, g.f2));
  CHECK_FALSE(is_distinguishing(g.k, Sec{{Support::singleton(g.c.top()), {0, 1}}}));
}

TEST_CASE("exit frontier of the swapping SEC") {
  Gadget g;
  const Pomdp& m = g.c.model();
  StateId q1 = g.c.id("q1"), q2 = g.c.id("q2");
  auto b = SubBelief::from_entries({{q1, q("1/3")}, {q2, q("2/3")}});
  auto reach = reachable_beliefs_inside(m, g.f3, b);
  REQUIRE(reach.size() == 2);
  CHECK(std::find(reach.begin(), reach.end(), SubBelief::from_entries({{q1, q("2/3")}, {q2, q("1/3")}})) !=
        reach.end());
  auto frontier = enumerate_exit_frontier(m, g.f3, b);
  REQUIRE(frontier.size() == 2);
  for (const auto& [c, a] : frontier) {
    CHECK(a == g.c.action("b"));
    CHECK(c.mass() == b.mass());
  }

  auto even = SubBelief::from_entries({{q1, q("1/2")}, {q2, q("1/2")}});
  CHECK(reachable_beliefs_inside(m, g.f3, even).size() == 1);

  Sec pair{{g.c.support({"q1"}), {g.a}}, {g.c.support({"q2"}), {g.a}}};
  auto dirac = reachable_beliefs_inside(m, pair, SubBelief::dirac(q1, q("1/2")));
  CHECK(dirac.size() <= pair.size());

  Sec top{{Support::singleton(g.c.top()), {0, 1}}};
  try {
    enumerate_exit_frontier(m, top, SubBelief::dirac(g.c.top()));
    FAIL("expected NoExit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoExit);
  }
}
