#include "helpers.hpp"
#include "pdpomdp/cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pdpomdp;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
  json doc() const { return json::parse(out); }
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("pdpomdp_cli_" + name)).string();
}

}  // namespace

TEST_CASE("check") {
  auto ok = invoke({"check", testing::model_path("scenario2")});
  CHECK(ok.code == kOk);
  CHECK(ok.doc() == json{{"posterior_deterministic", true}});
  auto bad = invoke({"check", testing::model_path("notpd")});
  CHECK(bad.code == kSemantic);
  CHECK(bad.doc()["witness"]["state"] == "s");
}

TEST_CASE("approx on the waiting gadget") {
  auto r = invoke({"approx", testing::model_path("g1"), "--epsilon", "1/20"});
  REQUIRE(r.code == kOk);
  json j = r.doc();
  CHECK(j["status"] == "converged");
  Rational width(j["width"]["exact"].get<std::string>());
  CHECK(width <= Rational(1, 20));
  CHECK_FALSE(j.contains("wall_time_ms"));
  CHECK(invoke({"approx", testing::model_path("g1"), "--epsilon", "1/20"}).out == r.out);
  CHECK(invoke({"approx", testing::model_path("g1"), "--epsilon", "1/20", "--timing"}).doc().contains("wall_time_ms"));
}

TEST_CASE("exit codes") {
  CHECK(invoke({"approx", testing::model_path("notpd"), "--epsilon", "1/10"}).code == kSemantic);
  CHECK(invoke({}).code == kUsage);
  CHECK(invoke({"approx", testing::model_path("g1")}).code == kUsage);
  CHECK(invoke({"approx", testing::model_path("g1"), "--epsilon", "-1"}).code == kUsage);
  CHECK(invoke({"frobnicate"}).code == kUsage);
  CHECK(invoke({"check", "/nonexistent/model.pdp"}).code == kUsage);

  std::string broken = temp_path("broken.pdp");
  std::ofstream(broken) << "pomdp x\nstates: a\nactions b\n";
  auto parse = invoke({"check", broken});
  CHECK(parse.code == kParse);
  CHECK(parse.doc()["line"] == 3);

  std::string sums = temp_path("sums.pdp");
  std::ofstream(sums) << "pomdp x\nstates: s\nactions: a\nobservations: o\ninit: s 1\ntarget: s\n"
                         "trans: s a -> o s 1/2\n";
  CHECK(invoke({"check", sums}).code == kSemantic);

  auto budget = invoke({"approx", testing::model_path("reveal"), "--epsilon", "1/1000", "--node-budget", "3"});
  CHECK(budget.code == kBudget);
  CHECK(budget.doc()["status"] == "budget_exceeded");
}

TEST_CASE("node budget from the environment") {
  ::setenv("PDPOMDP_NODE_BUDGET", "3", 1);
  auto r = invoke({"approx", testing::model_path("reveal"), "--epsilon", "1/1000"});
  ::unsetenv("PDPOMDP_NODE_BUDGET");
  CHECK(r.code == kBudget);
  CHECK(invoke({"approx", testing::model_path("reveal"), "--epsilon", "1/1000"}).code == kOk);
}

TEST_CASE("certified mode on the trivial model") {
  auto r = invoke({"approx", testing::model_path("trivial"), "--epsilon", "1/10", "--mode", "certified"});
  REQUIRE(r.code == kOk);
  json j = r.doc();
  CHECK(j["lower"]["exact"] == "1");
  CHECK(j["upper"]["exact"] == "1");
  CHECK(j.contains("certified_depth"));
}

TEST_CASE("info reports SECs and writes DOT") {
  std::string dot = temp_path("supports.dot");
  auto r = invoke({"info", testing::model_path("scenario1"), "--dot", dot});
  REQUIRE(r.code == kOk);
  json j = r.doc();
  CHECK(j["support_graph"]["full_lattice"] == true);
  CHECK(j["maximal_secs"].size() == 7);
  std::ifstream in(dot);
  std::stringstream text;
  text << in.rdbuf();
  for (const char* node : {"{q,q1}", "{q,q2}", "{q1,q2}", "{q,q1,q2}"}) {
    CHECK(text.str().find(std::string("\"") + node) != std::string::npos);
  }
  CHECK(text.str().find("peripheries=2") != std::string::npos);
}

TEST_CASE("decide, oracle, simulate") {
  auto d = invoke({"decide", testing::model_path("g1"), "--threshold", "9/10", "--epsilon", "1/20"});
  REQUIRE(d.code == kOk);
  CHECK(d.doc()["verdict"] == "CaseI");

  auto naive = invoke({"oracle", testing::model_path("g1"), "--which", "naive", "--horizon", "2"});
  REQUIRE(naive.code == kOk);
  CHECK(naive.doc()["value"]["exact"] == "3/4");
  auto exact = invoke({"oracle", testing::model_path("scenario1")});
  REQUIRE(exact.code == kOk);
  CHECK(exact.doc()["value"].get<double>() == doctest::Approx(0.5));
  CHECK(invoke({"oracle", testing::model_path("learn"), "--cap", "100"}).code == kBudget);

  auto sim = invoke({"simulate", testing::model_path("g1"), "--strategy", "wait:10:a:b:o2=c", "--runs", "2000",
                     "--horizon", "30", "--seed", "5"});
  REQUIRE(sim.code == kOk);
  CHECK(sim.doc()["estimate"].get<double>() > 0.98);
  CHECK(invoke({"simulate", testing::model_path("g1"), "--strategy", "wait:10:a:b:o2=c", "--runs", "2000",
                "--horizon", "30", "--seed", "5"})
            .out == sim.out);

  std::string strat = temp_path("commit.strat");
  std::ofstream(strat) << "memory: m\nstart: m\nchoose: m b 1\n";
  auto file = invoke({"simulate", testing::model_path("scenario1"), "--strategy", strat, "--runs", "1000"});
  REQUIRE(file.code == kOk);
  CHECK(file.doc()["estimate"].get<double>() == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("normalize and gen write model files") {
  std::string out = temp_path("norm.pdp");
  auto n = invoke({"normalize", testing::model_path("notpd"), "-o", out});
  REQUIRE(n.code == kOk);
  CHECK(n.doc()["merged_into_bot"] == json::array({"u"}));
  ModelFile back = load_model(out);
  CHECK(back.model.find_state("TOP").has_value());

  std::string gen = temp_path("gen.pdp");
  auto g = invoke({"gen", "--states", "4", "--actions", "2", "--obs", "2", "--seed", "3", "-o", gen});
  REQUIRE(g.code == kOk);
  CHECK(invoke({"check", gen}).code == kOk);
  std::string gen2 = temp_path("gen2.pdp");
  invoke({"gen", "--states", "4", "--actions", "2", "--obs", "2", "--seed", "3", "-o", gen2});
  std::ifstream a(gen), b(gen2);
  std::stringstream ta, tb;
  ta << a.rdbuf();
  tb << b.rdbuf();
  CHECK(ta.str() == tb.str());
  CHECK(invoke({"gen", "--states", "4", "--actions", "2", "--obs", "2", "--seed", "3", "--mdp", "-o", gen}).code ==
        kOk);
}

TEST_CASE("tree DOT export") {
  std::string dot = temp_path("tree.dot");
  auto r = invoke({"approx", testing::model_path("g2"), "--epsilon", "1/10", "--tree-dot", dot, "--tree-depth", "0"});
  REQUIRE(r.code == kOk);
  std::ifstream in(dot);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str().find("x0") != std::string::npos);
  CHECK(text.str().find("x1") == std::string::npos);
}
