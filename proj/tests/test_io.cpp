#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "vsp/vsp.hpp"

using namespace vsp;

namespace {

Rational q(const char* s) { return parse_rational(s); }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("parse_config", "[io]") {
  SECTION("homogeneous scalars") {
    auto spec = parse_config(Json::parse(R"({"n": 5, "a": "7/20", "tau": 0.255})"));
    auto cfg = spec.build();
    auto h = cfg.homogeneous();
    REQUIRE(h);
    CHECK(h->a == q("0.35"));
    CHECK(h->tau == Rational(51, 200));
    CHECK(spec.arithmetic == Arithmetic::rational);
  }
  SECTION("per-agent vectors, weights, curve") {
    auto spec = parse_config(Json::parse(R"({
      "n": 3, "a": [0, 0.5, 1], "tau": [0.2, 0.3, 0.4],
      "g": [[0, 1, "1/2"], [1, 0, 1], ["1/2", 1, 0]],
      "f": {"kind": "poly", "exponent": 2},
      "initial_infected": [2], "arithmetic": "float"})"));
    auto cfg = spec.build();
    CHECK(cfg.weight(0, 2) == Rational(1, 2));
    CHECK(cfg.initial_infected == AgentSet::single(1));
    CHECK(cfg.curve.name() == "poly(2)");
    CHECK(spec.arithmetic == Arithmetic::floating);
    CHECK_FALSE(cfg.homogeneous());
  }
  SECTION("rejections") {
    CHECK_THROWS_AS(parse_config(Json::parse(R"({"n": 5, "a": 0, "tau": 0.3, "bogus": 1})")), ValidationError);
    CHECK_THROWS_AS(parse_config(Json::parse(R"({"n": 5, "a": 0})")).build(), ValidationError);
    CHECK_THROWS_AS(parse_config(Json::parse(R"({"n": 5, "a": [0, 1], "tau": 0.3})")).build(), ValidationError);
    CHECK_THROWS_AS(parse_config(Json::parse(R"({"n": 3, "a": 0, "tau": 0.3, "initial_infected": [4]})")).build(),
                    ValidationError);
    CHECK_THROWS_AS(parse_config(Json::parse(R"({"n": 3, "a": 0, "tau": 0.3, "f": "cubic"})")), ValidationError);
    CHECK_THROWS_AS(parse_config(Json::parse(R"({"n": 3, "a": 0, "tau": 1.3})")).build(), ValidationError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ValidationError);
  }
}

TEST_CASE("parse_grid", "[io]") {
  auto g = parse_grid(Json::parse(R"({"n": 5, "points": [{"a": 0, "tau": 0.3}, {"a": "1", "tau": "1/2", "horizon": 4}]})"), 10);
  REQUIRE(g.n);
  CHECK(*g.n == 5);
  REQUIRE(g.points.size() == 2);
  CHECK(g.points[0].horizon == 10);
  CHECK(g.points[1].horizon == 4);
  CHECK(g.points[1].tau == Rational(1, 2));
  auto bare = parse_grid(Json::parse(R"([])"), 10);
  CHECK(bare.points.empty());
  CHECK_THROWS_AS(parse_grid(Json::parse(R"({"n": 5})"), 10), ValidationError);
  CHECK_THROWS_AS(parse_grid(Json::parse(R"([{"a": 0}])"), 10), ValidationError);
}

TEST_CASE("size-law CSV", "[io]") {
  auto csv = size_law_csv({Rational(819593, 1953125), Rational(1, 5), Rational(0)}, 3);
  CHECK(csv == "kind,p1,p2,p3\ndecimal,0.420,0.200,0.000\nexact,819593/1953125,1/5,0\n");
}

TEST_CASE("trajectory renderings", "[io]") {
  auto cfg = homogeneous_config<Rational>(3, 0, q("0.4"));
  auto tr = run_dvsp(cfg, AgentSequence::explicit_list({1, 0}), 10);
  auto jl = lines(trajectory_jsonl(tr));
  REQUIRE(jl.size() == 4);
  auto first = Json::parse(jl.front());
  CHECK(first["type"] == "initial");
  auto second = Json::parse(jl[2]);
  CHECK(second["chosen"] == 1);
  CHECK(second["newly_infected"] == Json::array({2}));
  auto last = Json::parse(jl.back());
  CHECK(last["type"] == "summary");
  CHECK(last["final"]["infected"] == Json::array({1, 2}));
  CHECK(last["absorbed"] == false);

  auto empty = run_dvsp(cfg, AgentSequence::explicit_list({}), 10);
  CHECK(lines(trajectory_jsonl(empty)).size() == 2);

  auto csv = lines(trajectory_csv(tr));
  CHECK(csv.front() == "epoch,chosen,newly_infected,infected,actions");
  CHECK(csv.size() == 4);
}

TEST_CASE("JSON renderings are deterministic", "[io]") {
  auto cfg = homogeneous_config<Rational>(4, q("0.35"), q("0.3"));
  auto d = enumerate_exact(cfg, 4);
  CHECK(distribution_json(d, cfg, 3, true).dump() == distribution_json(enumerate_exact(cfg, 4, {1'000'000, 3}), cfg, 3, true).dump());
  auto j = distribution_json(d, cfg, 3, false);
  CHECK(j["total"] == "1");
  CHECK_FALSE(j.contains("states"));

  auto laws = limit_laws_json(limit_laws(5, q("0.35"), q("0.255")), 3);
  CHECK(laws["regime"] == "T5");
  CHECK(laws["size_law"]["exact"] == Json::array({"2/5", "0", "0", "6/125", "69/125"}));
  CHECK(laws["size_law"]["decimal"][3] == "0.048");
}

TEST_CASE("comparison CSV", "[io]") {
  auto rows = build_table({{q("0"), q("0.3"), 10}, {q("0.2"), q("0.15"), 10}}, 5);
  auto csv = lines(comparison_csv(rows, 3));
  REQUIRE(csv.size() == 3);
  CHECK(csv[0] == "a,tau,horizon,method,regime,theoretical,empirical,tv,chi2,p_value,error");
  CHECK(csv[1].find("\"(0.420,0.200,0.199,0.181,0.000)\"") != std::string::npos);
  CHECK(csv[2].find(",uncovered,uncovered,") != std::string::npos);
}
