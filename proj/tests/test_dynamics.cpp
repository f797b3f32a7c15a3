#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "vsp/vsp.hpp"

using namespace vsp;

namespace {

Rational q(const char* s) { return parse_rational(s); }

AgentSequence seq1(std::initializer_list<int> one_based) {
  std::vector<int> v;
  for (int i : one_based) v.push_back(i - 1);
  return AgentSequence::explicit_list(v);
}

}  // namespace

TEST_CASE("Philox4x32-10 known answers", "[rng]") {
  using P = Philox4x32;
  CHECK(P::block({0, 0, 0, 0}, {0, 0}) == P::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(P::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        P::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(P::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        P::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("uniform_agent is deterministic and roughly uniform", "[rng]") {
  CHECK(uniform_agent(42, 3, 17, 5) == uniform_agent(42, 3, 17, 5));
  std::vector<long> counts(7, 0);
  const long draws = 70000;
  for (long t = 0; t < draws; ++t) ++counts[static_cast<std::size_t>(uniform_agent(9, 0, static_cast<std::uint64_t>(t), 7))];
  // Each count is Binomial(70000, 1/7); 5 sigma is about 463.
  for (long c : counts) CHECK(std::abs(c - draws / 7) < 463);
}

TEST_CASE("run_dvsp on explicit sequences", "[dynamics]") {
  SECTION("agent 1 first keeps the others safe") {
    auto cfg = homogeneous_config<Rational>(5, 0, q("0.3"));
    auto tr = run_dvsp(cfg, seq1({1, 2, 3, 4, 5, 2, 3, 4, 5, 2, 3, 4, 5}), 100);
    REQUIRE(tr.n1);
    CHECK(tr.n1->empty());
    REQUIRE(tr.settled());
    CHECK(tr.final_state.infected == AgentSet::single(0));
  }
  SECTION("hand-executed n = 3 trajectory converges to (1,1,2/5)") {
    auto cfg = homogeneous_config<Rational>(3, 0, q("0.4"));
    auto tr = run_dvsp(cfg, seq1({2, 1, 2, 3}), 10);
    CHECK(tr.absorbed);
    CHECK(tr.absorbed_at == 4);
    CHECK(tr.final_state.infected == (AgentSet::single(0) | AgentSet::single(1)));
    CHECK(tr.final_state.actions == std::vector<Rational>{1, 1, Rational(2, 5)});
    REQUIRE(tr.limit);
    CHECK(*tr.limit == tr.final_state);
    REQUIRE(tr.n1);
    CHECK(*tr.n1 == AgentSet::single(1));
  }
  SECTION("a = 1 with tau >= 1/(n-1): absorbed after agent 1's move") {
    auto cfg = homogeneous_config<Rational>(5, 1, q("0.5"));
    auto tr = run_dvsp(cfg, seq1({1, 1, 1}), 10);
    CHECK(tr.absorbed);
    CHECK(tr.absorbed_at == 1);
    CHECK(tr.final_state == initial_state(cfg));
  }
  SECTION("empty sequence leaves S0") {
    auto cfg = homogeneous_config<Rational>(3, 0, q("0.4"));
    auto tr = run_dvsp(cfg, AgentSequence::explicit_list({}), 10);
    CHECK(tr.epochs == 0);
    CHECK(tr.records.empty());
    CHECK(tr.final_state == initial_state(cfg));
  }
  SECTION("out-of-range agents are rejected") {
    auto cfg = homogeneous_config<Rational>(3, 0, q("0.4"));
    CHECK_THROWS_AS(run_dvsp(cfg, AgentSequence::explicit_list({0, 3}), 10), ValidationError);
  }
  SECTION("records chain") {
    auto cfg = homogeneous_config<Rational>(5, q("0.35"), q("0.255"));
    auto tr = run_dvsp(cfg, AgentSequence::seeded(3, 1), 50, {StopRule::absorbed, true, false});
    State<Rational> s = tr.initial;
    for (const auto& r : tr.records) {
      CHECK(r.next == step_state(s, r.chosen, cfg));
      s = r.next;
    }
    CHECK(s == tr.final_state);
  }
}

TEST_CASE("is_settled", "[dynamics]") {
  auto cfg = homogeneous_config<Rational>(5, 0, q("0.3"));
  CHECK(is_settled(State<Rational>{AgentSet::first_n(5), std::vector<Rational>(5, Rational(1))}, cfg));
  CHECK(is_settled(State<Rational>{AgentSet::single(0), std::vector<Rational>(5, Rational(1))}, cfg));
  auto cfg4 = homogeneous_config<Rational>(5, 0, q("0.4"));
  CHECK_FALSE(is_settled(State<Rational>{AgentSet::single(0), {1, 1, 0, 0, 0}}, cfg4));
  CHECK_FALSE(is_settled(State<Rational>{AgentSet::single(0), {0, 0, 0, 0, 0}}, cfg4));
}

TEST_CASE("settled-state limit matches a long run", "[dynamics]") {
  for (const char* a : {"0", "0.35", "0.6"}) {
    for (const char* t : {"0.26", "0.3", "0.4"}) {
      auto cfg = homogeneous_config<Rational>(5, q(a), q(t));
      for (std::uint64_t stream = 0; stream < 20; ++stream) {
        auto quick = run_svsp_sample(cfg, 77, stream, 2000);
        auto full = run_dvsp(cfg, AgentSequence::seeded(77, stream), 2000, {StopRule::absorbed, false, false});
        REQUIRE(quick.settled());
        CHECK(quick.final_state.infected == full.final_state.infected);
        if (full.absorbed) {
          REQUIRE(quick.limit);
          CHECK(quick.limit->infected == full.final_state.infected);
          // Away from absorption the actions only approach the limit; at
          // absorption they agree exactly.
          CHECK(quick.limit->actions == full.final_state.actions);
        }
      }
    }
  }
}

TEST_CASE("SVSP samples", "[dynamics]") {
  SECTION("same seed and stream reproduce the trajectory") {
    auto cfg = homogeneous_config<Rational>(5, q("0.35"), q("0.255"));
    auto a = run_svsp_sample(cfg, 5, 9, 320);
    auto b = run_svsp_sample(cfg, 5, 9, 320);
    CHECK(a.final_state == b.final_state);
    CHECK(a.epochs == b.epochs);
  }
  SECTION("a = 1, tau = 0.5 always ends at {1}") {
    auto cfg = homogeneous_config<Rational>(5, 1, q("0.5"));
    for (std::uint64_t s = 0; s < 200; ++s) {
      auto tr = run_svsp_sample(cfg, 1, s, 320);
      REQUIRE(tr.settled());
      CHECK(tr.final_state.infected == AgentSet::single(0));
    }
  }
  SECTION("a = 0.2, tau = 0.05 ends with 4 or 5 infected") {
    auto cfg = homogeneous_config<Rational>(5, q("0.2"), q("0.05"));
    for (std::uint64_t s = 0; s < 200; ++s) {
      auto tr = run_svsp_sample(cfg, 2, s, 320);
      REQUIRE(tr.settled());
      const int m = tr.final_state.infected.size();
      CHECK((m == 4 || m == 5));
    }
  }
}

TEST_CASE("monte_carlo", "[dynamics]") {
  SECTION("one sample is a point mass") {
    auto cfg = homogeneous_config<Rational>(5, 0, q("0.3"));
    auto law = monte_carlo(cfg, 1, 4, 320);
    auto tr = run_svsp_sample(cfg, 4, 0, 320);
    CHECK(law.samples == 1);
    auto p = law.infected_size_probs_exact();
    for (int m = 1; m <= 5; ++m) CHECK(p[static_cast<std::size_t>(m - 1)] == (m == tr.final_state.infected.size() ? 1 : 0));
  }
  SECTION("thread count does not change the result") {
    auto cfg = homogeneous_config<Rational>(5, q("0.35"), q("0.255"));
    auto one = monte_carlo(cfg, 3000, 8, 320, {1, 0});
    auto four = monte_carlo(cfg, 3000, 8, 320, {4, 0});
    CHECK(one.infected_size_counts == four.infected_size_counts);
    CHECK(one.infected_set_counts == four.infected_set_counts);
    CHECK(one.first_hits.counts == four.first_hits.counts);
  }
  SECTION("a = 0, tau = 0.12: size law within TV 0.01 of uniform") {
    auto cfg = homogeneous_config<Rational>(5, 0, q("0.12"));
    auto law = monte_carlo(cfg, 100000, 2024, 320, {4, 0});
    CHECK(law.unsettled == 0);
    auto p = law.infected_size_probs();
    CHECK(tv_distance(p, std::vector<double>(5, 0.2)) <= 0.01);
  }
}

TEST_CASE("monte_carlo: P(|I| = 4) at a = 0.35, tau = 0.255", "[dynamics][table-values]") {
  // The closed form gives 6/125 = 0.048.
  auto cfg = homogeneous_config<Rational>(5, q("0.35"), q("0.255"));
  auto law = monte_carlo(cfg, 100000, 2024, 320, {4, 0});
  CHECK(law.unsettled == 0);
  CHECK(std::abs(law.infected_size_probs()[3] - 0.048) <= 0.003);
}

TEST_CASE("first-hit statistics", "[dynamics]") {
  SECTION("agent 1 first gives |N1| = 0") {
    auto cfg = homogeneous_config<Rational>(4, 0, q("0.4"));
    auto tr = run_dvsp(cfg, seq1({1, 2, 3}), 10);
    REQUIRE(tr.n1);
    CHECK(tr.n1->size() == 0);
  }
  SECTION("n = 2: |N1| uniform on {0,1}") {
    auto cfg = homogeneous_config<Rational>(2, 0, q("0.4"));
    std::vector<Trajectory<Rational>> runs;
    for (std::uint64_t s = 0; s < 20000; ++s) runs.push_back(run_svsp_sample(cfg, 6, s, 128, {StopRule::settled, false, true}));
    auto st = first_hit_stats(runs, 2);
    CHECK(st.missing == 0);
    for (double f : st.frequencies()) CHECK(std::abs(f - 0.5) <= 3 * std::sqrt(0.25 / 20000));
  }
  SECTION("n = 5: |N1| uniform on {0,...,4}") {
    auto cfg = homogeneous_config<Rational>(5, 0, q("0.12"));
    auto law = monte_carlo(cfg, 100000, 31, 320, {4, 0});
    CHECK(law.first_hits.missing == 0);
    for (double f : law.first_hits.frequencies()) CHECK(std::abs(f - 0.2) <= 3 * std::sqrt(0.2 * 0.8 / 100000));
  }
}

TEST_CASE("action profile classification", "[dynamics]") {
  const Rational tau = q("0.4");
  auto ones = classify_action_profile(std::vector<Rational>(3, Rational(1)), AgentSet::first_n(3), 3, tau);
  REQUIRE(ones);
  CHECK(*ones == ActionProfileClass::ones());

  auto a2 = classify_action_profile(std::vector<Rational>{1, 1, Rational(2, 5)}, AgentSet::first_n(2), 3, tau);
  REQUIRE(a2);
  CHECK_FALSE(a2->all_ones);
  CHECK(a2->m == 2);
  CHECK(a2->off_value == Rational(2, 5));

  // n = 4, tau = 0.2: A_1 has off value 0.2 / (1.2 - 0.6) = 1/3.
  auto bad = classify_action_profile(std::vector<Rational>{1, q("0.3"), q("0.31"), q("0.3")}, AgentSet::single(0), 4,
                                     q("0.2"));
  CHECK_FALSE(bad);

  auto approx = classify_action_profile(std::vector<double>{1, 1, 0.4 + 1e-13}, AgentSet::first_n(2), 3, 0.4, 1e-9);
  REQUIRE(approx);
  CHECK(approx->m == 2);
}

TEST_CASE("common action limit", "[dynamics]") {
  CHECK(common_action_limit<Rational>(2, 3, q("0.4")) == Rational(2, 5));
  CHECK(common_action_limit<Rational>(4, 5, q("0.2")) == q("0.2"));
  CHECK(common_action_limit<Rational>(1, 5, q("0.3")) == 1);
  CHECK(common_action_limit<double>(2, 3, 0.4) == Catch::Approx(0.4));
}
