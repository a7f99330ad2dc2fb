#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qrouter/analytics.hpp"
#include "qrouter/harness.hpp"

using namespace qrouter;
using namespace qrouter::harness;

namespace {

auth::SessionConfig config(const std::string& strategy, std::size_t n, std::size_t d, double q = 1.0) {
  auth::SessionConfig c;
  c.n = n;
  c.d = d;
  c.adversary = parse_strategy(strategy, q);
  return c;
}

const Estimate& find(const Report& r, const std::string& name) {
  for (const auto& e : r.estimates)
    if (e.name == name) return e;
  throw std::runtime_error("missing estimate " + name);
}

}  // namespace

TEST_CASE("binomial band") {
  CHECK(within_binomial_band(500, 1000, 0.5, 5.0));
  CHECK_FALSE(within_binomial_band(600, 1000, 0.5, 5.0));
  CHECK(within_binomial_band(0, 1000, 0.0, 5.0));
  CHECK_FALSE(within_binomial_band(1, 1000, 0.0, 5.0));
  CHECK(within_binomial_band(1000, 1000, 1.0, 5.0));
  CHECK_FALSE(within_binomial_band(0, 0, 0.5, 5.0));
}

TEST_CASE("campaign totals are independent of the thread count") {
  const auto base = config("blind", 6, 3);
  const auto one = run_campaign(base, 3 * kBlockSize + 17, 555, 1);
  const auto four = run_campaign(base, 3 * kBlockSize + 17, 555, 4);
  CHECK(one.sessions == 3 * kBlockSize + 17);
  CHECK(one.undetected_sessions == four.undetected_sessions);
  CHECK(one.failed_rounds == four.failed_rounds);
  CHECK(one.attacked_decoy_rounds == four.attacked_decoy_rounds);
  CHECK(one.delivered_fidelity_sum == four.delivered_fidelity_sum);
  const auto replay = run_campaign(base, 3 * kBlockSize + 17, 555, 2);
  CHECK(replay.delivered_fidelity_sq_sum == one.delivered_fidelity_sq_sum);
  const auto other = run_campaign(base, 3 * kBlockSize + 17, 556, 1);
  CHECK(other.failed_rounds != one.failed_rounds);
}

TEST_CASE("campaign replay matches individual sessions") {
  const auto base = config("informed", 4, 2);
  const auto totals = run_campaign(base, 50, 31, 1);
  std::uint64_t undetected = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    auto c = base;
    c.seed = derive_seed(31, i);
    undetected += !auth::run_session(c).detected;
  }
  CHECK(undetected == totals.undetected_sessions);
}

TEST_CASE("campaign propagates configuration errors") {
  auto c = config("blind", 3, 0);
  c.tau = 2.0;
  CHECK_THROWS_AS(run_campaign(c, 10, 1, 2), std::invalid_argument);
}

TEST_CASE("blind forgery with all qubits attacked follows the per-round physics") {
  // Per attacked message round the key check fails with 1/4. An attacked decoy
  // round passes with 1/2 (see test_auth), so an attack-all session at (n, d)
  // goes unnoticed with (3/4)^n (1/2)^d.
  const auto t = run_campaign(config("blind", 4, 4), 200000, 4242, 1);
  CHECK(within_binomial_band(t.failed_attacked_message_rounds, t.attacked_message_rounds, 0.25, 5.0));
  CHECK(within_binomial_band(t.failed_attacked_decoy_rounds, t.attacked_decoy_rounds, 0.5, 5.0));
  CHECK(within_binomial_band(t.undetected_sessions, t.sessions, std::pow(0.75, 4) * std::pow(0.5, 4), 5.0));

  // n = 10, d = 10: the physical rate is (3/4)^10 (1/2)^10, about 5.5e-5.
  const auto big = run_campaign(config("blind", 10, 10), 100000, 77, 1);
  CHECK(within_binomial_band(big.undetected_sessions, big.sessions,
                             std::pow(0.75, 10) * std::pow(0.5, 10), 5.0));
}

TEST_CASE("fidelity of sessions conditional on the number of replaced message qubits") {
  // The convention-aware forger replaces message qubits exactly; a replaced
  // qubit has Haar-average fidelity 1/2 and an untouched one has fidelity 1.
  constexpr unsigned n = 10;
  auto c = config("blind-oracle", n, 0, 0.3);
  double sum = 0.0;
  std::size_t sessions = 0;
  for (std::uint64_t i = 0; i < 40000; ++i) {
    c.seed = derive_seed(8080, i);
    const auto result = auth::run_session(c);
    if (result.action_counts[static_cast<std::size_t>(auth::EveAction::BlindForge)] != 2) continue;
    sum += *result.delivered_fidelity;
    ++sessions;
  }
  REQUIRE(sessions > 5000);
  CHECK(sum / sessions == doctest::Approx(analytics::fidelity_cond(2, 0, n)).epsilon(0.01));
}

TEST_CASE("informed forger over many sessions") {
  const auto t = run_campaign(config("informed", 20, 0), 20000, 99, 1);
  CHECK(within_binomial_band(t.undetected_sessions, t.sessions, analytics::p_c_informed(20), 5.0));
  CHECK(within_binomial_band(t.failed_attacked_message_rounds, t.attacked_message_rounds, 0.125, 5.0));
  CHECK(within_binomial_band(t.discarded_attacked_message_rounds, t.attacked_message_rounds, 0.25, 5.0));
}

TEST_CASE("channel trials") {
  const auto c = run_channel_trials(0.5, 100000, 5);
  CHECK(within_binomial_band(c.routed_survived, c.trials, 0.25, 5.0));
  CHECK(within_binomial_band(c.pair_survived, c.trials, 0.0625, 5.0));
  const auto clear = run_channel_trials(1.0, 1000, 5);
  CHECK(clear.routed_survived == 1000);
  CHECK(clear.pair_survived == 1000);
}

TEST_CASE("parse_strategy") {
  CHECK(parse_strategy("none").is_none());
  CHECK(parse_strategy("pauli-z", 0.5).attack_probability == 0.5);
  CHECK(parse_strategy("blind-oracle").name() == "blind-oracle");
  CHECK_THROWS_AS(parse_strategy("loud"), std::invalid_argument);
}

TEST_CASE("analyze") {
  const auto r10 = cmd_analyze({10, 0, "blind", {}});
  CHECK(r10.analytic.front().name == "p_c_blind");
  CHECK(r10.analytic.front().value == doctest::Approx(0.0563).epsilon(1e-3));
  const auto r20 = cmd_analyze({20, 0, "blind", {}});
  CHECK(r20.analytic.front().value == doctest::Approx(0.00317).epsilon(1e-3));
  CHECK_THROWS_AS(cmd_analyze({0, 0, "blind", {}}), std::invalid_argument);
  const auto with_tau = cmd_analyze({3, 1, "informed", 0.5});
  const auto j = with_tau.to_json();
  bool found = false;
  for (const auto& a : j["analytic"])
    if (a["name"] == "channel_success_separate") found = a["value"] == 0.0625;
  CHECK(found);
}

TEST_CASE("simulate") {
  SUBCASE("blind n=10") {
    SimulateOptions o;
    o.n = 10;
    o.trials = 100000;
    o.seed = 3;
    const auto r = cmd_simulate(o);
    const auto& u = find(r, "undetected_session_rate");
    CHECK(std::abs(u.value - 0.0563135) <= 3.0 * u.std_error);
    CHECK(r.pass);
  }
  SUBCASE("pauli-z n=1") {
    SimulateOptions o;
    o.n = 1;
    o.strategy = "pauli-z";
    o.trials = 100000;
    const auto r = cmd_simulate(o);
    const auto& det = find(r, "detected_session_rate");
    CHECK(std::abs(det.value - 0.5) <= 3.0 * det.std_error);
    CHECK(r.pass);
  }
  SUBCASE("honest run") {
    SimulateOptions o;
    o.n = 8;
    o.d = 2;
    o.strategy = "none";
    o.trials = 2000;
    const auto r = cmd_simulate(o);
    CHECK(find(r, "detected_session_rate").value == 0.0);
    CHECK(find(r, "delivered_fidelity").value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.pass);
  }
  SUBCASE("lossy honest run") {
    SimulateOptions o;
    o.n = 4;
    o.tau = 0.5;
    o.strategy = "none";
    o.trials = 20000;
    const auto r = cmd_simulate(o);
    CHECK(find(r, "survival_rate").analytic == 0.25);
    CHECK(r.pass);
  }
  SUBCASE("invalid options") {
    SimulateOptions o;
    o.trials = 0;
    CHECK_THROWS_AS(cmd_simulate(o), std::invalid_argument);
    o.trials = 10;
    o.n = 0;
    CHECK_THROWS_AS(cmd_simulate(o), std::invalid_argument);
    o.n = 3;
    o.strategy = "nope";
    CHECK_THROWS_AS(cmd_simulate(o), std::invalid_argument);
  }
  SUBCASE("same seed, same report") {
    SimulateOptions o;
    o.n = 5;
    o.d = 3;
    o.trials = 5000;
    o.seed = 12;
    auto a = cmd_simulate(o);
    o.threads = 3;
    auto b = cmd_simulate(o);
    a.details.erase("threads");
    b.details.erase("threads");
    CHECK(a.to_json().dump() == b.to_json().dump());
  }
}

TEST_CASE("report serialization") {
  Report r;
  r.command = "simulate";
  r.seed = 9;
  r.add_rate("x", 25, 100, 0.25);
  r.add_rate("y", 3, 10, std::nullopt);
  r.add_analytic("z", 0.5);
  const auto j = r.to_json();
  CHECK(j["command"] == "simulate");
  CHECK(j["seed"] == 9);
  CHECK(j["pass"] == true);
  CHECK(j["estimates"][0]["std_error"].get<double>() == doctest::Approx(std::sqrt(0.25 * 0.75 / 100)));
  CHECK(j["estimates"][1]["pass"].is_null());
  CHECK(r.to_csv() ==
        "kind,name,value,std_error,samples,analytic,pass\n"
        "estimate,x,0.25,0.04330127018922193,100,0.25,true\n"
        "estimate,y,0.3,0.14491376746189438,10,,\n"
        "analytic,z,0.5,,,,\n");
  r.add_rate("w", 90, 100, 0.25);
  CHECK_FALSE(r.pass);
}

TEST_CASE("sweep output is byte-identical across runs") {
  std::ostringstream a, b;
  cmd_sweep({}, a);
  cmd_sweep({}, b);
  CHECK(a.str() == b.str());
  std::size_t lines = 0;
  for (char ch : a.str()) lines += ch == '\n';
  CHECK(lines == 421);
}

TEST_CASE("two-qubit state parsing") {
  const auto phi = parse_two_qubit_state("phi+");
  CHECK(std::abs(phi[0] - kInvSqrt2) < 1e-15);
  CHECK(parse_two_qubit_state("10")[2] == Amplitude(1.0));
  const auto parsed = parse_two_qubit_state("1, i, -1, 1-1e-1i");
  CHECK(parsed.is_normalized(1e-12));
  const double scale = std::sqrt(4.01);
  CHECK(std::abs(parsed[1] - Amplitude(0.0, 1.0 / scale)) < 1e-15);
  CHECK(std::abs(parsed[3] - Amplitude(1.0, -0.1) / scale) < 1e-15);
  CHECK(std::abs(parse_two_qubit_state("0,0,-2.5e-1i,0")[2] - Amplitude(0.0, -1.0)) < 1e-15);
  CHECK_THROWS_AS(parse_two_qubit_state("0,0,0,0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_two_qubit_state("1,2,3"), std::invalid_argument);
  CHECK_THROWS(parse_two_qubit_state("1,x,0,0"));
}

TEST_CASE("filter parsing") {
  const auto f = parse_filter("1,0,0.5,3.14,0,0,1,-1");
  CHECK(f.tau[1] == 0.5);
  CHECK(f.phi[3] == -1.0);
  CHECK_THROWS_AS(parse_filter("1,0,1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_filter("2,0,1,0,1,0,1,0"), std::invalid_argument);
}

TEST_CASE("bell demo") {
  SUBCASE("Phi+ is always PhiPlus") {
    const auto r = cmd_bell_demo({"phi+", {}, 10000, 4, 5.0});
    CHECK(find(r, "p_PhiPlus").value == 1.0);
    CHECK(r.pass);
  }
  SUBCASE("|00> splits between Phi- and Phi+") {
    const auto r = cmd_bell_demo({"00", {}, 100000, 4, 5.0});
    CHECK(find(r, "p_PhiMinus").analytic == doctest::Approx(0.5));
    CHECK(find(r, "p_PhiPlus").analytic == doctest::Approx(0.5));
    CHECK(r.pass);
  }
  SUBCASE("projective filter") {
    const auto r = cmd_bell_demo({"0.6,0.8,0,0", std::string("1,0,0,0,0,0,0,0"), 1000, 4, 5.0});
    const auto& m = r.details["manipulation"];
    CHECK(m["success_probability"].get<double>() == doctest::Approx(0.18));
    CHECK(m["optical_pipeline_max_deviation"].get<double>() < 1e-12);
    CHECK(m["normalized_bell"][0][0].get<double>() == doctest::Approx(1.0));
  }
}
