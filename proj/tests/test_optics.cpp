#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "qrouter/auth.hpp"
#include "qrouter/optics.hpp"
#include "test_support.hpp"

using namespace qrouter;
using namespace qrouter::optics;
using qrouter::testing::max_abs_diff;
using qrouter::testing::random_state;

namespace {

const Amplitude I{0.0, 1.0};

DualRailState modes(Amplitude h1, Amplitude v1, Amplitude h2, Amplitude v2) {
  return DualRailState({h1, v1, h2, v2});
}

}  // namespace

TEST_CASE("route") {
  Rng rng(21);
  SUBCASE("control |H> keeps the signal in rail 1") {
    const auto s = random_state<PolarizationQubit>(rng);
    const auto out = route(s, polarization::H());
    CHECK(max_abs_diff(out, modes(s[0], s[1], 0.0, 0.0)) < 1e-15);
  }
  SUBCASE("|H> controlled by |+>") {
    const auto out = route(polarization::H(), polarization::diagonal());
    CHECK(max_abs_diff(out, modes(kInvSqrt2, 0.0, kInvSqrt2, 0.0)) < 1e-15);
  }
  SUBCASE("general message with each key state") {
    const auto m = random_state<PolarizationQubit>(rng);
    const Amplitude a = m[0], b = m[1];
    for (int r = 0; r < 2; ++r) {
      for (int sign : {+1, -1}) {
        const Amplitude phase = double(sign) * (r == 0 ? Amplitude(1.0) : I);
        const auto key = make_qubit(kInvSqrt2, phase * kInvSqrt2);
        const auto expected =
            Amplitude(kInvSqrt2) * modes(a, b, phase * a, phase * b);
        CHECK(max_abs_diff(route(m, key), expected) < 1e-15);
      }
    }
  }
  SUBCASE("unnormalized inputs are rejected") {
    CHECK_THROWS_AS(route(make_qubit(1.0, 1.0), polarization::H()), std::invalid_argument);
    CHECK_THROWS_AS(route(polarization::H(), make_qubit(0.0, 0.0)), std::invalid_argument);
  }
}

TEST_CASE("route_joint and decouple") {
  const TwoQubitState phi_plus({kInvSqrt2, 0.0, 0.0, kInvSqrt2});
  const TwoQubitState psi_minus({0.0, kInvSqrt2, -kInvSqrt2, 0.0});
  CHECK(max_abs_diff(route_joint(phi_plus), modes(kInvSqrt2, 0.0, 0.0, kInvSqrt2)) < 1e-15);
  CHECK(max_abs_diff(route_joint(psi_minus), modes(0.0, -kInvSqrt2, kInvSqrt2, 0.0)) < 1e-15);
  CHECK(max_abs_diff(decouple(modes(kInvSqrt2, 0.0, 0.0, kInvSqrt2)), phi_plus) < 1e-15);

  SUBCASE("decoupling a routed product separates message and key") {
    Rng rng(22);
    const auto m = random_state<PolarizationQubit>(rng);
    const auto key = polarization::left();
    CHECK(max_abs_diff(decouple(route(m, key)), tensor(m, key)) < 1e-15);
  }

  SUBCASE("route_joint of a product equals route") {
    Rng rng(23);
    for (int i = 0; i < 200; ++i) {
      const auto s = random_state<PolarizationQubit>(rng);
      const auto c = random_state<PolarizationQubit>(rng);
      REQUIRE(max_abs_diff(route_joint(tensor(s, c)), route(s, c)) < 1e-15);
    }
  }

  SUBCASE("both directions are inverse over random states") {
    Rng rng(24);
    for (int i = 0; i < 1000; ++i) {
      const auto x = random_state<TwoQubitState>(rng);
      REQUIRE(max_abs_diff(decouple(route_joint(x)), x) == 0.0);
      const auto y = random_state<DualRailState>(rng);
      REQUIRE(max_abs_diff(route_joint(decouple(y).normalized()), y) < 1e-15);
    }
  }
}

TEST_CASE("encoding_swap") {
  Rng rng(25);
  SUBCASE("permutes (V,1) and (H,2)") {
    const auto out = encoding_swap(modes(1.0, 2.0, 3.0, 4.0));
    CHECK(out[0] == Amplitude(1.0));
    CHECK(out[1] == Amplitude(3.0));
    CHECK(out[2] == Amplitude(2.0));
    CHECK(out[3] == Amplitude(4.0));
  }
  SUBCASE("exchanges signal and control roles") {
    for (int i = 0; i < 200; ++i) {
      const auto s = random_state<PolarizationQubit>(rng);
      const auto c = random_state<PolarizationQubit>(rng);
      REQUIRE(max_abs_diff(encoding_swap(route(s, c)), route(c, s)) == 0.0);
    }
  }
  SUBCASE("message-as-control encoding swaps back to message-as-signal") {
    const auto m = random_state<PolarizationQubit>(rng);
    const auto key = polarization::right();
    CHECK(max_abs_diff(encoding_swap(auth::alice_encode(m, key, 1)), auth::alice_encode(m, key, 0)) ==
          0.0);
  }
  SUBCASE("involution over random states") {
    for (int i = 0; i < 1000; ++i) {
      const auto x = random_state<DualRailState>(rng);
      REQUIRE(max_abs_diff(encoding_swap(encoding_swap(x)), x) == 0.0);
    }
  }
}

TEST_CASE("ChannelModel validation") {
  CHECK_THROWS_AS(ChannelModel(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(ChannelModel(1.1), std::invalid_argument);
  CHECK_THROWS_AS(ChannelModel(std::nan("")), std::invalid_argument);
  CHECK(ChannelModel(0.5).photon_survival() == 0.25);
}

TEST_CASE("lossy channel") {
  Rng rng(26);
  const auto state = route(polarization::H(), polarization::diagonal());
  constexpr int kTrials = 100000;

  SUBCASE("lossless line always delivers the state unchanged") {
    for (int i = 0; i < 1000; ++i) {
      const auto out = lossy_channel(state, ChannelModel(1.0), rng);
      REQUIRE(out.has_value());
      REQUIRE(max_abs_diff(*out, state) == 0.0);
    }
  }
  SUBCASE("opaque line never delivers") {
    for (int i = 0; i < 1000; ++i) REQUIRE_FALSE(lossy_channel(state, ChannelModel(0.0), rng));
  }
  SUBCASE("routed photon survives with tau^2") {
    int survived = 0;
    for (int i = 0; i < kTrials; ++i) survived += lossy_channel(state, ChannelModel(0.5), rng).has_value();
    CHECK(testing::near_rate(survived, kTrials, 0.25, 0.01));
  }
  SUBCASE("separate photons survive jointly with tau^4") {
    const PhotonPair pair{polarization::H(), polarization::diagonal()};
    int survived = 0;
    for (int i = 0; i < kTrials; ++i) {
      const auto out = lossy_channel(pair, ChannelModel(0.5), rng);
      if (out) {
        ++survived;
        REQUIRE(max_abs_diff(out->second, pair.second) == 0.0);
      }
    }
    CHECK(testing::near_rate(survived, kTrials, 0.0625, 0.005));
  }
}
