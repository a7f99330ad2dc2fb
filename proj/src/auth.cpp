#include "qrouter/auth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <type_traits>

#include <json.hpp>

namespace qrouter::auth {

namespace {

int checked_bit(int bit, const char* what) {
  if (bit != 0 && bit != 1) throw std::invalid_argument(std::string(what) + " must be 0 or 1");
  return bit;
}

PolarizationQubit orthogonal(const PolarizationQubit& q) {
  return make_qubit(-std::conj(q[1]), std::conj(q[0]));
}

// Brings the qubit Eve is interested in to the polarization slot (for slot 1)
// and back again afterwards; encoding_swap is its own inverse.
DualRailState to_slot(const DualRailState& s, int slot) {
  return slot == 1 ? optics::encoding_swap(s) : s;
}

// Replace the first qubit of the decoupled pair by `replacement`. The old first
// qubit is measured in H/V and dropped, leaving the second qubit in its
// conditional state.
DualRailState replace_first(const TwoQubitState& pair, const PolarizationQubit& replacement,
                            Rng& rng) {
  const auto dropped =
      measure_qubit(pair, 0, {polarization::H(), polarization::V()}, rng);
  return optics::route_joint(tensor(replacement, dropped.remaining));
}

}  // namespace

SaltStrings generate_salts(std::size_t length, Rng& rng) {
  if (length == 0) throw std::invalid_argument("generate_salts: length must be >= 1");
  SaltStrings salts;
  salts.s1.resize(length);
  salts.s2.resize(length);
  for (auto& b : salts.s1) b = static_cast<std::uint8_t>(rng.bit());
  for (auto& b : salts.s2) b = static_cast<std::uint8_t>(rng.bit());
  return salts;
}

PolarizationQubit key_qubit(KeyState key) {
  checked_bit(key.basis, "key basis");
  if (key.sign != 1 && key.sign != -1) throw std::invalid_argument("key sign must be +1 or -1");
  const Amplitude phase = key.basis == 0 ? Amplitude(1.0) : Amplitude(0.0, 1.0);
  return make_qubit(kInvSqrt2, static_cast<double>(key.sign) * kInvSqrt2 * phase);
}

std::array<PolarizationQubit, 2> key_basis(int basis) {
  return {key_qubit({basis, +1}), key_qubit({basis, -1})};
}

PreparedKey make_key_qubit(int s1_bit, Rng& rng) {
  const KeyState key{checked_bit(s1_bit, "s1 bit"), rng.bit() ? +1 : -1};
  return {key, key_qubit(key)};
}

DualRailState alice_encode(const PolarizationQubit& message, const PolarizationQubit& key,
                           int s2_bit) {
  return checked_bit(s2_bit, "s2 bit") == 0 ? optics::route(message, key)
                                             : optics::route(key, message);
}

PolarizationQubit make_decoy(KeyState key) {
  return key_qubit({key.basis, -key.sign});
}

BobReading bob_decode(const DualRailState& input, int s1_bit, int s2_bit, Rng& rng) {
  const DualRailState aligned = checked_bit(s2_bit, "s2 bit") == 1 ? optics::encoding_swap(input)
                                                                    : input;
  const TwoQubitState pair = optics::decouple(aligned);
  const auto key = measure_qubit(pair, 1, key_basis(checked_bit(s1_bit, "s1 bit")), rng);
  return {key.remaining, key.outcome == 0 ? +1 : -1};
}

std::string AdversaryStrategy::name() const {
  struct Namer {
    std::string operator()(const NoAdversary&) const { return "none"; }
    std::string operator()(const BlindForge& b) const {
      return b.knows_convention ? "blind-oracle" : "blind";
    }
    std::string operator()(const InformedForge&) const { return "informed"; }
    std::string operator()(const PauliNoise& p) const {
      switch (p.axis) {
        case PauliAxis::X: return "pauli-x";
        case PauliAxis::Y: return "pauli-y";
        case PauliAxis::Z: return "pauli-z";
      }
      return "pauli";
    }
  };
  return std::visit(Namer{}, kind);
}

DualRailState eve_blind_forge(const DualRailState& input, const PolarizationQubit& forged,
                              int guess, Rng& rng) {
  checked_bit(guess, "guess");
  const TwoQubitState pair = optics::decouple(to_slot(input, guess));
  return to_slot(replace_first(pair, forged, rng), guess);
}

DualRailState eve_blind_forge(const DualRailState& input, const PolarizationQubit& forged,
                              Rng& rng) {
  const int guess = rng.bit();
  return eve_blind_forge(input, forged, guess, rng);
}

std::optional<DualRailState> eve_informed_forge(const DualRailState& input,
                                                const PolarizationQubit& true_message,
                                                const PolarizationQubit& forged, int pick,
                                                Rng& rng) {
  checked_bit(pick, "pick");
  if (!true_message.is_normalized())
    throw std::invalid_argument("eve_informed_forge: reference message must be normalized");
  const TwoQubitState pair = optics::decouple(to_slot(input, pick));
  const auto test = measure_qubit(pair, 0, {true_message, orthogonal(true_message)}, rng);
  if (test.outcome == 1) return std::nullopt;
  return to_slot(optics::route_joint(tensor(forged, test.remaining)), pick);
}

std::optional<DualRailState> eve_informed_forge(const DualRailState& input,
                                                const PolarizationQubit& true_message,
                                                const PolarizationQubit& forged, Rng& rng) {
  const int pick = rng.bit();
  return eve_informed_forge(input, true_message, forged, pick, rng);
}

DualRailState apply_polarization_pauli(const DualRailState& input, PauliAxis axis) {
  DualRailState out;
  for (std::size_t rail = 0; rail < 2; ++rail) {
    const auto q = apply_pauli(axis, make_qubit(input[dual_rail_index(0, rail)],
                                                input[dual_rail_index(1, rail)]));
    out[dual_rail_index(0, rail)] = q[0];
    out[dual_rail_index(1, rail)] = q[1];
  }
  return out;
}

DualRailState apply_spatial_pauli(const DualRailState& input, PauliAxis axis) {
  DualRailState out;
  for (std::size_t pol = 0; pol < 2; ++pol) {
    const auto q = apply_pauli(axis, make_qubit(input[dual_rail_index(pol, 0)],
                                                input[dual_rail_index(pol, 1)]));
    out[dual_rail_index(pol, 0)] = q[0];
    out[dual_rail_index(pol, 1)] = q[1];
  }
  return out;
}

DualRailState eve_pauli_noise(const DualRailState& input, PauliAxis axis, int guess) {
  return checked_bit(guess, "guess") == 0 ? apply_polarization_pauli(input, axis)
                                          : apply_spatial_pauli(input, axis);
}

DualRailState eve_pauli_noise(const DualRailState& input, PauliAxis axis, Rng& rng) {
  return eve_pauli_noise(input, axis, rng.bit());
}

void SessionConfig::validate() const {
  if (n < 1) throw std::invalid_argument("session: n must be >= 1");
  if (n + d > 1'000'000) throw std::invalid_argument("session: n + d too large");
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("session: tau must lie in [0, 1]");
  const double p = adversary.attack_probability;
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("session: attack probability must lie in [0, 1]");
}

std::string_view to_string(EveAction action) {
  switch (action) {
    case EveAction::None: return "none";
    case EveAction::BlindForge: return "blind_forge";
    case EveAction::InformedForge: return "informed_forge";
    case EveAction::InformedDiscard: return "informed_discard";
    case EveAction::PauliNoise: return "pauli_noise";
  }
  return "?";
}

SessionResult run_session(const SessionConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const std::size_t length = config.n + config.d;

  const SaltStrings salts = generate_salts(length, rng);
  std::vector<PolarizationQubit> message(config.n);
  for (auto& q : message) q = haar_random_qubit(rng);

  std::vector<std::size_t> order(length);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> is_decoy(length, false);
  for (std::size_t i = 0; i < config.d; ++i) is_decoy[order[i]] = true;

  const optics::ChannelModel channel(config.tau);
  const AdversaryStrategy& eve = config.adversary;

  SessionResult result;
  result.rounds.reserve(length);
  double fidelity_sum = 0.0;
  std::size_t next_message = 0;

  for (std::size_t pos = 0; pos < length; ++pos) {
    RoundRecord rec;
    rec.position = pos;
    rec.is_decoy = is_decoy[pos];
    rec.s1 = salts.s1[pos];
    rec.s2 = salts.s2[pos];

    const PreparedKey key = make_key_qubit(rec.s1, rng);
    rec.key = key.key;
    const PolarizationQubit payload = rec.is_decoy ? make_decoy(key.key) : message[next_message];
    const std::optional<PolarizationQubit> original =
        rec.is_decoy ? std::nullopt : std::optional(message[next_message]);
    if (!rec.is_decoy) ++next_message;

    std::optional<DualRailState> photon =
        optics::lossy_channel(alice_encode(payload, key.qubit, rec.s2), channel, rng);
    rec.survived_channel = photon.has_value();

    if (photon && !eve.is_none() && rng.bernoulli(eve.attack_probability)) {
      std::visit(
          [&](const auto& strategy) {
            using S = std::decay_t<decltype(strategy)>;
            if constexpr (std::is_same_v<S, BlindForge>) {
              const PolarizationQubit forged = haar_random_qubit(rng);
              const int guess = strategy.knows_convention ? rec.s2 : rng.bit();
              rec.eve_action = EveAction::BlindForge;
              rec.eve_guess = guess;
              photon = eve_blind_forge(*photon, forged, guess, rng);
            } else if constexpr (std::is_same_v<S, InformedForge>) {
              // At a decoy position Eve's idea of the message is unrelated to the decoy.
              const PolarizationQubit reference = original ? *original : haar_random_qubit(rng);
              const PolarizationQubit forged = haar_random_qubit(rng);
              const int pick = rng.bit();
              rec.eve_guess = pick;
              photon = eve_informed_forge(*photon, reference, forged, pick, rng);
              rec.eve_action = photon ? EveAction::InformedForge : EveAction::InformedDiscard;
              rec.discarded_by_eve = !photon;
            } else if constexpr (std::is_same_v<S, PauliNoise>) {
              const int guess = rng.bit();
              rec.eve_action = EveAction::PauliNoise;
              rec.eve_guess = guess;
              photon = eve_pauli_noise(*photon, strategy.axis, guess);
            }
          },
          eve.kind);
    }

    if (photon) {
      const BobReading reading = bob_decode(*photon, rec.s1, rec.s2, rng);
      rec.bob_key_outcome = reading.key_outcome;
      bool ok = reading.key_outcome == rec.key.sign;
      if (rec.is_decoy && config.decoy_verify) {
        const auto check = sample(reading.message, {payload, key.qubit}, rng);
        rec.decoy_verified = check.outcome == 0;
        ok = ok && *rec.decoy_verified;
      }
      rec.bob_verified = ok;
      if (original && ok) {
        rec.delivered_message_fidelity = fidelity(*original, reading.message);
        fidelity_sum += *rec.delivered_message_fidelity;
        ++result.delivered_messages;
      }
    }

    ++result.action_counts[static_cast<std::size_t>(rec.eve_action)];
    const bool failed = rec.failed();
    result.rounds.push_back(rec);
    if (failed) {
      result.detected = true;
      if (config.abort_on_failure) break;
    }
  }

  if (result.delivered_messages > 0)
    result.delivered_fidelity = fidelity_sum / static_cast<double>(result.delivered_messages);
  return result;
}

std::string to_json_line(const RoundRecord& r, std::uint64_t session) {
  nlohmann::ordered_json j;
  j["session"] = session;
  j["position"] = r.position;
  j["is_decoy"] = r.is_decoy;
  j["s1"] = r.s1;
  j["s2"] = r.s2;
  j["key_basis"] = r.key.basis;
  j["key_sign"] = r.key.sign;
  j["eve_action"] = to_string(r.eve_action);
  j["eve_guess"] = r.eve_guess ? nlohmann::ordered_json(*r.eve_guess) : nullptr;
  j["survived_channel"] = r.survived_channel;
  j["discarded_by_eve"] = r.discarded_by_eve;
  j["bob_key_outcome"] = r.bob_key_outcome ? nlohmann::ordered_json(*r.bob_key_outcome) : nullptr;
  j["decoy_verified"] = r.decoy_verified ? nlohmann::ordered_json(*r.decoy_verified) : nullptr;
  j["bob_verified"] = r.bob_verified;
  j["delivered_message_fidelity"] = r.delivered_message_fidelity
                                        ? nlohmann::ordered_json(*r.delivered_message_fidelity)
                                        : nullptr;
  return j.dump();
}

void write_transcript(std::ostream& out, const SessionResult& result, std::uint64_t session) {
  for (const auto& r : result.rounds) out << to_json_line(r, session) << '\n';
}

Eigen::Matrix4cd eve_view_ensemble(int s2_bit, std::size_t message_samples, Rng& rng) {
  checked_bit(s2_bit, "s2 bit");
  if (message_samples == 0) throw std::invalid_argument("eve_view_ensemble: need samples");
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  for (std::size_t i = 0; i < message_samples; ++i) {
    const PolarizationQubit m = haar_random_qubit(rng);
    for (int basis = 0; basis < 2; ++basis) {
      for (int sign : {+1, -1}) {
        const DualRailState psi = alice_encode(m, key_qubit({basis, sign}), s2_bit);
        Eigen::Vector4cd v;
        for (int k = 0; k < 4; ++k) v[k] = psi[static_cast<std::size_t>(k)];
        rho += v * v.adjoint();
      }
    }
  }
  return rho / static_cast<double>(4 * message_samples);
}

double trace_distance(const Eigen::Matrix4cd& a, const Eigen::Matrix4cd& b) {
  const Eigen::Matrix4cd diff = a - b;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(diff, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace qrouter::auth
