#pragma once

// Router-based authentication of a quantum message.
//
// Each transmitted photon carries one message (or decoy) qubit and one key
// qubit. The second salt bit decides which of them rides in polarization:
//   s2 = 0: polarization = message, rail = key
//   s2 = 1: polarization = key,     rail = message
// Bob undoes the choice with an encoding swap, decouples, and measures the key
// in the basis given by the first salt bit.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qrouter/optics.hpp"
#include "qrouter/rng.hpp"
#include "qrouter/statevec.hpp"

namespace qrouter::auth {

struct SaltStrings {
  std::vector<std::uint8_t> s1;  // key preparation basis
  std::vector<std::uint8_t> s2;  // message/key role assignment

  std::size_t size() const { return s1.size(); }
};

SaltStrings generate_salts(std::size_t length, Rng& rng);

/// |k> = (|H> + sign * i^basis |V>)/sqrt2, so basis 0 gives |+>/|->, basis 1 gives |R>/|L>.
struct KeyState {
  int basis = 0;
  int sign = +1;

  friend bool operator==(const KeyState&, const KeyState&) = default;
};

PolarizationQubit key_qubit(KeyState key);

// Measurement basis for a key: index 0 is sign +1, index 1 is sign -1.
std::array<PolarizationQubit, 2> key_basis(int basis);

struct PreparedKey {
  KeyState key;
  PolarizationQubit qubit;
};

PreparedKey make_key_qubit(int s1_bit, Rng& rng);

DualRailState alice_encode(const PolarizationQubit& message, const PolarizationQubit& key,
                           int s2_bit);

// The state orthogonal to the key, sent in place of a message qubit.
PolarizationQubit make_decoy(KeyState key);

struct BobReading {
  PolarizationQubit message;
  int key_outcome = +1;  // sign read in the announced basis
};

BobReading bob_decode(const DualRailState& input, int s1_bit, int s2_bit, Rng& rng);

// --- adversaries -----------------------------------------------------------

struct NoAdversary {};

/// Eve replaces what she believes is the message qubit. With `knows_convention`
/// she is handed the true s2 bit (used to test the correct-guess branch).
struct BlindForge {
  bool knows_convention = false;
};

/// Eve knows the message and measures |m><m| - |m_perp><m_perp| on one qubit.
struct InformedForge {};

struct PauliNoise {
  PauliAxis axis = PauliAxis::Z;
};

struct AdversaryStrategy {
  std::variant<NoAdversary, BlindForge, InformedForge, PauliNoise> kind{};
  double attack_probability = 1.0;  // per transmitted qubit

  bool is_none() const { return std::holds_alternative<NoAdversary>(kind); }
  std::string name() const;
};

/// Decouple under `guess`, swap in `forged` for the believed message qubit,
/// re-encode under `guess`.
DualRailState eve_blind_forge(const DualRailState& input, const PolarizationQubit& forged,
                              int guess, Rng& rng);
DualRailState eve_blind_forge(const DualRailState& input, const PolarizationQubit& forged,
                              Rng& rng);

/// Projective test of the qubit at slot `pick` (0 polarization, 1 rail) against
/// `true_message`. Outcome -1 discards the photon (empty result); +1 replaces
/// the tested qubit with `forged`.
std::optional<DualRailState> eve_informed_forge(const DualRailState& input,
                                                const PolarizationQubit& true_message,
                                                const PolarizationQubit& forged, int pick,
                                                Rng& rng);
std::optional<DualRailState> eve_informed_forge(const DualRailState& input,
                                                const PolarizationQubit& true_message,
                                                const PolarizationQubit& forged, Rng& rng);

// Pauli on the polarization qubit in both rails.
DualRailState apply_polarization_pauli(const DualRailState& input, PauliAxis axis);
// Pauli on the rail qubit.
DualRailState apply_spatial_pauli(const DualRailState& input, PauliAxis axis);

/// Applies σ_axis to the degree of freedom selected by `guess` (0 polarization, 1 rail).
DualRailState eve_pauli_noise(const DualRailState& input, PauliAxis axis, int guess);
DualRailState eve_pauli_noise(const DualRailState& input, PauliAxis axis, Rng& rng);

// --- sessions --------------------------------------------------------------

struct SessionConfig {
  std::size_t n = 1;  // message qubits
  std::size_t d = 0;  // decoys
  double tau = 1.0;
  AdversaryStrategy adversary{};
  std::uint64_t seed = 0;
  bool decoy_verify = true;
  bool abort_on_failure = false;

  // Throws std::invalid_argument.
  void validate() const;
};

enum class EveAction { None, BlindForge, InformedForge, InformedDiscard, PauliNoise };
inline constexpr std::size_t kEveActionCount = 5;

std::string_view to_string(EveAction action);

struct RoundRecord {
  std::size_t position = 0;
  bool is_decoy = false;
  int s1 = 0;
  int s2 = 0;
  KeyState key{};
  EveAction eve_action = EveAction::None;
  std::optional<int> eve_guess;  // convention/slot Eve acted on
  bool survived_channel = false;
  bool discarded_by_eve = false;
  std::optional<int> bob_key_outcome;
  std::optional<bool> decoy_verified;
  bool bob_verified = false;
  std::optional<double> delivered_message_fidelity;

  bool delivered() const { return survived_channel && !discarded_by_eve; }
  bool failed() const { return delivered() && !bob_verified; }
};

struct SessionResult {
  std::vector<RoundRecord> rounds;
  bool detected = false;
  std::size_t delivered_messages = 0;
  // Mean over delivered, verified message positions; empty when none arrived.
  std::optional<double> delivered_fidelity;
  std::array<std::size_t, kEveActionCount> action_counts{};
};

SessionResult run_session(const SessionConfig& config);

/// One JSON object per round; field names are listed in the README.
std::string to_json_line(const RoundRecord& record, std::uint64_t session);
void write_transcript(std::ostream& out, const SessionResult& result, std::uint64_t session);

/// Average density operator of the transmitted photon, as seen by Eve, for a
/// fixed s2 bit. Key basis and sign are enumerated exactly; Haar messages are
/// sampled.
Eigen::Matrix4cd eve_view_ensemble(int s2_bit, std::size_t message_samples, Rng& rng);

double trace_distance(const Eigen::Matrix4cd& a, const Eigen::Matrix4cd& b);

}  // namespace qrouter::auth
