#pragma once

// Router-assisted complete Bell-state discrimination and coherent Bell-basis
// filtering.

#include <array>
#include <optional>
#include <string_view>

#include "qrouter/rng.hpp"
#include "qrouter/statevec.hpp"

namespace qrouter::bell {

enum class BellOutcome { PhiMinus = 0, PhiPlus = 1, PsiMinus = 2, PsiPlus = 3 };

inline constexpr std::array<BellOutcome, 4> kAllOutcomes = {
    BellOutcome::PhiMinus, BellOutcome::PhiPlus, BellOutcome::PsiMinus, BellOutcome::PsiPlus};

std::string_view to_string(BellOutcome outcome);
std::optional<BellOutcome> parse_outcome(std::string_view name);

// Rows give the Bell components in terms of |00>,|01>,|10>,|11>:
// Phi+- = (|00> +- |11>)/sqrt2, Psi+- = (|01> +- |10>)/sqrt2. The matrix is real
// orthogonal, so its transpose is the inverse.
inline constexpr std::array<std::array<double, 4>, 4> kBellFromComputational = {{
    {kInvSqrt2, 0.0, 0.0, -kInvSqrt2},  // Phi-
    {kInvSqrt2, 0.0, 0.0, kInvSqrt2},   // Phi+
    {0.0, kInvSqrt2, -kInvSqrt2, 0.0},  // Psi-
    {0.0, kInvSqrt2, kInvSqrt2, 0.0},   // Psi+
}};

BellVector to_bell_basis(const TwoQubitState& x);
TwoQubitState from_bell_basis(const BellVector& b);

TwoQubitState bell_state(BellOutcome which);

/// PBS recombination of the two router outputs: exchanges (V,1) <-> (V,2).
/// Router images of Phi+- become |+->_1 and of Psi+- become |+->_2.
DualRailState bell_split(const DualRailState& input);

/// Detection modes after bell_split, indexed by BellOutcome: diagonal or
/// anti-diagonal polarization in rail 1 (Phi) or rail 2 (Psi).
const std::array<DualRailState, 4>& detector_modes();

/// |alpha_m|^2 over the Bell components, indexed by BellOutcome.
std::array<double, 4> outcome_probabilities(const TwoQubitState& input);

/// One detection event: route, split, then a +/- measurement per rail.
BellOutcome discriminate(const TwoQubitState& input, Rng& rng);

struct BellFilter {
  std::array<double, 4> tau{1.0, 1.0, 1.0, 1.0};  // amplitude transmittances
  std::array<double, 4> phi{0.0, 0.0, 0.0, 0.0};  // phase shifts, radians

  // Throws std::invalid_argument if any tau is outside [0, 1] or non-finite.
  void validate() const;
  Amplitude factor(BellOutcome m) const;
};

struct Manipulation {
  TwoQubitState filtered;                   // sub-normalized
  std::optional<TwoQubitState> normalized;  // empty when everything was filtered out
  double success_probability = 0.0;
};

/// alpha_m -> tau_m e^{i phi_m} alpha_m in the Bell basis.
Manipulation manipulate(const TwoQubitState& input, const BellFilter& filter);

/// The same map built from the optical chain: route_joint, bell_split, one
/// filter per detection mode, inverse split, decouple. Returns the
/// sub-normalized output.
TwoQubitState manipulate_optical(const TwoQubitState& input, const BellFilter& filter);

}  // namespace qrouter::bell
