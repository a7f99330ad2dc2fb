#pragma once

// Ideal passive devices acting on one photon that carries a polarization qubit
// and a spatial (rail) qubit.

#include <optional>

#include "qrouter/rng.hpp"
#include "qrouter/statevec.hpp"

namespace qrouter::optics {

/// Routes `signal` into the superposition of rails selected by `control`:
/// gamma |signal>_1 + delta |signal>_2, i.e. amps [gamma*alpha, gamma*beta,
/// delta*alpha, delta*beta]. Both inputs must be normalized.
DualRailState route(const PolarizationQubit& signal, const PolarizationQubit& control);

/// Linear extension of route to an arbitrary (possibly entangled) two-qubit
/// input whose first qubit is the signal and second the control:
/// c1|00> + c2|01> + c3|10> + c4|11>  ->  c1|H>_1 + c2|H>_2 + c3|V>_1 + c4|V>_2.
DualRailState route_joint(const TwoQubitState& input);

/// Inverse of route_joint. The polarization qubit comes out as the first
/// (signal) qubit and the rail qubit as the second (ancilla). Norm is kept, so
/// sub-normalized inputs are fine.
TwoQubitState decouple(const DualRailState& input);

/// Exchanges which degree of freedom carries which qubit: (V,1) <-> (H,2).
DualRailState encoding_swap(const DualRailState& input);

class ChannelModel {
 public:
  /// `tau` is the amplitude transmissivity; throws std::invalid_argument
  /// outside [0, 1].
  explicit ChannelModel(double tau);

  double tau() const { return tau_; }
  // Intensity survival of one photon.
  double photon_survival() const { return tau_ * tau_; }

 private:
  double tau_;
};

/// Post-selected loss: the photon arrives with probability tau^2 and its state
/// is returned unchanged, otherwise nothing arrives.
std::optional<DualRailState> lossy_channel(const DualRailState& input, const ChannelModel& model,
                                           Rng& rng);

// Key and message sent as two separate photons.
struct PhotonPair {
  PolarizationQubit first;
  PolarizationQubit second;
};

/// Both photons must survive independently: joint probability tau^4.
std::optional<PhotonPair> lossy_channel(const PhotonPair& input, const ChannelModel& model,
                                        Rng& rng);

}  // namespace qrouter::optics
