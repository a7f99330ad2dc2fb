#include "qrouter/optics.hpp"

#include <stdexcept>
#include <utility>

namespace qrouter::optics {

DualRailState route(const PolarizationQubit& signal, const PolarizationQubit& control) {
  if (!signal.is_normalized() || !control.is_normalized())
    throw std::invalid_argument("route: signal and control must be normalized");
  DualRailState out;
  for (std::size_t rail = 0; rail < 2; ++rail)
    for (std::size_t pol = 0; pol < 2; ++pol)
      out[dual_rail_index(pol, rail)] = control[rail] * signal[pol];
  return out;
}

DualRailState route_joint(const TwoQubitState& input) {
  if (!input.is_normalized()) throw std::invalid_argument("route_joint: input must be normalized");
  DualRailState out;
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t c = 0; c < 2; ++c) out[dual_rail_index(s, c)] = input[two_qubit_index(s, c)];
  return out;
}

TwoQubitState decouple(const DualRailState& input) {
  TwoQubitState out;
  for (std::size_t pol = 0; pol < 2; ++pol)
    for (std::size_t rail = 0; rail < 2; ++rail)
      out[two_qubit_index(pol, rail)] = input[dual_rail_index(pol, rail)];
  return out;
}

DualRailState encoding_swap(const DualRailState& input) {
  DualRailState out = input;
  std::swap(out[kV1], out[kH2]);
  return out;
}

ChannelModel::ChannelModel(double tau) : tau_(tau) {
  if (!(tau >= 0.0 && tau <= 1.0))
    throw std::invalid_argument("ChannelModel: tau must lie in [0, 1]");
}

std::optional<DualRailState> lossy_channel(const DualRailState& input, const ChannelModel& model,
                                           Rng& rng) {
  if (!rng.bernoulli(model.photon_survival())) return std::nullopt;
  return input;
}

std::optional<PhotonPair> lossy_channel(const PhotonPair& input, const ChannelModel& model,
                                        Rng& rng) {
  const bool first = rng.bernoulli(model.photon_survival());
  const bool second = rng.bernoulli(model.photon_survival());
  if (!(first && second)) return std::nullopt;
  return input;
}

}  // namespace qrouter::optics
