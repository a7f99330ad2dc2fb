#include "qrouter/bell.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "qrouter/optics.hpp"

namespace qrouter::bell {

namespace {

std::size_t idx(BellOutcome m) { return static_cast<std::size_t>(m); }

DualRailState dual_rail(Amplitude h1, Amplitude v1, Amplitude h2, Amplitude v2) {
  return DualRailState({h1, v1, h2, v2});
}

}  // namespace

std::string_view to_string(BellOutcome outcome) {
  switch (outcome) {
    case BellOutcome::PhiMinus: return "PhiMinus";
    case BellOutcome::PhiPlus: return "PhiPlus";
    case BellOutcome::PsiMinus: return "PsiMinus";
    case BellOutcome::PsiPlus: return "PsiPlus";
  }
  return "?";
}

std::optional<BellOutcome> parse_outcome(std::string_view name) {
  for (const auto m : kAllOutcomes) {
    if (name == to_string(m)) return m;
  }
  if (name == "phi-" || name == "phi_minus") return BellOutcome::PhiMinus;
  if (name == "phi+" || name == "phi_plus") return BellOutcome::PhiPlus;
  if (name == "psi-" || name == "psi_minus") return BellOutcome::PsiMinus;
  if (name == "psi+" || name == "psi_plus") return BellOutcome::PsiPlus;
  return std::nullopt;
}

BellVector to_bell_basis(const TwoQubitState& x) {
  BellVector out;
  for (std::size_t m = 0; m < 4; ++m) {
    Amplitude a{};
    for (std::size_t j = 0; j < 4; ++j) a += kBellFromComputational[m][j] * x[j];
    out[m] = a;
  }
  return out;
}

TwoQubitState from_bell_basis(const BellVector& b) {
  TwoQubitState out;
  for (std::size_t j = 0; j < 4; ++j) {
    Amplitude a{};
    for (std::size_t m = 0; m < 4; ++m) a += kBellFromComputational[m][j] * b[m];
    out[j] = a;
  }
  return out;
}

TwoQubitState bell_state(BellOutcome which) {
  BellVector b;
  b[idx(which)] = 1.0;
  return from_bell_basis(b);
}

DualRailState bell_split(const DualRailState& input) {
  DualRailState out = input;
  std::swap(out[kV1], out[kV2]);
  return out;
}

const std::array<DualRailState, 4>& detector_modes() {
  static const std::array<DualRailState, 4> modes = {
      dual_rail(kInvSqrt2, -kInvSqrt2, 0.0, 0.0),  // |->_1  Phi-
      dual_rail(kInvSqrt2, kInvSqrt2, 0.0, 0.0),   // |+>_1  Phi+
      dual_rail(0.0, 0.0, kInvSqrt2, -kInvSqrt2),  // |->_2  Psi-
      dual_rail(0.0, 0.0, kInvSqrt2, kInvSqrt2),   // |+>_2  Psi+
  };
  return modes;
}

std::array<double, 4> outcome_probabilities(const TwoQubitState& input) {
  const BellVector b = to_bell_basis(input);
  const double n2 = b.norm_sq();
  if (!(n2 > 0.0)) throw std::invalid_argument("outcome_probabilities: zero state");
  std::array<double, 4> p{};
  for (std::size_t m = 0; m < 4; ++m) p[m] = std::norm(b[m]) / n2;
  return p;
}

BellOutcome discriminate(const TwoQubitState& input, Rng& rng) {
  const DualRailState split = bell_split(optics::route_joint(input));
  const auto detection = sample(split, detector_modes(), rng);
  return kAllOutcomes[detection.outcome];
}

void BellFilter::validate() const {
  for (std::size_t m = 0; m < 4; ++m) {
    if (!(tau[m] >= 0.0 && tau[m] <= 1.0))
      throw std::invalid_argument("BellFilter: tau_" + std::to_string(m + 1) + " outside [0, 1]");
    if (!std::isfinite(phi[m]))
      throw std::invalid_argument("BellFilter: phi_" + std::to_string(m + 1) + " not finite");
  }
}

Amplitude BellFilter::factor(BellOutcome m) const {
  return std::polar(tau[idx(m)], phi[idx(m)]);
}

Manipulation manipulate(const TwoQubitState& input, const BellFilter& filter) {
  if (!input.is_normalized()) throw std::invalid_argument("manipulate: input must be normalized");
  filter.validate();
  BellVector b = to_bell_basis(input);
  for (const auto m : kAllOutcomes) b[idx(m)] *= filter.factor(m);

  Manipulation result;
  result.filtered = from_bell_basis(b);
  result.success_probability = result.filtered.norm_sq();
  if (result.success_probability > kImpossibleProbability)
    result.normalized = result.filtered.normalized();
  return result;
}

TwoQubitState manipulate_optical(const TwoQubitState& input, const BellFilter& filter) {
  filter.validate();
  const DualRailState split = bell_split(optics::route_joint(input));
  const auto& modes = detector_modes();
  DualRailState filtered;
  for (const auto m : kAllOutcomes) {
    const Amplitude overlap = inner_product(modes[idx(m)], split);
    filtered += (filter.factor(m) * overlap) * modes[idx(m)];
  }
  return optics::decouple(bell_split(filtered));
}

}  // namespace qrouter::bell
