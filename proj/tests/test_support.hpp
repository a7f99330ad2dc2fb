#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include "qrouter/rng.hpp"
#include "qrouter/statevec.hpp"

namespace qrouter::testing {

// Random state with Gaussian amplitudes, normalized.
template <class S>
S random_state(Rng& rng) {
  typename S::Amplitudes amps{};
  for (auto& a : amps) a = {rng.normal(), rng.normal()};
  return S(amps).normalized();
}

template <class S>
double max_abs_diff(const S& a, const S& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < S::dimension; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

// Distance after removing the best global phase: sqrt(max(0, 1 - |<a|b>|)).
template <class S>
double phase_insensitive_distance(const S& a, const S& b) {
  return std::sqrt(std::max(0.0, 1.0 - std::abs(inner_product(a, b))));
}

inline bool near_rate(std::uint64_t hits, std::uint64_t trials, double p, double half_width) {
  return std::abs(static_cast<double>(hits) / static_cast<double>(trials) - p) <= half_width;
}

}  // namespace qrouter::testing
