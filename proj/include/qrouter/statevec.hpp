#pragma once

// Pure-state algebra for the 2- and 4-dimensional carriers used throughout the
// library. Basis orderings are fixed here and every other module relies on them:
//
//   PolarizationQubit  [H, V]
//   DualRailState      [(H,1), (V,1), (H,2), (V,2)]   index = 2*rail + pol
//   TwoQubitState      [|00>, |01>, |10>, |11>]       index = 2*first + second
//   BellVector         [Phi-, Phi+, Psi-, Psi+]

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>

#include "qrouter/rng.hpp"

namespace qrouter {

using Amplitude = std::complex<double>;

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
// Tolerance for caller-supplied states.
inline constexpr double kInputNormTolerance = 1e-9;
// Tolerance for states produced inside the library.
inline constexpr double kInternalNormTolerance = 1e-12;
// Projections below this probability are reported as impossible.
inline constexpr double kImpossibleProbability = 1e-14;

template <std::size_t N, class Tag>
class State {
 public:
  static constexpr std::size_t dimension = N;
  using Amplitudes = std::array<Amplitude, N>;

  constexpr State() = default;
  constexpr explicit State(const Amplitudes& amps) : amps_(amps) {}

  constexpr Amplitude operator[](std::size_t i) const { return amps_[i]; }
  constexpr Amplitude& operator[](std::size_t i) { return amps_[i]; }

  std::span<const Amplitude, N> amplitudes() const { return amps_; }
  const Amplitudes& array() const { return amps_; }

  double norm_sq() const {
    double total = 0.0;
    for (const auto& a : amps_) total += std::norm(a);
    return total;
  }

  bool is_finite() const {
    for (const auto& a : amps_) {
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
    }
    return true;
  }

  bool is_normalized(double tolerance = kInputNormTolerance) const {
    return std::abs(norm_sq() - 1.0) <= tolerance;
  }

  /// Throws std::domain_error for the zero vector.
  State normalized() const;

  State& operator*=(Amplitude c) {
    for (auto& a : amps_) a *= c;
    return *this;
  }
  State& operator+=(const State& other) {
    for (std::size_t i = 0; i < N; ++i) amps_[i] += other.amps_[i];
    return *this;
  }
  State& operator-=(const State& other) {
    for (std::size_t i = 0; i < N; ++i) amps_[i] -= other.amps_[i];
    return *this;
  }

  friend State operator*(Amplitude c, State s) { return s *= c; }
  friend State operator+(State a, const State& b) { return a += b; }
  friend State operator-(State a, const State& b) { return a -= b; }

 private:
  Amplitudes amps_{};
};

struct PolarizationTag {};
struct DualRailTag {};
struct TwoQubitTag {};
struct BellTag {};

using PolarizationQubit = State<2, PolarizationTag>;
using DualRailState = State<4, DualRailTag>;
using TwoQubitState = State<4, TwoQubitTag>;
using BellVector = State<4, BellTag>;

// Dual-rail mode indices.
enum DualRailMode : std::size_t { kH1 = 0, kV1 = 1, kH2 = 2, kV2 = 3 };

constexpr std::size_t dual_rail_index(std::size_t polarization, std::size_t rail) {
  return 2 * rail + polarization;
}

constexpr std::size_t two_qubit_index(std::size_t first, std::size_t second) {
  return 2 * first + second;
}

// The six polarization states |H>, |V>, |+>, |->, |R> = (H + iV)/sqrt2, |L> = (H - iV)/sqrt2.
namespace polarization {
PolarizationQubit H();
PolarizationQubit V();
PolarizationQubit diagonal();
PolarizationQubit antidiagonal();
PolarizationQubit right();
PolarizationQubit left();
}  // namespace polarization

PolarizationQubit make_qubit(Amplitude h, Amplitude v);

TwoQubitState tensor(const PolarizationQubit& first, const PolarizationQubit& second);

/// <a|b>, conjugate-linear in `a`.
template <std::size_t N, class Tag>
Amplitude inner_product(const State<N, Tag>& a, const State<N, Tag>& b) {
  Amplitude total{};
  for (std::size_t i = 0; i < N; ++i) total += std::conj(a[i]) * b[i];
  return total;
}

// Untyped form. Throws std::invalid_argument unless both spans have the same
// supported dimension (2 or 4).
Amplitude inner_product(std::span<const Amplitude> a, std::span<const Amplitude> b);

// |<a|b>|^2 for normalized states; std::invalid_argument if either norm is off
// by more than 1e-6.
template <std::size_t N, class Tag>
double fidelity(const State<N, Tag>& a, const State<N, Tag>& b);

template <class S>
struct Projection {
  double probability = 0.0;
  std::optional<S> post_state;  // empty for an impossible outcome
};

template <std::size_t N, class Tag>
Projection<State<N, Tag>> project(const State<N, Tag>& state, const State<N, Tag>& projector);

template <class S>
struct Measurement {
  std::size_t outcome = 0;
  double probability = 0.0;
  S post_state;
};

/// Born-rule measurement in a complete orthonormal basis.
template <std::size_t N, class Tag>
Measurement<State<N, Tag>> sample(const State<N, Tag>& state,
                                  const std::array<State<N, Tag>, N>& basis, Rng& rng);

template <std::size_t N, class Tag>
bool is_orthonormal(const std::array<State<N, Tag>, N>& basis,
                    double tolerance = kInputNormTolerance);

/// Result of measuring one qubit of a two-qubit state: the outcome index in the
/// supplied basis and the conditional state of the other qubit.
struct QubitMeasurement {
  std::size_t outcome = 0;
  double probability = 0.0;
  PolarizationQubit remaining;
};

// `which` is 0 for the first qubit, 1 for the second.
QubitMeasurement measure_qubit(const TwoQubitState& state, int which,
                               const std::array<PolarizationQubit, 2>& basis, Rng& rng);

PolarizationQubit haar_random_qubit(Rng& rng);

enum class PauliAxis { X, Y, Z };

PolarizationQubit apply_pauli(PauliAxis axis, const PolarizationQubit& q);

}  // namespace qrouter
