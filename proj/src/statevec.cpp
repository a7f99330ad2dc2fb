#include "qrouter/statevec.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace qrouter {

template <std::size_t N, class Tag>
State<N, Tag> State<N, Tag>::normalized() const {
  const double n2 = norm_sq();
  if (!(n2 > 0.0)) throw std::domain_error("cannot normalize the zero vector");
  return Amplitude(1.0 / std::sqrt(n2)) * *this;
}

namespace polarization {
PolarizationQubit H() { return make_qubit(1.0, 0.0); }
PolarizationQubit V() { return make_qubit(0.0, 1.0); }
PolarizationQubit diagonal() { return make_qubit(kInvSqrt2, kInvSqrt2); }
PolarizationQubit antidiagonal() { return make_qubit(kInvSqrt2, -kInvSqrt2); }
PolarizationQubit right() { return make_qubit(kInvSqrt2, Amplitude(0.0, kInvSqrt2)); }
PolarizationQubit left() { return make_qubit(kInvSqrt2, Amplitude(0.0, -kInvSqrt2)); }
}  // namespace polarization

PolarizationQubit make_qubit(Amplitude h, Amplitude v) {
  return PolarizationQubit({h, v});
}

TwoQubitState tensor(const PolarizationQubit& first, const PolarizationQubit& second) {
  TwoQubitState out;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) out[two_qubit_index(i, j)] = first[i] * second[j];
  return out;
}

Amplitude inner_product(std::span<const Amplitude> a, std::span<const Amplitude> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("inner_product: dimension mismatch (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  if (a.size() != 2 && a.size() != 4)
    throw std::invalid_argument("inner_product: unsupported dimension " + std::to_string(a.size()));
  Amplitude total{};
  for (std::size_t i = 0; i < a.size(); ++i) total += std::conj(a[i]) * b[i];
  return total;
}

template <std::size_t N, class Tag>
double fidelity(const State<N, Tag>& a, const State<N, Tag>& b) {
  if (!a.is_normalized(1e-6) || !b.is_normalized(1e-6))
    throw std::invalid_argument("fidelity: both states must be normalized");
  return std::min(1.0, std::norm(inner_product(a, b)));
}

template <std::size_t N, class Tag>
Projection<State<N, Tag>> project(const State<N, Tag>& state, const State<N, Tag>& projector) {
  if (!projector.is_normalized())
    throw std::invalid_argument("project: projector state must be normalized");
  const double n2 = state.norm_sq();
  if (!(n2 > 0.0)) throw std::invalid_argument("project: zero state");
  const Amplitude overlap = inner_product(projector, state);
  Projection<State<N, Tag>> result;
  result.probability = std::norm(overlap) / n2;
  if (result.probability <= kImpossibleProbability) {
    result.probability = 0.0;
    return result;
  }
  result.post_state = (overlap / std::abs(overlap)) * projector;
  return result;
}

template <std::size_t N, class Tag>
bool is_orthonormal(const std::array<State<N, Tag>, N>& basis, double tolerance) {
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      const Amplitude expected = i == j ? 1.0 : 0.0;
      if (std::abs(inner_product(basis[i], basis[j]) - expected) > tolerance) return false;
    }
  }
  return true;
}

template <std::size_t N, class Tag>
Measurement<State<N, Tag>> sample(const State<N, Tag>& state,
                                  const std::array<State<N, Tag>, N>& basis, Rng& rng) {
  if (!is_orthonormal(basis)) throw std::invalid_argument("sample: basis is not orthonormal");
  const double n2 = state.norm_sq();
  if (!(n2 > 0.0)) throw std::invalid_argument("sample: zero state");

  std::array<Amplitude, N> overlaps{};
  std::array<double, N> probs{};
  for (std::size_t m = 0; m < N; ++m) {
    overlaps[m] = inner_product(basis[m], state);
    probs[m] = std::norm(overlaps[m]) / n2;
  }
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t outcome = N - 1;
  for (std::size_t m = 0; m < N; ++m) {
    cumulative += probs[m];
    if (u < cumulative) {
      outcome = m;
      break;
    }
  }
  // Guard the tail against rounding: never pick an outcome of zero weight.
  while (probs[outcome] <= 0.0 && outcome > 0) --outcome;

  const Amplitude phase = std::abs(overlaps[outcome]) > 0.0
                              ? overlaps[outcome] / std::abs(overlaps[outcome])
                              : Amplitude(1.0);
  return {outcome, probs[outcome], phase * basis[outcome]};
}

QubitMeasurement measure_qubit(const TwoQubitState& state, int which,
                               const std::array<PolarizationQubit, 2>& basis, Rng& rng) {
  if (which != 0 && which != 1) throw std::invalid_argument("measure_qubit: which must be 0 or 1");
  if (!is_orthonormal(basis)) throw std::invalid_argument("measure_qubit: basis is not orthonormal");
  const double n2 = state.norm_sq();
  if (!(n2 > 0.0)) throw std::invalid_argument("measure_qubit: zero state");

  // Conditional (unnormalized) state of the other qubit for each outcome.
  std::array<PolarizationQubit, 2> branch{};
  std::array<double, 2> probs{};
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t other = 0; other < 2; ++other) {
      Amplitude a{};
      for (std::size_t j = 0; j < 2; ++j) {
        const std::size_t idx = which == 0 ? two_qubit_index(j, other) : two_qubit_index(other, j);
        a += std::conj(basis[m][j]) * state[idx];
      }
      branch[m][other] = a;
    }
    probs[m] = branch[m].norm_sq() / n2;
  }
  std::size_t outcome = rng.uniform() < probs[0] ? 0 : 1;
  if (probs[outcome] <= 0.0) outcome = 1 - outcome;
  return {outcome, probs[outcome], branch[outcome].normalized()};
}

PolarizationQubit haar_random_qubit(Rng& rng) {
  for (;;) {
    const Amplitude h(rng.normal(), rng.normal());
    const Amplitude v(rng.normal(), rng.normal());
    const PolarizationQubit q = make_qubit(h, v);
    if (q.norm_sq() > 1e-300) return q.normalized();
  }
}

PolarizationQubit apply_pauli(PauliAxis axis, const PolarizationQubit& q) {
  const Amplitude i(0.0, 1.0);
  switch (axis) {
    case PauliAxis::X: return make_qubit(q[1], q[0]);
    case PauliAxis::Y: return make_qubit(-i * q[1], i * q[0]);
    case PauliAxis::Z: return make_qubit(q[0], -q[1]);
  }
  throw std::invalid_argument("apply_pauli: unknown axis");
}

#define QROUTER_INSTANTIATE(N, TAG)                                                            \
  template class State<N, TAG>;                                                                \
  template double fidelity(const State<N, TAG>&, const State<N, TAG>&);                        \
  template Projection<State<N, TAG>> project(const State<N, TAG>&, const State<N, TAG>&);      \
  template bool is_orthonormal(const std::array<State<N, TAG>, N>&, double);                   \
  template Measurement<State<N, TAG>> sample(const State<N, TAG>&,                             \
                                             const std::array<State<N, TAG>, N>&, Rng&);

QROUTER_INSTANTIATE(2, PolarizationTag)
QROUTER_INSTANTIATE(4, DualRailTag)
QROUTER_INSTANTIATE(4, TwoQubitTag)
QROUTER_INSTANTIATE(4, BellTag)

#undef QROUTER_INSTANTIATE

}  // namespace qrouter
