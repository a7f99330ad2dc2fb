#pragma once

// Closed-form security figures for the authentication scheme: counterfeiting
// probabilities, conditional and mean transmission fidelity, and channel
// success rates.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qrouter/statevec.hpp"

namespace qrouter::analytics {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Above this n + d the counterfeiting probability is evaluated in log space.
inline constexpr unsigned kExactLimit = 200;

/// Eve attacks k of the n + d transmitted qubits, m of which are decoys.
struct AttackTallyParams {
  unsigned n = 0;
  unsigned d = 0;
  unsigned k = 0;
  unsigned m = 0;

  unsigned m_min() const { return k > n ? k - n : 0; }
  unsigned m_max() const { return k < d ? k : d; }
  // Throws std::invalid_argument.
  void validate() const;
};

BigInt binomial_exact(unsigned n, unsigned k);
double log_binomial(unsigned n, unsigned k);

double p_c_blind(unsigned n);

/// 3^k C(d,m) C(n,k-m) / (4^k 2^m C(n+d,k)).
Rational p_c_exact(const AttackTallyParams& p);
double p_c_log(const AttackTallyParams& p);
double p_c(const AttackTallyParams& p);

/// 1 - (k-m)/(2n). Requires n >= 1 and 0 <= k-m <= n.
double fidelity_cond(unsigned k, unsigned m, unsigned n);

// g(k): relative weight of Eve attacking k qubits.
using AttackWeight = std::function<double(unsigned k)>;
double uniform_weight(unsigned k);

double mean_fidelity(unsigned n, unsigned d, const AttackWeight& g = uniform_weight);
double eta(unsigned n, unsigned d, const AttackWeight& g = uniform_weight);

/// Sum of P_C over all valid (k, m), divided by the number of such pairs.
double mean_counterfeit_prob(unsigned n, unsigned d);

double p_c_informed(unsigned n);
double p_c_informed_decoy(unsigned n, unsigned d);

double pauli_detection_prob(PauliAxis axis);

double channel_success(double tau, bool routed);

// Session-level undetected probabilities when each of the n + d qubits is
// attacked independently with probability q (binomial g(k)); q = 1 recovers
// (3/4)^n (3/8)^d and (7/8)^n (1/2)^d.
double p_undetected_blind(unsigned n, unsigned d, double q);
double p_undetected_informed(unsigned n, unsigned d, double q);

struct SweepRow {
  unsigned n = 0;
  unsigned d = 0;
  double mean_fidelity = 0.0;
  double mean_counterfeit_prob = 0.0;
};

/// Row-major grid, n outer, d inner; both ranges inclusive.
std::vector<SweepRow> sweep_surfaces(unsigned n_min, unsigned n_max, unsigned d_min,
                                     unsigned d_max);

inline constexpr const char* kSweepCsvHeader = "n,d,mean_fidelity,mean_counterfeit_prob";

// Shortest round-trip decimal form.
std::string format_double(double x);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace qrouter::analytics
