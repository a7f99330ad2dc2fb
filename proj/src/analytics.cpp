#include "qrouter/analytics.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace qrouter::analytics {

namespace {

BigInt pow_int(unsigned base, unsigned exponent) {
  BigInt result = 1;
  for (unsigned i = 0; i < exponent; ++i) result *= base;
  return result;
}

struct PairSums {
  double weight = 0.0;     // sum g P_C
  double deficit = 0.0;    // sum g P_C (k-m)/(2n)
  double fidelity = 0.0;   // sum g P_C F(k,m,n)
};

PairSums pair_sums(unsigned n, unsigned d, const AttackWeight& g) {
  if (n < 1) throw std::invalid_argument("mean fidelity: n must be >= 1");
  PairSums s;
  for (unsigned k = 0; k <= n + d; ++k) {
    const double gk = g(k);
    AttackTallyParams p{n, d, k, 0};
    for (p.m = p.m_min(); p.m <= p.m_max(); ++p.m) {
      const double pc = gk * p_c(p);
      s.weight += pc;
      s.deficit += pc * static_cast<double>(k - p.m) / (2.0 * n);
      s.fidelity += pc * fidelity_cond(k, p.m, n);
    }
  }
  return s;
}

}  // namespace

void AttackTallyParams::validate() const {
  if (k > n + d) throw std::invalid_argument("attack tally: k exceeds n + d");
  if (m < m_min() || m > m_max())
    throw std::invalid_argument("attack tally: m outside [max(0, k-n), min(d, k)]");
}

BigInt binomial_exact(unsigned n, unsigned k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt result = 1;
  for (unsigned i = 1; i <= k; ++i) {
    result *= n - k + i;
    result /= i;
  }
  return result;
}

double log_binomial(unsigned n, unsigned k) {
  if (k > n) throw std::invalid_argument("log_binomial: k > n");
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double p_c_blind(unsigned n) { return std::pow(0.75, n); }

Rational p_c_exact(const AttackTallyParams& p) {
  p.validate();
  const BigInt num = pow_int(3, p.k) * binomial_exact(p.d, p.m) * binomial_exact(p.n, p.k - p.m);
  const BigInt den = pow_int(4, p.k) * pow_int(2, p.m) * binomial_exact(p.n + p.d, p.k);
  return Rational(num, den);
}

double p_c_log(const AttackTallyParams& p) {
  p.validate();
  const double log_value = p.k * std::log(3.0) + log_binomial(p.d, p.m) +
                           log_binomial(p.n, p.k - p.m) - p.k * std::log(4.0) -
                           p.m * std::log(2.0) - log_binomial(p.n + p.d, p.k);
  return std::exp(log_value);
}

double p_c(const AttackTallyParams& p) {
  if (p.n + p.d <= kExactLimit) return p_c_exact(p).convert_to<double>();
  return p_c_log(p);
}

double fidelity_cond(unsigned k, unsigned m, unsigned n) {
  if (n < 1) throw std::invalid_argument("fidelity_cond: n must be >= 1");
  if (m > k || k - m > n) throw std::invalid_argument("fidelity_cond: need 0 <= k-m <= n");
  return 1.0 - static_cast<double>(k - m) / (2.0 * n);
}

double uniform_weight(unsigned) { return 1.0; }

double mean_fidelity(unsigned n, unsigned d, const AttackWeight& g) {
  const PairSums s = pair_sums(n, d, g);
  return s.fidelity / s.weight;
}

double eta(unsigned n, unsigned d, const AttackWeight& g) {
  const PairSums s = pair_sums(n, d, g);
  return s.deficit / s.weight;
}

double mean_counterfeit_prob(unsigned n, unsigned d) {
  if (n < 1) throw std::invalid_argument("mean_counterfeit_prob: n must be >= 1");
  double total = 0.0;
  std::size_t pairs = 0;
  for (unsigned k = 0; k <= n + d; ++k) {
    AttackTallyParams p{n, d, k, 0};
    for (p.m = p.m_min(); p.m <= p.m_max(); ++p.m) {
      total += p_c(p);
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

double p_c_informed(unsigned n) { return std::pow(0.875, n); }

double p_c_informed_decoy(unsigned n, unsigned d) { return std::pow(0.875, n) * std::pow(0.5, d); }

double pauli_detection_prob(PauliAxis axis) {
  // Half the time Eve hits the key; sigma_x (sigma_y) then leaves the r = 0
  // (r = 1) key unchanged and flips the other, sigma_z flips both.
  switch (axis) {
    case PauliAxis::X: return 0.25;
    case PauliAxis::Y: return 0.25;
    case PauliAxis::Z: return 0.5;
  }
  throw std::invalid_argument("pauli_detection_prob: unknown axis");
}

double channel_success(double tau, bool routed) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("channel_success: tau outside [0, 1]");
  const double single = tau * tau;
  return routed ? single : single * single;
}

double p_undetected_blind(unsigned n, unsigned d, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("attack probability outside [0, 1]");
  const unsigned total = n + d;
  double result = 0.0;
  for (unsigned k = 0; k <= total; ++k) {
    const double gk = std::exp(log_binomial(total, k)) * std::pow(q, k) * std::pow(1.0 - q, total - k);
    if (gk == 0.0) continue;
    AttackTallyParams p{n, d, k, 0};
    double pass = 0.0;
    for (p.m = p.m_min(); p.m <= p.m_max(); ++p.m) pass += p_c(p);
    result += gk * pass;
  }
  return result;
}

double p_undetected_informed(unsigned n, unsigned d, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("attack probability outside [0, 1]");
  return std::pow(1.0 - q / 8.0, n) * std::pow(1.0 - q / 2.0, d);
}

std::vector<SweepRow> sweep_surfaces(unsigned n_min, unsigned n_max, unsigned d_min,
                                     unsigned d_max) {
  if (n_min < 1 || n_min > n_max || d_min > d_max)
    throw std::invalid_argument("sweep_surfaces: empty or invalid range");
  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>(n_max - n_min + 1) * (d_max - d_min + 1));
  for (unsigned n = n_min; n <= n_max; ++n)
    for (unsigned d = d_min; d <= d_max; ++d)
      rows.push_back({n, d, mean_fidelity(n, d), mean_counterfeit_prob(n, d)});
  return rows;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.n << ',' << r.d << ',' << format_double(r.mean_fidelity) << ','
        << format_double(r.mean_counterfeit_prob) << '\n';
  }
}

}  // namespace qrouter::analytics
