#pragma once

// Monte Carlo campaigns and report generation behind the command-line tool.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrouter/auth.hpp"
#include "qrouter/bell.hpp"

namespace qrouter::harness {

// Sessions are grouped into fixed-size blocks; each block is reduced in order
// and blocks are combined in index order, so totals do not depend on the
// number of worker threads.
inline constexpr std::uint64_t kBlockSize = 4096;

struct CampaignTotals {
  std::uint64_t sessions = 0;
  std::uint64_t undetected_sessions = 0;
  std::uint64_t rounds = 0;
  std::uint64_t survived_rounds = 0;
  std::uint64_t attacked_rounds = 0;
  std::uint64_t failed_rounds = 0;
  std::uint64_t discarded_rounds = 0;
  std::uint64_t attacked_decoy_rounds = 0;
  std::uint64_t failed_attacked_decoy_rounds = 0;
  std::uint64_t message_rounds = 0;
  std::uint64_t attacked_message_rounds = 0;
  std::uint64_t failed_attacked_message_rounds = 0;
  std::uint64_t discarded_attacked_message_rounds = 0;
  std::uint64_t delivered_message_rounds = 0;
  double delivered_fidelity_sum = 0.0;
  double delivered_fidelity_sq_sum = 0.0;

  void merge(const CampaignTotals& other);
};

/// Session i runs with seed derive_seed(master_seed, i); `base.seed` is ignored.
CampaignTotals run_campaign(const auth::SessionConfig& base, std::uint64_t sessions,
                            std::uint64_t master_seed, unsigned threads = 1);

// Routed single photon vs. two separate photons through the same line.
struct ChannelTrialCounts {
  std::uint64_t trials = 0;
  std::uint64_t routed_survived = 0;
  std::uint64_t pair_survived = 0;
};

ChannelTrialCounts run_channel_trials(double tau, std::uint64_t trials, std::uint64_t seed);

struct Estimate {
  std::string name;
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::optional<double> analytic;  // closed-form counterpart, when one exists
  std::optional<bool> pass;
};

struct AnalyticValue {
  std::string name;
  double value = 0.0;
};

struct Report {
  std::string command;
  std::uint64_t seed = 0;
  std::vector<Estimate> estimates;
  std::vector<AnalyticValue> analytic;
  double sigma_level = 5.0;
  bool pass = true;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();

  /// Appends a binomial-rate estimate compared against `expected` within
  /// sigma_level standard errors of the expected rate.
  void add_rate(const std::string& name, std::uint64_t hits, std::uint64_t trials,
                std::optional<double> expected);
  void add_analytic(const std::string& name, double value);

  nlohmann::ordered_json to_json() const;
  std::string to_csv() const;
};

// Rate comparison used everywhere a Monte Carlo frequency is checked against a
// probability: |hits/trials - p| <= sigma * sqrt(p(1-p)/trials).
bool within_binomial_band(std::uint64_t hits, std::uint64_t trials, double p, double sigma);

// Strategy names accepted on the command line: none, blind, informed,
// pauli-x, pauli-y, pauli-z.
auth::AdversaryStrategy parse_strategy(const std::string& name, double attack_probability = 1.0);

struct AnalyzeOptions {
  unsigned n = 10;
  unsigned d = 0;
  std::string strategy = "blind";
  std::optional<double> tau;
};

Report cmd_analyze(const AnalyzeOptions& options);

struct SimulateOptions {
  unsigned n = 10;
  unsigned d = 0;
  double tau = 1.0;
  std::string strategy = "blind";
  double attack_probability = 1.0;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  bool decoy_verify = true;
  double sigma_level = 5.0;
  unsigned threads = 1;
};

Report cmd_simulate(const SimulateOptions& options);

struct SweepOptions {
  unsigned n_min = 1;
  unsigned n_max = 20;
  unsigned d_min = 0;
  unsigned d_max = 20;
};

void cmd_sweep(const SweepOptions& options, std::ostream& out);

struct BellDemoOptions {
  std::string state = "phi+";
  std::optional<std::string> filter;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  double sigma_level = 5.0;
};

// Named Bell state (phi-, phi+, psi-, psi+ or PhiMinus, ...), computational
// label (00, 01, 10, 11), or four comma-separated amplitudes such as
// "1,0,0,1" or "0.5,0.5i,-0.5,0.5-0i". Amplitudes are normalized.
TwoQubitState parse_two_qubit_state(const std::string& text);
// "t1,p1,t2,p2,t3,p3,t4,p4".
bell::BellFilter parse_filter(const std::string& text);

Report cmd_bell_demo(const BellDemoOptions& options);

}  // namespace qrouter::harness
