#include "qrouter/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <type_traits>
#include <variant>

#include "qrouter/analytics.hpp"
#include "qrouter/optics.hpp"

namespace qrouter::harness {

namespace {

void accumulate(CampaignTotals& t, const auth::SessionResult& result) {
  ++t.sessions;
  if (!result.detected) ++t.undetected_sessions;
  for (const auto& r : result.rounds) {
    const bool attacked = r.eve_action != auth::EveAction::None;
    ++t.rounds;
    if (r.survived_channel) ++t.survived_rounds;
    if (attacked) ++t.attacked_rounds;
    if (r.failed()) ++t.failed_rounds;
    if (r.discarded_by_eve) ++t.discarded_rounds;
    if (r.is_decoy) {
      if (attacked) {
        ++t.attacked_decoy_rounds;
        if (r.failed()) ++t.failed_attacked_decoy_rounds;
      }
    } else {
      ++t.message_rounds;
      if (attacked) {
        ++t.attacked_message_rounds;
        if (r.failed()) ++t.failed_attacked_message_rounds;
        if (r.discarded_by_eve) ++t.discarded_attacked_message_rounds;
      }
    }
    if (r.delivered_message_fidelity) {
      ++t.delivered_message_rounds;
      t.delivered_fidelity_sum += *r.delivered_message_fidelity;
      t.delivered_fidelity_sq_sum += *r.delivered_message_fidelity * *r.delivered_message_fidelity;
    }
  }
}

Amplitude parse_amplitude(std::string text) {
  std::erase(text, ' ');
  if (text.empty()) throw std::invalid_argument("empty amplitude");
  auto to_double = [](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
    return v;
  };
  if (text.back() != 'i') return {to_double(text), 0.0};
  const std::string body = text.substr(0, text.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, to_double(body)};
  return {to_double(body.substr(0, split)), to_double(body.substr(split))};
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  return parts;
}

nlohmann::ordered_json amplitudes_json(std::span<const Amplitude> amps) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& a : amps) arr.push_back({a.real(), a.imag()});
  return arr;
}

}  // namespace

void CampaignTotals::merge(const CampaignTotals& o) {
  sessions += o.sessions;
  undetected_sessions += o.undetected_sessions;
  rounds += o.rounds;
  survived_rounds += o.survived_rounds;
  attacked_rounds += o.attacked_rounds;
  failed_rounds += o.failed_rounds;
  discarded_rounds += o.discarded_rounds;
  attacked_decoy_rounds += o.attacked_decoy_rounds;
  failed_attacked_decoy_rounds += o.failed_attacked_decoy_rounds;
  message_rounds += o.message_rounds;
  attacked_message_rounds += o.attacked_message_rounds;
  failed_attacked_message_rounds += o.failed_attacked_message_rounds;
  discarded_attacked_message_rounds += o.discarded_attacked_message_rounds;
  delivered_message_rounds += o.delivered_message_rounds;
  delivered_fidelity_sum += o.delivered_fidelity_sum;
  delivered_fidelity_sq_sum += o.delivered_fidelity_sq_sum;
}

CampaignTotals run_campaign(const auth::SessionConfig& base, std::uint64_t sessions,
                            std::uint64_t master_seed, unsigned threads) {
  base.validate();
  const std::uint64_t blocks = (sessions + kBlockSize - 1) / kBlockSize;
  std::vector<CampaignTotals> per_block(blocks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    try {
      for (std::uint64_t b = next++; b < blocks; b = next++) {
        auth::SessionConfig config = base;
        const std::uint64_t end = std::min(sessions, (b + 1) * kBlockSize);
        for (std::uint64_t i = b * kBlockSize; i < end; ++i) {
          config.seed = derive_seed(master_seed, i);
          accumulate(per_block[b], auth::run_session(config));
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  CampaignTotals total;
  for (const auto& b : per_block) total.merge(b);
  return total;
}

ChannelTrialCounts run_channel_trials(double tau, std::uint64_t trials, std::uint64_t seed) {
  const optics::ChannelModel channel(tau);
  Rng rng(seed);
  const DualRailState routed =
      optics::route(polarization::H(), polarization::diagonal());
  const optics::PhotonPair pair{polarization::H(), polarization::diagonal()};
  ChannelTrialCounts counts;
  counts.trials = trials;
  for (std::uint64_t i = 0; i < trials; ++i) {
    if (optics::lossy_channel(routed, channel, rng)) ++counts.routed_survived;
    if (optics::lossy_channel(pair, channel, rng)) ++counts.pair_survived;
  }
  return counts;
}

bool within_binomial_band(std::uint64_t hits, std::uint64_t trials, double p, double sigma) {
  if (trials == 0) return false;
  if (p <= 0.0) return hits == 0;
  if (p >= 1.0) return hits == trials;
  const double observed = static_cast<double>(hits) / static_cast<double>(trials);
  return std::abs(observed - p) <= sigma * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

void Report::add_rate(const std::string& name, std::uint64_t hits, std::uint64_t trials,
                      std::optional<double> expected) {
  Estimate e;
  e.name = name;
  e.samples = trials;
  e.value = trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0;
  const double p = expected.value_or(e.value);
  e.std_error = trials ? std::sqrt(p * (1.0 - p) / static_cast<double>(trials)) : 0.0;
  e.analytic = expected;
  if (expected) {
    e.pass = within_binomial_band(hits, trials, *expected, sigma_level);
    pass = pass && *e.pass;
  }
  estimates.push_back(e);
}

void Report::add_analytic(const std::string& name, double value) {
  analytic.push_back({name, value});
}

nlohmann::ordered_json Report::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["seed"] = seed;
  auto est = nlohmann::ordered_json::array();
  for (const auto& e : estimates) {
    nlohmann::ordered_json row;
    row["name"] = e.name;
    row["value"] = e.value;
    row["std_error"] = e.std_error;
    row["samples"] = e.samples;
    row["analytic"] = e.analytic ? nlohmann::ordered_json(*e.analytic) : nullptr;
    row["pass"] = e.pass ? nlohmann::ordered_json(*e.pass) : nullptr;
    est.push_back(row);
  }
  j["estimates"] = est;
  auto an = nlohmann::ordered_json::array();
  for (const auto& a : analytic) an.push_back({{"name", a.name}, {"value", a.value}});
  j["analytic"] = an;
  j["sigma_level"] = sigma_level;
  j["pass"] = pass;
  if (!details.empty()) j["details"] = details;
  return j;
}

std::string Report::to_csv() const {
  std::ostringstream out;
  out << "kind,name,value,std_error,samples,analytic,pass\n";
  for (const auto& e : estimates) {
    out << "estimate," << e.name << ',' << analytics::format_double(e.value) << ','
        << analytics::format_double(e.std_error) << ',' << e.samples << ','
        << (e.analytic ? analytics::format_double(*e.analytic) : "") << ','
        << (e.pass ? (*e.pass ? "true" : "false") : "") << '\n';
  }
  for (const auto& a : analytic)
    out << "analytic," << a.name << ',' << analytics::format_double(a.value) << ",,,,\n";
  return out.str();
}

auth::AdversaryStrategy parse_strategy(const std::string& name, double attack_probability) {
  auth::AdversaryStrategy s;
  s.attack_probability = attack_probability;
  if (name == "none") s.kind = auth::NoAdversary{};
  else if (name == "blind") s.kind = auth::BlindForge{};
  else if (name == "blind-oracle") s.kind = auth::BlindForge{true};
  else if (name == "informed") s.kind = auth::InformedForge{};
  else if (name == "pauli-x") s.kind = auth::PauliNoise{PauliAxis::X};
  else if (name == "pauli-y") s.kind = auth::PauliNoise{PauliAxis::Y};
  else if (name == "pauli-z") s.kind = auth::PauliNoise{PauliAxis::Z};
  else throw std::invalid_argument("unknown strategy '" + name + "'");
  return s;
}

Report cmd_analyze(const AnalyzeOptions& o) {
  if (o.n < 1) throw std::invalid_argument("analyze: n must be >= 1");
  const auth::AdversaryStrategy strategy = parse_strategy(o.strategy);
  Report r;
  r.command = "analyze";
  r.details["n"] = o.n;
  r.details["d"] = o.d;
  r.details["strategy"] = o.strategy;

  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, auth::BlindForge> || std::is_same_v<S, auth::NoAdversary>) {
          r.add_analytic("p_c_blind", analytics::p_c_blind(o.n));
          r.add_analytic("p_c_all_attacked",
                         analytics::p_c({o.n, o.d, o.n + o.d, o.d}));
        } else if constexpr (std::is_same_v<S, auth::InformedForge>) {
          r.add_analytic("p_c_informed", analytics::p_c_informed(o.n));
          r.add_analytic("p_c_informed_decoy", analytics::p_c_informed_decoy(o.n, o.d));
        } else if constexpr (std::is_same_v<S, auth::PauliNoise>) {
          const double p = analytics::pauli_detection_prob(s.axis);
          r.add_analytic("pauli_detection_prob", p);
          r.add_analytic("p_undetected_message", std::pow(1.0 - p, o.n));
        }
      },
      strategy.kind);
  r.add_analytic("mean_fidelity", analytics::mean_fidelity(o.n, o.d));
  r.add_analytic("eta", analytics::eta(o.n, o.d));
  r.add_analytic("mean_counterfeit_prob", analytics::mean_counterfeit_prob(o.n, o.d));
  if (o.tau) {
    r.add_analytic("channel_success_routed", analytics::channel_success(*o.tau, true));
    r.add_analytic("channel_success_separate", analytics::channel_success(*o.tau, false));
  }
  return r;
}

Report cmd_simulate(const SimulateOptions& o) {
  if (o.trials < 1) throw std::invalid_argument("simulate: trials must be >= 1");
  if (o.n < 1) throw std::invalid_argument("simulate: n must be >= 1");
  auth::SessionConfig config;
  config.n = o.n;
  config.d = o.d;
  config.tau = o.tau;
  config.adversary = parse_strategy(o.strategy, o.attack_probability);
  config.decoy_verify = o.decoy_verify;

  const CampaignTotals t = run_campaign(config, o.trials, o.seed, o.threads);
  const double q = o.attack_probability;

  Report r;
  r.command = "simulate";
  r.seed = o.seed;
  r.sigma_level = o.sigma_level;
  r.details["n"] = o.n;
  r.details["d"] = o.d;
  r.details["tau"] = o.tau;
  r.details["strategy"] = config.adversary.name();
  r.details["attack_probability"] = q;
  r.details["trials"] = o.trials;
  r.details["decoy_verify"] = o.decoy_verify;

  std::optional<double> undetected;
  std::optional<double> message_detection;
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, auth::NoAdversary>) {
          undetected = 1.0;
        } else if constexpr (std::is_same_v<S, auth::BlindForge>) {
          if (s.knows_convention) {
            if (o.d == 0) undetected = 1.0;
            message_detection = 0.0;
          } else {
            undetected = analytics::p_undetected_blind(o.n, o.d, q);
            message_detection = 0.25;
          }
        } else if constexpr (std::is_same_v<S, auth::InformedForge>) {
          undetected = analytics::p_undetected_informed(o.n, o.d, q);
          message_detection = 0.125;
        } else if constexpr (std::is_same_v<S, auth::PauliNoise>) {
          const double p = analytics::pauli_detection_prob(s.axis);
          if (o.d == 0) undetected = std::pow(1.0 - q * p, o.n);
          message_detection = p;
        }
      },
      config.adversary.kind);

  r.add_rate("undetected_session_rate", t.undetected_sessions, t.sessions, undetected);
  r.add_rate("detected_session_rate", t.sessions - t.undetected_sessions, t.sessions,
             undetected ? std::optional(1.0 - *undetected) : std::nullopt);
  r.add_rate("survival_rate", t.survived_rounds, t.rounds, analytics::channel_success(o.tau, true));
  if (!config.adversary.is_none()) {
    r.add_rate("attacked_message_detection_rate", t.failed_attacked_message_rounds,
               t.attacked_message_rounds, message_detection);
    if (std::holds_alternative<auth::InformedForge>(config.adversary.kind))
      r.add_rate("attacked_message_discard_rate", t.discarded_attacked_message_rounds,
                 t.attacked_message_rounds, 0.25);
    if (o.d > 0)
      r.add_rate("attacked_decoy_detection_rate", t.failed_attacked_decoy_rounds,
                 t.attacked_decoy_rounds, std::nullopt);
  }

  Estimate fid;
  fid.name = "delivered_fidelity";
  fid.samples = t.delivered_message_rounds;
  if (t.delivered_message_rounds > 0) {
    const double count = static_cast<double>(t.delivered_message_rounds);
    fid.value = t.delivered_fidelity_sum / count;
    const double var = std::max(0.0, t.delivered_fidelity_sq_sum / count - fid.value * fid.value);
    fid.std_error = std::sqrt(var / count);
  }
  if (config.adversary.is_none()) {
    fid.analytic = 1.0;
    fid.pass = t.delivered_message_rounds == 0 || std::abs(fid.value - 1.0) <= 1e-9;
    r.pass = r.pass && *fid.pass;
  }
  r.estimates.push_back(fid);

  for (const auto& e : r.estimates)
    if (e.analytic) r.add_analytic(e.name, *e.analytic);
  return r;
}

void cmd_sweep(const SweepOptions& o, std::ostream& out) {
  analytics::write_sweep_csv(out, analytics::sweep_surfaces(o.n_min, o.n_max, o.d_min, o.d_max));
}

TwoQubitState parse_two_qubit_state(const std::string& text) {
  if (const auto named = bell::parse_outcome(text)) return bell::bell_state(*named);
  if (text.size() == 2 && (text[0] == '0' || text[0] == '1') && (text[1] == '0' || text[1] == '1')) {
    TwoQubitState s;
    s[two_qubit_index(text[0] - '0', text[1] - '0')] = 1.0;
    return s;
  }
  const auto parts = split_commas(text);
  if (parts.size() != 4)
    throw std::invalid_argument("state must be a Bell name, a label 00..11, or 4 amplitudes");
  TwoQubitState s;
  for (std::size_t i = 0; i < 4; ++i) s[i] = parse_amplitude(parts[i]);
  if (!s.is_finite() || !(s.norm_sq() > 0.0))
    throw std::invalid_argument("state amplitudes must be finite and not all zero");
  return s.normalized();
}

bell::BellFilter parse_filter(const std::string& text) {
  const auto parts = split_commas(text);
  if (parts.size() != 8) throw std::invalid_argument("filter needs 8 values t1,p1,...,t4,p4");
  bell::BellFilter f;
  for (std::size_t m = 0; m < 4; ++m) {
    f.tau[m] = std::stod(parts[2 * m]);
    f.phi[m] = std::stod(parts[2 * m + 1]);
  }
  f.validate();
  return f;
}

Report cmd_bell_demo(const BellDemoOptions& o) {
  if (o.trials < 1) throw std::invalid_argument("bell-demo: trials must be >= 1");
  const TwoQubitState input = parse_two_qubit_state(o.state);
  Report r;
  r.command = "bell-demo";
  r.seed = o.seed;
  r.sigma_level = o.sigma_level;
  r.details["input"] = amplitudes_json(input.amplitudes());
  r.details["input_bell"] = amplitudes_json(bell::to_bell_basis(input).amplitudes());

  const auto probs = bell::outcome_probabilities(input);
  std::array<std::uint64_t, 4> counts{};
  Rng rng(o.seed);
  for (std::uint64_t i = 0; i < o.trials; ++i)
    ++counts[static_cast<std::size_t>(bell::discriminate(input, rng))];
  for (const auto m : bell::kAllOutcomes) {
    const auto i = static_cast<std::size_t>(m);
    r.add_rate(std::string("p_") + std::string(bell::to_string(m)), counts[i], o.trials, probs[i]);
  }

  if (o.filter) {
    const bell::BellFilter filter = parse_filter(*o.filter);
    const bell::Manipulation out = bell::manipulate(input, filter);
    const TwoQubitState optical = bell::manipulate_optical(input, filter);
    double deviation = 0.0;
    for (std::size_t i = 0; i < 4; ++i) deviation = std::max(deviation, std::abs(optical[i] - out.filtered[i]));
    nlohmann::ordered_json m;
    m["success_probability"] = out.success_probability;
    m["filtered"] = amplitudes_json(out.filtered.amplitudes());
    m["normalized"] = out.normalized ? amplitudes_json(out.normalized->amplitudes())
                                     : nlohmann::ordered_json(nullptr);
    if (out.normalized)
      m["normalized_bell"] = amplitudes_json(bell::to_bell_basis(*out.normalized).amplitudes());
    m["optical_pipeline_max_deviation"] = deviation;
    r.details["manipulation"] = m;
    r.add_analytic("success_probability", out.success_probability);
  }
  for (const auto m : bell::kAllOutcomes)
    r.add_analytic(std::string("p_") + std::string(bell::to_string(m)),
                   probs[static_cast<std::size_t>(m)]);
  return r;
}

}  // namespace qrouter::harness
