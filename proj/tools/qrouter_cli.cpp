// Command-line front end: closed-form analysis, Monte Carlo campaigns, analytic
// sweeps and Bell-state demonstrations.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qrouter/harness.hpp"

namespace {

using qrouter::harness::Report;

int emit(const Report& report, const std::string& format, const std::string& out_path) {
  const std::string text = format == "csv" ? report.to_csv() : report.to_json().dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "error: cannot open " << out_path << "\n";
      return 2;
    }
    out << text;
  }
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Router-based quantum authentication and Bell-state manipulation simulator"};
  app.require_subcommand(1);

  std::string format = "json";
  std::string out_path;

  qrouter::harness::AnalyzeOptions analyze;
  double analyze_tau = -1.0;
  auto* cmd_analyze = app.add_subcommand("analyze", "Evaluate closed-form security figures");
  cmd_analyze->add_option("--n", analyze.n, "Message length")->required();
  cmd_analyze->add_option("--d", analyze.d, "Decoy count");
  cmd_analyze->add_option("--strategy", analyze.strategy, "Adversary strategy")
      ->check(CLI::IsMember({"blind", "informed", "pauli-x", "pauli-y", "pauli-z"}));
  cmd_analyze->add_option("--tau", analyze_tau, "Channel amplitude transmissivity")
      ->check(CLI::Range(0.0, 1.0));
  cmd_analyze->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  cmd_analyze->add_option("--out", out_path, "Write the report here instead of stdout");

  qrouter::harness::SimulateOptions simulate;
  std::string transcript_path;
  std::uint64_t transcript_sessions = 1;
  auto* cmd_simulate = app.add_subcommand("simulate", "Run a Monte Carlo campaign");
  cmd_simulate->add_option("--n", simulate.n, "Message length")->required();
  cmd_simulate->add_option("--d", simulate.d, "Decoy count");
  cmd_simulate->add_option("--tau", simulate.tau, "Channel amplitude transmissivity")
      ->check(CLI::Range(0.0, 1.0));
  cmd_simulate->add_option("--strategy", simulate.strategy, "Adversary strategy")
      ->check(CLI::IsMember({"none", "blind", "blind-oracle", "informed", "pauli-x", "pauli-y",
                             "pauli-z"}));
  cmd_simulate->add_option("--attack-prob", simulate.attack_probability,
                           "Probability that Eve attacks a given qubit")
      ->check(CLI::Range(0.0, 1.0));
  cmd_simulate->add_option("--trials", simulate.trials, "Number of sessions")
      ->check(CLI::PositiveNumber);
  cmd_simulate->add_option("--seed", simulate.seed, "Master seed");
  cmd_simulate->add_flag("--decoy-verify,!--no-decoy-verify", simulate.decoy_verify,
                         "Verify decoy positions against the announced decoy state (default on)");
  cmd_simulate->add_option("--sigma", simulate.sigma_level, "Pass band in standard errors")
      ->check(CLI::PositiveNumber);
  cmd_simulate->add_option("--threads", simulate.threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  cmd_simulate->add_option("--transcript", transcript_path,
                           "Write per-round JSON lines for the first sessions");
  cmd_simulate->add_option("--transcript-sessions", transcript_sessions,
                           "How many sessions to include in the transcript");
  cmd_simulate->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  cmd_simulate->add_option("--out", out_path, "Write the report here instead of stdout");

  qrouter::harness::SweepOptions sweep;
  std::string sweep_out;
  auto* cmd_sweep = app.add_subcommand("sweep", "Tabulate mean fidelity and counterfeit probability");
  cmd_sweep->add_option("--n-max", sweep.n_max, "Largest message length")->required();
  cmd_sweep->add_option("--d-max", sweep.d_max, "Largest decoy count")->required();
  cmd_sweep->add_option("--n-min", sweep.n_min, "Smallest message length");
  cmd_sweep->add_option("--d-min", sweep.d_min, "Smallest decoy count");
  cmd_sweep->add_option("--out", sweep_out, "CSV output path")->required();

  qrouter::harness::BellDemoOptions bell;
  std::string filter;
  auto* cmd_bell = app.add_subcommand("bell-demo", "Bell discrimination and manipulation");
  cmd_bell->add_option("--state", bell.state, "Bell name, 00..11, or a1,a2,a3,a4")->required();
  cmd_bell->add_option("--filter", filter, "t1,p1,t2,p2,t3,p3,t4,p4");
  cmd_bell->add_option("--trials", bell.trials, "Sampled detections")->check(CLI::PositiveNumber);
  cmd_bell->add_option("--seed", bell.seed, "Seed");
  cmd_bell->add_option("--sigma", bell.sigma_level, "Pass band in standard errors");
  cmd_bell->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  cmd_bell->add_option("--out", out_path, "Write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    int status = 0;
    if (*cmd_analyze) {
      if (analyze_tau >= 0.0) analyze.tau = analyze_tau;
      status = emit(qrouter::harness::cmd_analyze(analyze), format, out_path);
    } else if (*cmd_simulate) {
      const Report report = qrouter::harness::cmd_simulate(simulate);
      if (!transcript_path.empty()) {
        std::ofstream out(transcript_path);
        qrouter::auth::SessionConfig config;
        config.n = simulate.n;
        config.d = simulate.d;
        config.tau = simulate.tau;
        config.adversary =
            qrouter::harness::parse_strategy(simulate.strategy, simulate.attack_probability);
        config.decoy_verify = simulate.decoy_verify;
        for (std::uint64_t i = 0; i < std::min(transcript_sessions, simulate.trials); ++i) {
          config.seed = qrouter::derive_seed(simulate.seed, i);
          qrouter::auth::write_transcript(out, qrouter::auth::run_session(config), i);
        }
      }
      status = emit(report, format, out_path);
    } else if (*cmd_sweep) {
      std::ofstream out(sweep_out);
      if (!out) {
        std::cerr << "error: cannot open " << sweep_out << "\n";
        return 2;
      }
      qrouter::harness::cmd_sweep(sweep, out);
    } else if (*cmd_bell) {
      if (!filter.empty()) bell.filter = filter;
      status = emit(qrouter::harness::cmd_bell_demo(bell), format, out_path);
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    std::cerr << "wall-clock: " << elapsed.count() << " s\n";
    return status;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
