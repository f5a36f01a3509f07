// Experiment runner for the RIMSA transceiver-optimization library: Monte
// Carlo sweeps to CSV/JSON, plus single-run convergence traces.

#include "rimsa/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

struct CommonFlags {
  std::string config_path;
  std::string scenario;
  std::string snr;
  int trials = -1;
  std::int64_t seed = -1;
  std::string out;
  bool small = false;
  int threads = -1;
  int outer_iters = -1;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("-c,--config", flags.config_path, "Experiment config file");
  cmd->add_option("--scenario", flags.scenario, "miso or mimo")
      ->check(CLI::IsMember({"miso", "mimo"}));
  cmd->add_option("--snr", flags.snr, "Comma-separated SNR grid in dB");
  cmd->add_option("--trials", flags.trials, "Channel realizations per point");
  cmd->add_option("--seed", flags.seed, "Master seed");
  cmd->add_option("--out", flags.out, "Output path");
  cmd->add_flag("--small", flags.small, "Quarter-scale dimensions for quick runs");
  cmd->add_option("--threads", flags.threads, "Worker threads (0 = all cores)");
  cmd->add_option("--outer-iters", flags.outer_iters, "Outer iteration budget");
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(csv);
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

void apply_small_preset(rimsa::ExperimentConfig& cfg) {
  cfg.miso.n_rf = 4;
  cfg.miso.n_per_rimsa = 4;
  cfg.miso.n_users = 2;
  cfg.miso.n_rx = 2;
  cfg.miso.noise_vars = rimsa::VecD::Ones(2);
  cfg.mimo.n_rf_tx = 4;
  cfg.mimo.n_per_rimsa_tx = 2;
  cfg.mimo.n_users = 2;
  cfg.mimo.n_rf_rx = 2;
  cfg.mimo.n_per_rimsa_rx = 2;
  cfg.mimo.n_streams = 2;
}

rimsa::ExperimentConfig build_config(const CommonFlags& flags) {
  rimsa::ExperimentConfig cfg;
  if (!flags.config_path.empty()) cfg = rimsa::load_config_file(flags.config_path);
  if (flags.small) apply_small_preset(cfg);
  if (!flags.scenario.empty())
    cfg.scenario = flags.scenario == "miso" ? rimsa::Scenario::miso : rimsa::Scenario::mimo;
  if (!flags.snr.empty()) cfg.snr_db = parse_grid(flags.snr);
  if (flags.trials >= 0) cfg.trials = flags.trials;
  if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
  if (!flags.out.empty()) cfg.out_path = flags.out;
  if (flags.threads >= 0) cfg.threads = flags.threads;
  if (flags.outer_iters >= 0) cfg.outer_iters = flags.outer_iters;
  return cfg;
}

int cmd_run(const CommonFlags& flags) {
  rimsa::ExperimentConfig cfg = build_config(flags);
  cfg.validate();
  const auto records = rimsa::run_experiment(cfg);
  rimsa::emit_results(records, cfg.out_path);
  std::cout << "wrote " << records.size() << " records to " << cfg.out_path << "\n";
  return 0;
}

int cmd_trace(const CommonFlags& flags) {
  rimsa::ExperimentConfig cfg = build_config(flags);
  if (cfg.snr_db.size() != 1)
    throw std::runtime_error("trace: exactly one --snr value expected");
  cfg.validate();

  const double power = std::pow(10.0, cfg.snr_db[0] / 10.0);
  rimsa::Rng channel_rng(rimsa::trial_seed(cfg.seed, 0, 0, 0));
  rimsa::Rng solver_rng(rimsa::trial_seed(cfg.seed, 0, 0, 1));

  std::vector<double> trace;
  if (cfg.scenario == rimsa::Scenario::miso) {
    rimsa::MisoConfig mc = cfg.miso;
    if (mc.noise_vars.size() != mc.n_users) mc.noise_vars = rimsa::VecD::Ones(mc.n_users);
    mc.power = power;
    const auto ch = rimsa::sample_multiuser_channel(channel_rng, rimsa::upa_for(mc.n_t()),
                                                    rimsa::upa_for(mc.n_rx), mc.n_users,
                                                    cfg.n_paths_miso);
    trace = rimsa::fp_pmo(ch, mc, cfg.outer_iters, cfg.rcg, solver_rng).rate_trace;
  } else {
    rimsa::MimoConfig mc = cfg.mimo;
    mc.power = power;
    const auto ch = rimsa::sample_multiuser_channel(channel_rng, rimsa::upa_for(mc.n_t()),
                                                    rimsa::upa_for(mc.n_r()), mc.n_users,
                                                    cfg.n_paths_mimo);
    trace = rimsa::wmmse_pmo(ch, mc, cfg.outer_iters, cfg.rcg, solver_rng).rate_trace;
  }
  rimsa::emit_convergence_trace(trace, cfg.out_path);
  std::cout << "wrote " << trace.size() << " trace points to " << cfg.out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint digital/analog transceiver optimization for metasurface antenna arrays"};
  app.require_subcommand(1);

  CommonFlags run_flags, trace_flags;
  CLI::App* run = app.add_subcommand("run", "Run a Monte Carlo experiment and write CSV/JSON");
  add_common_flags(run, run_flags);
  CLI::App* trace =
      app.add_subcommand("trace", "Run one solver instance and write its convergence trace");
  add_common_flags(trace, trace_flags);

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(run_flags);
    if (trace->parsed()) return cmd_trace(trace_flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
