#pragma once

#include "rimsa/mimo.hpp"
#include "rimsa/miso.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rimsa {

enum class Scenario { miso, mimo };
enum class SweepKind { none, rf_chains, users, csi_error };

std::string to_string(Scenario s);
std::string to_string(SweepKind s);

/// Monte Carlo experiment definition: scenario dimensions, SNR grid, an
/// optional sweep axis, trial count, master seed and the algorithms to run
/// on each (paired) channel draw.
struct ExperimentConfig {
  ExperimentConfig();  // desk-scale defaults for both scenarios

  Scenario scenario = Scenario::miso;

  // Dimensions; power is derived from the SNR grid at run time.
  MisoConfig miso;
  MimoConfig mimo;
  int n_paths_miso = 4;
  int n_paths_mimo = 5;

  std::vector<double> snr_db{0.0};
  SweepKind sweep = SweepKind::none;
  std::vector<double> sweep_values;

  int trials = 1;
  std::uint64_t seed = 1;
  std::vector<std::string> algorithms;  // subset of {fp_pmo|wmmse_pmo, fd_opt, random_phase}

  RcgParams rcg;
  int outer_iters = 50;

  std::string out_path = "results.csv";
  bool record_timing = true;  // false writes wall_time_ms = 0 (byte-stable output)
  int threads = 0;            // 0 = hardware concurrency

  void validate() const;
  /// Default algorithm list for the scenario if none was given.
  std::vector<std::string> effective_algorithms() const;
};

/// One (sweep point, SNR, trial, algorithm) outcome.
struct ResultRecord {
  std::string scenario;
  std::string sweep_name;
  double sweep_value = 0.0;
  double snr_db = 0.0;
  int trial = 0;
  std::string algorithm;
  double sum_rate_bits = 0.0;
  int outer_iterations = 0;
  double wall_time_ms = 0.0;
  bool converged = false;
};

/// Deterministic per-trial seed: splitmix64 mix of the master seed and the
/// (sweep, snr, trial) indices, so any trial can be reproduced in isolation.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t sweep_index,
                         std::uint64_t snr_index, std::uint64_t trial_index);

/// Runs the whole experiment over a bounded worker pool. Every algorithm at
/// a given (sweep point, SNR, trial) consumes the identical channel draw;
/// records come back in deterministic order. A solver failure yields a
/// record with converged = false and the run continues.
std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg);

/// Fully digital upper-bound baseline: one element per transmit RF chain
/// (V pinned to identity); in MISO the UE combiners are still optimized on
/// the manifold, in MIMO the UE analog stage is likewise trivial (K = 1).
double fd_baseline(const ChannelRealization& channels, const ExperimentConfig& cfg,
                   Scenario scenario, Rng& rng);

/// Random-phase floor: analog stages drawn uniformly at random and pinned,
/// only the digital stage is optimized.
double random_phase_baseline(const ChannelRealization& channels, const ExperimentConfig& cfg,
                             Scenario scenario, Rng& rng);

/// Writes the records as CSV (header + one row per record, LF endings) and a
/// JSON summary of per-(algorithm, sweep point, SNR) means and standard
/// errors next to it (".csv" replaced by ".summary.json").
void emit_results(const std::vector<ResultRecord>& records, const std::string& path);

/// Parses a CSV previously written by emit_results.
std::vector<ResultRecord> parse_results(const std::string& path);

/// Writes an "iteration,objective" CSV for a single solver run.
void emit_convergence_trace(const std::vector<double>& trace, const std::string& path);

/// Parses the key-value experiment file format (see README); throws
/// std::runtime_error with a line diagnostic on malformed input.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

}  // namespace rimsa
