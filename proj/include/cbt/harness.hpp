#pragma once

// Monte Carlo experiment driver: configuration, deterministic per-trial
// seeding, parallel trial execution and CSV metrics output.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbt/protocols.hpp"

namespace cbt {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A scheme plus decoder variant, e.g. "adaptive-coded", "fixed-coded-gaussian",
/// "fixed-coded-ml".
struct SchemeSpec {
  Scheme scheme = Scheme::exhaustive;
  LlrKind llr_kind = LlrKind::chi_squared;
  DecoderKind decoder = DecoderKind::viterbi;
  std::string name;

  static SchemeSpec parse(const std::string& name);
};

enum class DirectionMode { uniform, grid };

struct ExperimentConfig {
  int n_antennas = 128;
  std::vector<std::string> schemes{"exhaustive"};
  std::vector<double> snr_grid_db;
  std::vector<double> distance_grid_m;
  int n_trials = 1000;
  std::uint64_t seed = 1;
  std::string llr_kind = "chi-squared";  // default decoder LLR for coded schemes
  double carrier_frequency = 3.5e9;      // Hz
  double transmit_power_dbm = 40.0;
  double noise_power_dbm = -110.0;
  double bandwidth = 50e6;  // carried for reference only
  int n_subcarriers = 1024; // carried for reference only
  DirectionMode direction_mode = DirectionMode::uniform;
  std::uint64_t codebook_seed = 1;
  int workers = 0;  // 0 = hardware concurrency
  std::string output_path;

  /// Flat `key = value` text; '#' starts a comment. Lists are comma separated.
  static ExperimentConfig parse(std::istream& is);
  static ExperimentConfig from_file(const std::string& path);

  /// Throws ConfigError on any invalid field.
  void validate() const;
  bool distance_mode() const { return !distance_grid_m.empty(); }
};

struct MetricsRow {
  std::string scheme;
  std::string point_kind;  // "snr_db" or "distance_m"
  double point_value = 0.0;
  int n_trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  double mean_rate = 0.0;  // bits/s/Hz
  double se_rate = 0.0;    // standard error of success_rate
  int slots = 0;
  int feedback_slots = 0;
};

/// Per-trial random streams. The channel stream ignores the scheme so every
/// scheme sees the same channel draws at a given (point, trial). The noise
/// stream is keyed by the base training scheme (`scheme_name`), so decoder
/// variants of one scheme decode identical measurements.
Rng channel_stream(std::uint64_t seed, std::size_t point, std::size_t trial);
Rng noise_stream(std::uint64_t seed, const std::string& scheme, std::size_t point, std::size_t trial);

/// Runs every (scheme, grid point) pair. Output depends only on the config,
/// not on the worker count.
std::vector<MetricsRow> run_experiment(const ExperimentConfig& config);

/// Distance grid sweep in path-loss mode; same as run_experiment with a
/// distance grid, checked to be set.
std::vector<MetricsRow> distance_sweep(const ExperimentConfig& config);

/// Coded-training decoder comparison: chi-squared Viterbi, Gaussian Viterbi
/// and the chi-squared ML bound on fixed beams.
std::vector<MetricsRow> decoder_ablation(const ExperimentConfig& config);

/// Re-runs one trial of one scheme with a signaling trace attached. Uses the
/// same random streams as run_experiment.
SignalingTrace trace_trial(const ExperimentConfig& config, const std::string& scheme,
                           std::size_t point, std::size_t trial);

/// Header: scheme,point_kind,point_value,n_trials,successes,success_rate,mean_rate,se_rate,slots,feedback_slots
void write_metrics_csv(std::ostream& os, const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> read_metrics_csv(std::istream& is);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

/// Perfect-beamforming rate bound log2(1 + P*gamma^2*N/sigma^2).
double rate_upper_bound(const LinkBudget& budget, int n_antennas);

}  // namespace cbt
