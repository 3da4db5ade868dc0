// Command-line front end: codebook synthesis and Monte Carlo experiments.

#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cbt/harness.hpp"
#include "cbt/synthesis.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> schemes;
  int antennas = 0;
  int trials = 0;
  long long seed = -1;
  int workers = -1;
  std::string llr_kind;
  std::string direction_mode;
  std::string out;
  std::string trace_out;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config_path, "key = value experiment config file");
  app->add_option("--scheme", f.schemes, "scheme name(s), comma separated")->delimiter(',');
  app->add_option("--antennas", f.antennas, "number of BS antennas (power of two)");
  app->add_option("--trials", f.trials, "Monte Carlo trials per point");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--workers", f.workers, "worker threads (0 = all cores)");
  app->add_option("--llr-kind", f.llr_kind, "chi-squared | gaussian");
  app->add_option("--direction-mode", f.direction_mode, "uniform | grid");
  app->add_option("--out", f.out, "output CSV path (default stdout)");
  app->add_option("--trace", f.trace_out, "write the signaling trace of trial 0 of the first scheme/point");
}

cbt::ExperimentConfig build_config(const CommonFlags& f) {
  cbt::ExperimentConfig cfg =
      f.config_path.empty() ? cbt::ExperimentConfig{} : cbt::ExperimentConfig::from_file(f.config_path);
  if (!f.schemes.empty()) cfg.schemes = f.schemes;
  if (f.antennas > 0) cfg.n_antennas = f.antennas;
  if (f.trials > 0) cfg.n_trials = f.trials;
  if (f.seed >= 0) cfg.seed = static_cast<std::uint64_t>(f.seed);
  if (f.workers >= 0) cfg.workers = f.workers;
  if (!f.llr_kind.empty()) cfg.llr_kind = f.llr_kind;
  if (f.direction_mode == "grid") {
    cfg.direction_mode = cbt::DirectionMode::grid;
  } else if (f.direction_mode == "uniform") {
    cfg.direction_mode = cbt::DirectionMode::uniform;
  } else if (!f.direction_mode.empty()) {
    throw cbt::ConfigError("--direction-mode must be 'uniform' or 'grid'");
  }
  if (!f.out.empty()) cfg.output_path = f.out;
  return cfg;
}

std::vector<double> range(double from, double to, double step) {
  if (!(step > 0.0) || to < from) throw cbt::ConfigError("invalid grid range");
  std::vector<double> grid;
  const auto n = static_cast<long>(std::floor((to - from) / step + 1e-9));
  for (long i = 0; i <= n; ++i) grid.push_back(from + static_cast<double>(i) * step);
  return grid;
}

void emit(const cbt::ExperimentConfig& cfg, const std::vector<cbt::MetricsRow>& rows) {
  if (cfg.output_path.empty()) {
    cbt::write_metrics_csv(std::cout, rows);
    return;
  }
  std::ofstream out(cfg.output_path);
  if (!out) throw std::runtime_error("cannot write '" + cfg.output_path + "'");
  cbt::write_metrics_csv(out, rows);
}

void maybe_trace(const cbt::ExperimentConfig& cfg, const CommonFlags& f) {
  if (f.trace_out.empty()) return;
  std::ofstream out(f.trace_out);
  if (!out) throw std::runtime_error("cannot write '" + f.trace_out + "'");
  cbt::trace_trial(cfg, cfg.schemes.front(), 0, 0).write_csv(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coded beam training simulator"};
  app.require_subcommand(1);

  // synthesize
  auto* synth = app.add_subcommand("synthesize", "build and serialize a training codebook");
  int synth_antennas = 16;
  std::string code = "conv";
  long long synth_seed = 1;
  std::string synth_out;
  std::string pattern_out;
  synth->add_option("--antennas", synth_antennas, "number of BS antennas");
  synth->add_option("--code", code, "hamming | conv | hierarchical")
      ->check(CLI::IsMember({"hamming", "conv", "hierarchical"}));
  synth->add_option("--seed", synth_seed, "codebook seed");
  synth->add_option("--out", synth_out, "binary codebook output path")->required();
  synth->add_option("--pattern-out", pattern_out, "write the 0/1 beam pattern as text");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run one experiment");
  CommonFlags sim_flags;
  add_common(simulate, sim_flags);
  std::vector<double> snr_points;
  std::vector<double> dist_points;
  simulate->add_option("--snr-db", snr_points, "SNR point(s) in dB")->delimiter(',');
  simulate->add_option("--distance", dist_points, "distance point(s) in m")->delimiter(',');

  // sweep
  auto* sweep = app.add_subcommand("sweep", "grid over SNR or distance");
  CommonFlags sweep_flags;
  add_common(sweep, sweep_flags);
  double snr_from = NAN, snr_to = NAN, snr_step = 2.0;
  double dist_from = NAN, dist_to = NAN, dist_step = NAN;
  sweep->add_option("--snr-from", snr_from);
  sweep->add_option("--snr-to", snr_to);
  sweep->add_option("--snr-step", snr_step);
  sweep->add_option("--dist-from", dist_from);
  sweep->add_option("--dist-to", dist_to);
  sweep->add_option("--dist-step", dist_step);

  // ablate-decoder
  auto* ablate = app.add_subcommand("ablate-decoder", "chi-squared vs Gaussian Viterbi vs ML");
  CommonFlags ablate_flags;
  add_common(ablate, ablate_flags);
  double ab_from = -10.0, ab_to = 6.0, ab_step = 2.0;
  ablate->add_option("--snr-from", ab_from);
  ablate->add_option("--snr-to", ab_to);
  ablate->add_option("--snr-step", ab_step);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      const cbt::BeamSynthesizer synthesizer(
          synth_antennas, cbt::SynthesisOptions{4, 100, static_cast<std::uint64_t>(synth_seed)});
      cbt::Codebook book;
      if (code == "hamming") {
        book = cbt::hamming_codebook(synthesizer);
      } else if (code == "conv") {
        book = cbt::conv_codebook(synthesizer);
      } else {
        book = cbt::hierarchical_codebook(synthesizer);
      }
      std::ofstream out(synth_out, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write '" + synth_out + "'");
      cbt::write_codebook(out, book);
      if (!pattern_out.empty()) {
        std::ofstream pat(pattern_out);
        if (code == "hamming") {
          cbt::hamming_pattern().write_text(pat);
        } else if (code == "conv") {
          int bits = 0;
          while ((2 << bits) < synth_antennas) ++bits;
          cbt::conv_pattern(bits).write_text(pat);
        } else {
          throw cbt::ConfigError("--pattern-out is only defined for hamming and conv codes");
        }
      }
      std::cerr << "wrote " << book.n_layers() << " layers to " << synth_out << "\n";
    } else if (*simulate) {
      cbt::ExperimentConfig cfg = build_config(sim_flags);
      if (!snr_points.empty()) cfg.snr_grid_db = snr_points;
      if (!dist_points.empty()) cfg.distance_grid_m = dist_points;
      emit(cfg, cbt::run_experiment(cfg));
      maybe_trace(cfg, sim_flags);
    } else if (*sweep) {
      cbt::ExperimentConfig cfg = build_config(sweep_flags);
      const bool snr = !std::isnan(snr_from) || !std::isnan(snr_to);
      const bool dist = !std::isnan(dist_from) || !std::isnan(dist_to);
      if (snr == dist) throw cbt::ConfigError("sweep: give exactly one of --snr-* or --dist-* ranges");
      if (snr) {
        cfg.snr_grid_db = range(snr_from, snr_to, snr_step);
        cfg.distance_grid_m.clear();
        emit(cfg, cbt::run_experiment(cfg));
      } else {
        cfg.distance_grid_m = range(dist_from, dist_to, dist_step);
        cfg.snr_grid_db.clear();
        emit(cfg, cbt::distance_sweep(cfg));
      }
      maybe_trace(cfg, sweep_flags);
    } else if (*ablate) {
      cbt::ExperimentConfig cfg = build_config(ablate_flags);
      if (cfg.snr_grid_db.empty()) cfg.snr_grid_db = range(ab_from, ab_to, ab_step);
      emit(cfg, cbt::decoder_ablation(cfg));
    }
  } catch (const cbt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
