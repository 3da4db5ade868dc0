#include "cbt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace cbt {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double d = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects an integer, got '" + value + "'");
  }
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split(value, ',')) out.push_back(parse_double(key, item));
  return out;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

Rng seeded(std::initializer_list<std::uint64_t> words) {
  std::vector<std::uint32_t> w;
  for (auto v : words) {
    w.push_back(static_cast<std::uint32_t>(v));
    w.push_back(static_cast<std::uint32_t>(v >> 32));
  }
  std::seed_seq seq(w.begin(), w.end());
  return Rng(seq);
}

}  // namespace

SchemeSpec SchemeSpec::parse(const std::string& name) {
  SchemeSpec spec;
  spec.name = name;
  std::string base = name;
  auto strip = [&](const std::string& suffix) {
    if (base.size() > suffix.size() && base.ends_with(suffix)) {
      base.resize(base.size() - suffix.size());
      return true;
    }
    return false;
  };
  if (strip("-gaussian")) {
    spec.llr_kind = LlrKind::gaussian;
  } else if (strip("-ml")) {
    spec.decoder = DecoderKind::ml;
  } else {
    strip("-chi2");
  }

  if (base == "exhaustive") {
    spec.scheme = Scheme::exhaustive;
  } else if (base == "hierarchical" || base == "binary-hierarchical") {
    spec.scheme = Scheme::binary_hierarchical;
  } else if (base == "hamming") {
    spec.scheme = Scheme::hamming;
  } else if (base == "fixed-coded") {
    spec.scheme = Scheme::fixed_coded;
  } else if (base == "adaptive-coded") {
    spec.scheme = Scheme::adaptive_coded;
  } else {
    throw ConfigError("unknown scheme '" + name + "'");
  }
  const bool coded = spec.scheme == Scheme::fixed_coded || spec.scheme == Scheme::adaptive_coded;
  if (base != name && !coded) throw ConfigError("decoder suffix only applies to coded schemes: '" + name + "'");
  if (spec.decoder == DecoderKind::ml && spec.scheme != Scheme::fixed_coded) {
    throw ConfigError("ML decoding is only defined for fixed-coded: '" + name + "'");
  }
  return spec;
}

// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::parse(std::istream& is) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "n_antennas") {
      cfg.n_antennas = static_cast<int>(parse_int(key, value));
    } else if (key == "schemes" || key == "scheme") {
      cfg.schemes = split(value, ',');
    } else if (key == "snr_grid") {
      cfg.snr_grid_db = parse_list(key, value);
    } else if (key == "distance_grid") {
      cfg.distance_grid_m = parse_list(key, value);
    } else if (key == "n_trials") {
      cfg.n_trials = static_cast<int>(parse_int(key, value));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "codebook_seed") {
      cfg.codebook_seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "llr_kind") {
      cfg.llr_kind = value;
    } else if (key == "carrier_frequency") {
      cfg.carrier_frequency = parse_double(key, value);
    } else if (key == "transmit_power") {
      cfg.transmit_power_dbm = parse_double(key, value);
    } else if (key == "noise_power") {
      cfg.noise_power_dbm = parse_double(key, value);
    } else if (key == "bandwidth") {
      cfg.bandwidth = parse_double(key, value);
    } else if (key == "n_subcarriers") {
      cfg.n_subcarriers = static_cast<int>(parse_int(key, value));
    } else if (key == "direction_mode") {
      if (value == "uniform") {
        cfg.direction_mode = DirectionMode::uniform;
      } else if (value == "grid") {
        cfg.direction_mode = DirectionMode::grid;
      } else {
        throw ConfigError("config: direction_mode must be 'uniform' or 'grid'");
      }
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(parse_int(key, value));
    } else if (key == "output") {
      cfg.output_path = value;
    } else {
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in);
}

void ExperimentConfig::validate() const {
  if (n_antennas < 2 || (n_antennas & (n_antennas - 1)) != 0) {
    throw ConfigError("n_antennas must be a power of two >= 2");
  }
  if (n_trials < 1) throw ConfigError("n_trials must be >= 1");
  if (snr_grid_db.empty() == distance_grid_m.empty()) {
    throw ConfigError("exactly one of snr_grid / distance_grid must be set");
  }
  for (double d : distance_grid_m) {
    if (!(d > 0.0)) throw ConfigError("distance_grid entries must be positive");
  }
  for (double s : snr_grid_db) {
    if (!std::isfinite(s)) throw ConfigError("snr_grid entries must be finite");
  }
  if (llr_kind != "chi-squared" && llr_kind != "gaussian") {
    throw ConfigError("llr_kind must be 'chi-squared' or 'gaussian'");
  }
  if (!(carrier_frequency > 0.0)) throw ConfigError("carrier_frequency must be positive");
  if (workers < 0) throw ConfigError("workers must be >= 0");
  if (schemes.empty()) throw ConfigError("no schemes given");
  for (const auto& s : schemes) {
    const SchemeSpec spec = SchemeSpec::parse(s);
    if (spec.scheme == Scheme::hamming && n_antennas != 16) {
      throw ConfigError("scheme 'hamming' requires n_antennas = 16");
    }
  }
}

// ---------------------------------------------------------------------------

Rng channel_stream(std::uint64_t seed, std::size_t point, std::size_t trial) {
  return seeded({seed, 0x6368616e6e656cull, point, trial});
}

Rng noise_stream(std::uint64_t seed, const std::string& scheme, std::size_t point,
                 std::size_t trial) {
  return seeded({seed, fnv1a(scheme), point, trial});
}

double rate_upper_bound(const LinkBudget& budget, int n_antennas) {
  return std::log2(1.0 + budget.snr() * n_antennas);
}

namespace {

struct TrialResult {
  bool success = false;
  double rate = 0.0;
};

LinkBudget budget_for(const ExperimentConfig& cfg, double point) {
  if (cfg.distance_mode()) {
    return LinkBudget::at_distance(dbm_to_watts(cfg.transmit_power_dbm),
                                   dbm_to_watts(cfg.noise_power_dbm), cfg.carrier_frequency, point);
  }
  LinkBudget b = LinkBudget::normalized(point);
  b.carrier_frequency = cfg.carrier_frequency;
  return b;
}

ChannelRealization draw_channel(const ExperimentConfig& cfg, std::size_t point, std::size_t trial) {
  Rng rng = channel_stream(cfg.seed, point, trial);
  double phi;
  if (cfg.direction_mode == DirectionMode::grid) {
    std::uniform_int_distribution<int> pick(1, cfg.n_antennas);
    phi = dft_direction(pick(rng), cfg.n_antennas);
  } else {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    phi = uni(rng);
  }
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  return los_channel(std::polar(1.0, phase(rng)), phi, cfg.n_antennas);
}

unsigned worker_count(const ExperimentConfig& cfg) {
  if (cfg.workers > 0) return static_cast<unsigned>(cfg.workers);
  return std::max(1u, std::thread::hardware_concurrency());
}

MetricsRow run_point(const ExperimentConfig& cfg, const BeamTrainer& trainer, const SchemeSpec& spec,
                     std::size_t point_index, double point_value) {
  const LinkBudget budget = budget_for(cfg, point_value);
  const Overhead expected = overhead(spec.scheme, cfg.n_antennas);
  const auto n = static_cast<std::size_t>(cfg.n_trials);
  std::vector<TrialResult> results(n);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    try {
      for (std::size_t t = next++; t < n; t = next++) {
        const ChannelRealization channel = draw_channel(cfg, point_index, t);
        Rng rng = noise_stream(cfg.seed, std::string(scheme_name(spec.scheme)), point_index, t);
        Link link(channel, budget, rng);
        const TrainingOutcome out = trainer.run(spec.scheme, link, spec.llr_kind, spec.decoder);
        if (out.slots_used != expected.training_slots || out.feedback_slots != expected.feedback_slots) {
          throw std::logic_error("slot accounting mismatch for scheme " + spec.name);
        }
        const ComplexVector& w = trainer.dft()[static_cast<std::size_t>(out.selected_index - 1)];
        const double gain = std::norm((channel.row_vector.transpose() * w)(0));
        results[t] = {out.success,
                      std::log2(1.0 + budget.transmit_power * budget.pathloss_gain *
                                          budget.pathloss_gain * gain / budget.noise_power)};
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = n;
    }
  };

  const unsigned workers = std::min<unsigned>(worker_count(cfg), static_cast<unsigned>(n));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  MetricsRow row;
  row.scheme = spec.name;
  row.point_kind = cfg.distance_mode() ? "distance_m" : "snr_db";
  row.point_value = point_value;
  row.n_trials = cfg.n_trials;
  double rate_sum = 0.0;
  for (const auto& r : results) {
    row.successes += r.success ? 1 : 0;
    rate_sum += r.rate;
  }
  row.success_rate = static_cast<double>(row.successes) / row.n_trials;
  row.mean_rate = rate_sum / row.n_trials;
  row.se_rate = std::sqrt(row.success_rate * (1.0 - row.success_rate) / row.n_trials);
  row.slots = expected.training_slots;
  row.feedback_slots = expected.feedback_slots;
  return row;
}

// A bare coded scheme name picks up the config-wide LLR kind.
SchemeSpec resolve_scheme(const ExperimentConfig& cfg, const std::string& name) {
  SchemeSpec spec = SchemeSpec::parse(name);
  if (cfg.llr_kind == "gaussian" && name == scheme_name(spec.scheme)) spec.llr_kind = LlrKind::gaussian;
  return spec;
}

std::vector<MetricsRow> run_schemes(const ExperimentConfig& cfg, const std::vector<SchemeSpec>& specs) {
  const BeamTrainer trainer(cfg.n_antennas, SynthesisOptions{4, 100, cfg.codebook_seed});
  const auto& grid = cfg.distance_mode() ? cfg.distance_grid_m : cfg.snr_grid_db;
  std::vector<MetricsRow> rows;
  for (const auto& spec : specs) {
    for (std::size_t p = 0; p < grid.size(); ++p) rows.push_back(run_point(cfg, trainer, spec, p, grid[p]));
  }
  return rows;
}

}  // namespace

std::vector<MetricsRow> run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<SchemeSpec> specs;
  for (const auto& name : config.schemes) specs.push_back(resolve_scheme(config, name));
  return run_schemes(config, specs);
}

std::vector<MetricsRow> distance_sweep(const ExperimentConfig& config) {
  if (!config.distance_mode()) throw ConfigError("distance_sweep: distance_grid is not set");
  return run_experiment(config);
}

std::vector<MetricsRow> decoder_ablation(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  cfg.schemes = {"fixed-coded", "fixed-coded-gaussian", "fixed-coded-ml"};
  cfg.llr_kind = "chi-squared";
  return run_experiment(cfg);
}

SignalingTrace trace_trial(const ExperimentConfig& config, const std::string& scheme,
                           std::size_t point, std::size_t trial) {
  config.validate();
  const auto& grid = config.distance_mode() ? config.distance_grid_m : config.snr_grid_db;
  if (point >= grid.size()) throw ConfigError("trace_trial: point index out of range");
  const SchemeSpec spec = resolve_scheme(config, scheme);
  const BeamTrainer trainer(config.n_antennas, SynthesisOptions{4, 100, config.codebook_seed});
  const LinkBudget budget = budget_for(config, grid[point]);
  const ChannelRealization channel = draw_channel(config, point, trial);
  Rng rng = noise_stream(config.seed, std::string(scheme_name(spec.scheme)), point, trial);
  SignalingTrace trace;
  Link link(channel, budget, rng, &trace);
  trainer.run(spec.scheme, link, spec.llr_kind, spec.decoder);
  return trace;
}

// ---------------------------------------------------------------------------

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_metrics_csv(std::ostream& os, const std::vector<MetricsRow>& rows) {
  os << "scheme,point_kind,point_value,n_trials,successes,success_rate,mean_rate,se_rate,slots,"
        "feedback_slots\n";
  for (const auto& r : rows) {
    os << r.scheme << ',' << r.point_kind << ',' << format_double(r.point_value) << ',' << r.n_trials
       << ',' << r.successes << ',' << format_double(r.success_rate) << ','
       << format_double(r.mean_rate) << ',' << format_double(r.se_rate) << ',' << r.slots << ','
       << r.feedback_slots << '\n';
  }
}

std::vector<MetricsRow> read_metrics_csv(std::istream& is) {
  static const std::vector<std::string> kColumns = {
      "scheme",    "point_kind", "point_value", "n_trials", "successes",
      "success_rate", "mean_rate", "se_rate",  "slots",    "feedback_slots"};
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("metrics csv: empty input");
  const auto header = split(line, ',');
  if (header != kColumns) throw std::runtime_error("metrics csv: unexpected header");
  std::vector<MetricsRow> rows;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != kColumns.size()) throw std::runtime_error("metrics csv: wrong field count");
    MetricsRow r;
    r.scheme = f[0];
    r.point_kind = f[1];
    r.point_value = std::stod(f[2]);
    r.n_trials = std::stoi(f[3]);
    r.successes = std::stoi(f[4]);
    r.success_rate = std::stod(f[5]);
    r.mean_rate = std::stod(f[6]);
    r.se_rate = std::stod(f[7]);
    r.slots = std::stoi(f[8]);
    r.feedback_slots = std::stoi(f[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace cbt
