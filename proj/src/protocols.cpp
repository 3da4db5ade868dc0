#include "cbt/protocols.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cbt {

namespace {

int log2_exact(int n) {
  if (n < 2 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("n_antennas must be a power of two >= 2, got " + std::to_string(n));
  }
  return std::countr_zero(static_cast<unsigned>(n));
}

std::string bits_string(const Bits& bits) {
  std::string s;
  for (auto b : bits) s.push_back(static_cast<char>('0' + b));
  return s;
}

}  // namespace

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::exhaustive: return "exhaustive";
    case Scheme::binary_hierarchical: return "hierarchical";
    case Scheme::hamming: return "hamming";
    case Scheme::fixed_coded: return "fixed-coded";
    case Scheme::adaptive_coded: return "adaptive-coded";
  }
  return "unknown";
}

Overhead overhead(Scheme scheme, int n_antennas) {
  const int bits = log2_exact(n_antennas);
  switch (scheme) {
    case Scheme::exhaustive: return {n_antennas, 1};
    case Scheme::binary_hierarchical: return {2 * bits, bits};
    case Scheme::fixed_coded: return {2 * bits, bits == 1 ? 1 : 2};
    case Scheme::adaptive_coded: return {2 * bits, bits};
    case Scheme::hamming:
      if (n_antennas != 16) throw std::invalid_argument("hamming scheme requires N = 16");
      return {14, 7};
  }
  throw std::invalid_argument("overhead: unknown scheme");
}

int codeword_index(const Bits& bits) { return static_cast<int>(bintodec(bits)) + 1; }

bool selection_succeeds(int index, double phi, int n_antennas) {
  return index == dft_index_of(phi, n_antennas);
}

// ---------------------------------------------------------------------------

void SignalingTrace::write_csv(std::ostream& os) const {
  os << "slot,phase,codeword,power,feedback\n";
  for (const auto& r : rows_) {
    os << r.slot << ',' << r.phase << ',' << r.codeword << ',';
    if (r.slot >= 0 && std::isfinite(r.power)) {
      char buf[32];
      os << std::string_view(buf, std::to_chars(buf, buf + sizeof buf, r.power).ptr);
    }
    os << ',' << r.feedback << '\n';
  }
}

Link::Link(const ChannelRealization& channel, const LinkBudget& budget, Rng& rng,
           SignalingTrace* trace)
    : channel_(channel), budget_(budget), rng_(rng), trace_(trace) {}

double Link::measure(const ComplexVector& beamformer, std::string_view phase,
                     std::string_view codeword) {
  const double p =
      received_power(received_sample(channel_, beamformer, budget_, draw_noise(budget_.noise_power, rng_)));
  if (trace_) trace_->add({slots_, std::string(phase), std::string(codeword), p, {}});
  ++slots_;
  return p;
}

void Link::idle_slot(std::string_view phase, std::string_view codeword) {
  if (trace_) {
    trace_->add({slots_, std::string(phase), std::string(codeword),
                 std::numeric_limits<double>::quiet_NaN(), {}});
  }
  ++slots_;
}

void Link::feedback(std::string_view phase, const Bits& bits) {
  if (trace_) trace_->add({-1, std::string(phase), {}, 0.0, bits_string(bits)});
  ++feedbacks_;
}

double Link::layer_amplitude(double coverage_measure) const {
  const double beta = std::abs(channel_.gains.front());
  return std::sqrt(budget_.transmit_power) * budget_.pathloss_gain * beta *
         std::sqrt(2.0 / coverage_measure);
}

// ---------------------------------------------------------------------------

BeamTrainer::BeamTrainer(int n_antennas, SynthesisOptions options)
    : n_antennas_(n_antennas),
      message_bits_(log2_exact(n_antennas) - 1),
      synth_(n_antennas, options),
      dft_(dft_codebook(n_antennas)),
      conv_(conv_pattern(std::max(message_bits_, 1))) {
  for (int l = 0; l < conv_.n_layers(); ++l) conv_coverage_.push_back(coverage_set(conv_, l));
  conv_columns_ = conv_.columns();
}

TrainingOutcome BeamTrainer::exhaustive_sweep(Link& link) const {
  int best = 0;
  double best_power = -1.0;
  for (int n = 0; n < n_antennas_; ++n) {
    const double p = link.measure(dft_[static_cast<std::size_t>(n)], "sweep", "W" + std::to_string(n + 1));
    if (p > best_power) {
      best_power = p;
      best = n;
    }
  }
  TrainingOutcome out;
  out.selected_index = best + 1;
  out.decoded_bits = dectobin(static_cast<std::size_t>(best), log2_exact(n_antennas_));
  link.feedback("index", out.decoded_bits);
  out.slots_used = link.slots_used();
  out.feedback_slots = link.feedback_slots();
  out.success = selection_succeeds(out.selected_index, link.true_direction(), n_antennas_);
  return out;
}

TrainingOutcome BeamTrainer::binary_hierarchical(Link& link) const {
  const int layers = log2_exact(n_antennas_);
  TrainingOutcome out;
  std::size_t prefix = 0;
  for (int l = 1; l <= layers; ++l) {
    const int count = 1 << l;
    const int left = static_cast<int>(2 * prefix);
    double p[2];
    for (int b = 0; b < 2; ++b) {
      const std::string id = "H" + std::to_string(l) + ":" + std::to_string(left + b + 1);
      if (l == layers) {
        p[b] = link.measure(dft_[static_cast<std::size_t>(left + b)], "hierarchical", id);
      } else {
        const int seg[] = {left + b};
        p[b] = link.measure(synth_.beam(CoverageSet::from_segments(count, seg)), "hierarchical", id);
      }
    }
    const std::uint8_t bit = p[0] > p[1] ? 0 : 1;
    out.decoded_bits.push_back(bit);
    link.feedback("layer" + std::to_string(l), Bits{bit});
    prefix = 2 * prefix + bit;
  }
  out.selected_index = codeword_index(out.decoded_bits);
  out.slots_used = link.slots_used();
  out.feedback_slots = link.feedback_slots();
  out.success = selection_succeeds(out.selected_index, link.true_direction(), n_antennas_);
  return out;
}

int BeamTrainer::hamming_decide(const Bits& hard_bits, Bits* corrected) {
  const HammingCorrection fix = HammingCode74::correct(hard_bits);
  if (corrected) *corrected = fix.corrected;
  return codeword_index(Bits(fix.corrected.begin(), fix.corrected.begin() + 4));
}

TrainingOutcome BeamTrainer::hamming_training(Link& link) const {
  if (n_antennas_ != 16) throw std::invalid_argument("hamming_training: requires N = 16");
  static const SpaceTimeBeamPattern pattern = hamming_pattern();
  Bits hard;
  for (int l = 0; l < pattern.n_layers(); ++l) {
    double p[2];
    for (int b = 0; b < 2; ++b) {
      const std::string id = "C" + std::to_string(l + 1) + ":" + std::to_string(b + 1);
      p[b] = link.measure(synth_.beam(coverage_set(pattern, l, b)), "hamming", id);
    }
    // Slot 1 covers the segments whose code bit is 1.
    const std::uint8_t bit = p[0] > p[1] ? 1 : 0;
    hard.push_back(bit);
    link.feedback("layer" + std::to_string(l + 1), Bits{bit});
  }
  TrainingOutcome out;
  out.selected_index = hamming_decide(hard, &out.decoded_bits);
  out.slots_used = link.slots_used();
  out.feedback_slots = link.feedback_slots();
  out.success = selection_succeeds(out.selected_index, link.true_direction(), n_antennas_);
  return out;
}

TrainingOutcome BeamTrainer::coded_training(Link& link, bool adaptive, LlrKind llr_kind,
                                            DecoderKind decoder) const {
  if (decoder == DecoderKind::ml && (adaptive || llr_kind != LlrKind::chi_squared)) {
    throw std::invalid_argument("coded_training: ML decoding is defined for fixed chi-squared beams only");
  }
  const double noise = link.budget().noise_power;
  const int levels = message_bits_;

  TrellisState trellis = TrellisState::initial();
  std::vector<double> powers;
  std::vector<double> amplitudes;

  for (int level = 1; level <= levels; ++level) {
    CoverageSet survivors = CoverageSet::full(1);
    if (adaptive) {
      std::vector<Bits> paths;
      for (int s = 0; s < kConvStates; ++s) {
        if (trellis.reachable(s)) paths.push_back(trellis.paths[static_cast<std::size_t>(s)]);
      }
      survivors = survivor_directions(paths);
    }

    double llr[2];
    for (int j = 0; j < 2; ++j) {
      const int layer = 2 * (level - 1) + j;
      const std::string id = "C" + std::to_string(layer + 1);
      const CoverageSet cov =
          adaptive ? adaptive_coverage(conv_coverage_[static_cast<std::size_t>(layer)], survivors)
                   : conv_coverage_[static_cast<std::size_t>(layer)];
      if (cov.is_empty()) {
        link.idle_slot("coded", id);
        llr[j] = 0.0;
        powers.push_back(0.0);
        amplitudes.push_back(0.0);
        continue;
      }
      const double a = link.layer_amplitude(cov.measure());
      const double p = link.measure(synth_.beam(cov), "coded", id);
      llr[j] = layer_llr(llr_kind, p, a, noise);
      powers.push_back(p);
      amplitudes.push_back(a);
    }
    trellis = viterbi_step(trellis, llr[0], llr[1]);
    if (adaptive) {
      // UE reports the survivor decisions of this trellis level.
      Bits decisions;
      for (int s = 0; s < kConvStates; ++s) {
        if (trellis.reachable(s)) decisions.push_back(trellis.paths[static_cast<std::size_t>(s)].back());
      }
      link.feedback("survivors" + std::to_string(level), decisions);
    }
  }

  Bits q;
  if (decoder == DecoderKind::ml && levels > 0) {
    q = dectobin(ml_decode(powers, conv_columns_, amplitudes, noise), levels);
  } else {
    q = trellis.paths[static_cast<std::size_t>(trellis.best_state())];
  }
  if (!adaptive && levels > 0) link.feedback("decoded", q);

  const std::size_t t = bintodec(q);
  const double p1 = link.measure(dft_[2 * t], "bottom", "W" + std::to_string(2 * t + 1));
  const double p2 = link.measure(dft_[2 * t + 1], "bottom", "W" + std::to_string(2 * t + 2));
  const std::uint8_t last = p1 > p2 ? 0 : 1;
  link.feedback("bottom", Bits{last});

  TrainingOutcome out;
  out.decoded_bits = q;
  out.decoded_bits.push_back(last);
  out.selected_index = static_cast<int>(2 * t) + 1 + last;
  out.slots_used = link.slots_used();
  out.feedback_slots = link.feedback_slots();
  out.success = selection_succeeds(out.selected_index, link.true_direction(), n_antennas_);
  return out;
}

TrainingOutcome BeamTrainer::run(Scheme scheme, Link& link, LlrKind llr_kind,
                                 DecoderKind decoder) const {
  switch (scheme) {
    case Scheme::exhaustive: return exhaustive_sweep(link);
    case Scheme::binary_hierarchical: return binary_hierarchical(link);
    case Scheme::hamming: return hamming_training(link);
    case Scheme::fixed_coded: return coded_training(link, false, llr_kind, decoder);
    case Scheme::adaptive_coded: return coded_training(link, true, llr_kind, decoder);
  }
  throw std::invalid_argument("run: unknown scheme");
}

}  // namespace cbt
