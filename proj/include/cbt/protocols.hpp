#pragma once

// End-to-end beam-training procedures over one simulated link and their
// training / feedback overhead accounting.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cbt/array_channel.hpp"
#include "cbt/beampattern.hpp"
#include "cbt/codes.hpp"
#include "cbt/synthesis.hpp"

namespace cbt {

enum class Scheme { exhaustive, binary_hierarchical, hamming, fixed_coded, adaptive_coded };
enum class DecoderKind { viterbi, ml };

std::string_view scheme_name(Scheme s);

struct Overhead {
  int training_slots = 0;
  int feedback_slots = 0;
  friend bool operator==(const Overhead&, const Overhead&) = default;
};

/// Training and feedback slot counts per scheme for a power-of-two N.
Overhead overhead(Scheme scheme, int n_antennas);

struct TrainingOutcome {
  int selected_index = 0;  // 1-based index into the DFT codebook
  int slots_used = 0;
  int feedback_slots = 0;
  Bits decoded_bits;
  bool success = false;
};

/// One row per training slot or feedback event.
struct TraceRow {
  int slot = 0;  // training slot number, or -1 for feedback
  std::string phase;
  std::string codeword;
  double power = 0.0;
  std::string feedback;
};

class SignalingTrace {
 public:
  void add(TraceRow row) { rows_.push_back(std::move(row)); }
  const std::vector<TraceRow>& rows() const { return rows_; }
  /// Header: slot,phase,codeword,power,feedback
  void write_csv(std::ostream& os) const;

 private:
  std::vector<TraceRow> rows_;
};

/// Measurement side of one training run: applies beams to the channel, draws
/// noise per slot and counts slots.
class Link {
 public:
  Link(const ChannelRealization& channel, const LinkBudget& budget, Rng& rng,
       SignalingTrace* trace = nullptr);

  double measure(const ComplexVector& beamformer, std::string_view phase, std::string_view codeword);
  /// A slot that carries no beam; the UE records nothing useful.
  void idle_slot(std::string_view phase, std::string_view codeword);
  void feedback(std::string_view phase, const Bits& bits);

  const ChannelRealization& channel() const { return channel_; }
  const LinkBudget& budget() const { return budget_; }
  double true_direction() const { return channel_.directions.front(); }
  int slots_used() const { return slots_; }
  int feedback_slots() const { return feedbacks_; }

  /// Genie amplitude of a beam with ideal gain over coverage measure |B|.
  double layer_amplitude(double coverage_measure) const;

 private:
  const ChannelRealization& channel_;
  const LinkBudget& budget_;
  Rng& rng_;
  SignalingTrace* trace_;
  int slots_ = 0;
  int feedbacks_ = 0;
};

/// Training procedures for one array size. Beams come from a shared
/// memoizing synthesizer, so one trainer can serve concurrent trials.
class BeamTrainer {
 public:
  explicit BeamTrainer(int n_antennas, SynthesisOptions options = {});

  int n_antennas() const { return n_antennas_; }
  int message_bits() const { return message_bits_; }
  const BeamSynthesizer& synthesizer() const { return synth_; }
  const std::vector<ComplexVector>& dft() const { return dft_; }
  const SpaceTimeBeamPattern& conv() const { return conv_; }

  TrainingOutcome exhaustive_sweep(Link& link) const;
  TrainingOutcome binary_hierarchical(Link& link) const;
  /// Requires N = 16.
  TrainingOutcome hamming_training(Link& link) const;
  TrainingOutcome coded_training(Link& link, bool adaptive, LlrKind llr_kind,
                                 DecoderKind decoder = DecoderKind::viterbi) const;

  TrainingOutcome run(Scheme scheme, Link& link, LlrKind llr_kind = LlrKind::chi_squared,
                      DecoderKind decoder = DecoderKind::viterbi) const;

  /// Hard-decision half of Hamming training: corrects the 7 feedback bits and
  /// maps the first four to a DFT index.
  static int hamming_decide(const Bits& hard_bits, Bits* corrected = nullptr);

 private:
  int n_antennas_;
  int message_bits_;
  BeamSynthesizer synth_;
  std::vector<ComplexVector> dft_;
  SpaceTimeBeamPattern conv_;
  std::vector<CoverageSet> conv_coverage_;
  std::vector<Bits> conv_columns_;
};

/// bintodec(bits) + 1.
int codeword_index(const Bits& bits);

/// True when DFT codeword `index` has the segment containing phi.
bool selection_succeeds(int index, double phi, int n_antennas);

}  // namespace cbt
