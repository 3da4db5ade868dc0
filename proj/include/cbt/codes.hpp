#pragma once

// Channel-code machinery for beam training: Hamming(7,4) hard decoding, the
// rate-1/2 K=3 convolutional code (generators 111, 101), per-layer LLRs and
// the Viterbi / maximum-likelihood index decoders.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cbt {

using Bits = std::vector<std::uint8_t>;

/// MSB-first binary to decimal.
std::size_t bintodec(std::span<const std::uint8_t> bits);
/// Inverse of `bintodec` with a fixed width.
Bits dectobin(std::size_t value, int width);

// ---------------------------------------------------------------------------
// Hamming(7,4)

struct HammingCorrection {
  Bits corrected;
  std::array<std::uint8_t, 3> syndrome{};
  int error_position = 0;  // 1..7, 0 = no error
};

class HammingCode74 {
 public:
  static constexpr int kMessageBits = 4;
  static constexpr int kCodeBits = 7;

  using Generator = std::array<std::array<std::uint8_t, kCodeBits>, kMessageBits>;
  using ParityCheck = std::array<std::array<std::uint8_t, kCodeBits>, 3>;

  static const Generator& generator();
  static const ParityCheck& parity_check();

  /// Error position (1..7) for a syndrome read as c1c2c3, 0 for none.
  static int error_position(std::array<std::uint8_t, 3> syndrome);

  static Bits encode(std::span<const std::uint8_t> message);
  static std::array<std::uint8_t, 3> syndrome(std::span<const std::uint8_t> received);
  static HammingCorrection correct(std::span<const std::uint8_t> received);
};

// ---------------------------------------------------------------------------
// Convolutional code, constraint length 3, k = 1, n = 2.
//
// State index = 2*M1 + M2 where M1 = u(i-1), M2 = u(i-2); "10" is index 2.

struct ConvBranch {
  int next_state = 0;
  std::uint8_t out1 = 0;  // u(i) ^ u(i-1) ^ u(i-2)
  std::uint8_t out2 = 0;  // u(i) ^ u(i-2)
};

inline constexpr int kConvStates = 4;

ConvBranch conv_branch(int state, std::uint8_t input);

/// Encodes from state 00 without tail bits: L bits in, 2L bits out.
Bits conv_encode(std::span<const std::uint8_t> message);

// ---------------------------------------------------------------------------
// LLRs for "UE inside the beam coverage" vs "outside", from one received power.

enum class LlrKind { chi_squared, gaussian };

/// log I0(z) for z >= 0. Power series up to z = 20, asymptotic expansion above.
double log_bessel_i0(double z);

/// -A^2/sigma^2 + log I0(2*sqrt(A^2*x)/sigma^2). Exact for the noncentral
/// chi-squared (2 dof) power under a complex Gaussian noise model.
double chi2_llr(double power, double amplitude, double noise_power);

/// Gaussian surrogate with means sigma^2 / sigma^2 + A^2 and common variance
/// sigma^4: (x - sigma^2 - A^2/2) * A^2 / sigma^4.
double gaussian_llr(double power, double amplitude, double noise_power);

double layer_llr(LlrKind kind, double power, double amplitude, double noise_power);

// ---------------------------------------------------------------------------
// Viterbi

/// Survivor losses and paths of the 4-state trellis after `level` steps.
/// An unreachable state carries +inf loss.
struct TrellisState {
  std::array<double, kConvStates> losses{};
  std::array<Bits, kConvStates> paths{};
  int level = 0;

  /// Encoder known to start in state 00.
  static TrellisState initial();
  /// All four states start with zero loss.
  static TrellisState uniform();

  bool reachable(int state) const;
  /// Minimum-loss state, lowest index on ties.
  int best_state() const;
};

/// One add-compare-select step over coded layers (2l-1, 2l). A branch with
/// output bit 1 subtracts that layer's LLR, a 0 bit adds it; the smaller of
/// the two incoming losses survives, ties go to the lower predecessor.
TrellisState viterbi_step(const TrellisState& state, double llr1, double llr2);

/// Full forward pass from state 00; returns the survivor path of the
/// minimum-loss terminal state.
Bits viterbi_decode(std::span<const double> llrs);

/// Exhaustive maximum-likelihood index decision: argmax over indices i of
/// sum over layers covered by i of the layer's LLR. `patterns[i][l]` is 1 when
/// index i is inside the coverage of layer l. Ties resolve to the lowest index.
std::size_t ml_decode_llrs(std::span<const double> llrs, const std::vector<Bits>& patterns);

/// Same decision from raw powers using the chi-squared LLR per layer.
std::size_t ml_decode(std::span<const double> powers, const std::vector<Bits>& patterns,
                      std::span<const double> amplitudes, double noise_power);

}  // namespace cbt
