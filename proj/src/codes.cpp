#include "cbt/codes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cbt {

std::size_t bintodec(std::span<const std::uint8_t> bits) {
  std::size_t value = 0;
  for (auto b : bits) value = (value << 1) | (b & 1u);
  return value;
}

Bits dectobin(std::size_t value, int width) {
  Bits bits(static_cast<std::size_t>(width));
  for (int i = width - 1; i >= 0; --i) {
    bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value & 1u);
    value >>= 1;
  }
  return bits;
}

// ---------------------------------------------------------------------------

const HammingCode74::Generator& HammingCode74::generator() {
  static const Generator g = {{
      {1, 0, 0, 0, 1, 1, 1},
      {0, 1, 0, 0, 1, 1, 0},
      {0, 0, 1, 0, 1, 0, 1},
      {0, 0, 0, 1, 0, 1, 1},
  }};
  return g;
}

const HammingCode74::ParityCheck& HammingCode74::parity_check() {
  static const ParityCheck h = {{
      {1, 1, 1, 0, 1, 0, 0},
      {1, 1, 0, 1, 0, 1, 0},
      {1, 0, 1, 1, 0, 0, 1},
  }};
  return h;
}

int HammingCode74::error_position(std::array<std::uint8_t, 3> s) {
  // Error pattern table: b1 111, b2 110, b3 101, b4 011, b5 100, b6 010, b7 001.
  const int code = (s[0] << 2) | (s[1] << 1) | s[2];
  static constexpr std::array<int, 8> kTable = {0, 7, 6, 4, 5, 3, 2, 1};
  return kTable[static_cast<std::size_t>(code)];
}

Bits HammingCode74::encode(std::span<const std::uint8_t> message) {
  if (message.size() != kMessageBits) {
    throw std::invalid_argument("hamming encode: expected 4 bits, got " +
                                std::to_string(message.size()));
  }
  const auto& g = generator();
  Bits x(kCodeBits, 0);
  for (int r = 0; r < kMessageBits; ++r) {
    if (!message[r]) continue;
    for (int c = 0; c < kCodeBits; ++c) x[c] ^= g[r][c];
  }
  return x;
}

std::array<std::uint8_t, 3> HammingCode74::syndrome(std::span<const std::uint8_t> received) {
  if (received.size() != kCodeBits) {
    throw std::invalid_argument("hamming syndrome: expected 7 bits, got " +
                                std::to_string(received.size()));
  }
  const auto& h = parity_check();
  std::array<std::uint8_t, 3> s{};
  for (int r = 0; r < 3; ++r) {
    std::uint8_t acc = 0;
    for (int c = 0; c < kCodeBits; ++c) acc ^= static_cast<std::uint8_t>(received[c] & h[r][c]);
    s[r] = acc;
  }
  return s;
}

HammingCorrection HammingCode74::correct(std::span<const std::uint8_t> received) {
  HammingCorrection out;
  out.syndrome = syndrome(received);
  out.error_position = error_position(out.syndrome);
  out.corrected.assign(received.begin(), received.end());
  if (out.error_position > 0) out.corrected[out.error_position - 1] ^= 1u;
  return out;
}

// ---------------------------------------------------------------------------

ConvBranch conv_branch(int state, std::uint8_t input) {
  const std::uint8_t m1 = static_cast<std::uint8_t>((state >> 1) & 1);
  const std::uint8_t m2 = static_cast<std::uint8_t>(state & 1);
  const std::uint8_t u = input & 1u;
  ConvBranch br;
  br.out1 = u ^ m1 ^ m2;
  br.out2 = u ^ m2;
  br.next_state = (u << 1) | m1;
  return br;
}

Bits conv_encode(std::span<const std::uint8_t> message) {
  Bits out;
  out.reserve(message.size() * 2);
  int state = 0;
  for (auto u : message) {
    const ConvBranch br = conv_branch(state, u);
    out.push_back(br.out1);
    out.push_back(br.out2);
    state = br.next_state;
  }
  return out;
}

// ---------------------------------------------------------------------------

double log_bessel_i0(double z) {
  if (!(z >= 0.0)) {
    throw std::invalid_argument("log_bessel_i0: argument must be >= 0");
  }
  if (z <= 20.0) {
    const double q = z * z / 4.0;
    double term = 1.0;
    double sum = 1.0;
    for (int m = 1; m < 200; ++m) {
      term *= q / (static_cast<double>(m) * m);
      sum += term;
      if (term < sum * 1e-17) break;
    }
    return std::log(sum);
  }
  // I0(z) ~ e^z / sqrt(2 pi z) * sum_k ((2k-1)!!)^2 / (k! (8z)^k)
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 30; ++k) {
    const double next = term * (2.0 * k - 1) * (2.0 * k - 1) / (k * 8.0 * z);
    if (next > term) break;
    term = next;
    sum += term;
    if (term < 1e-17) break;
  }
  return z - 0.5 * std::log(2.0 * 3.14159265358979323846 * z) + std::log(sum);
}

namespace {

void check_llr_args(double power, double amplitude, double noise_power) {
  if (!(power >= 0.0)) throw std::invalid_argument("llr: power must be >= 0");
  if (!(amplitude >= 0.0)) throw std::invalid_argument("llr: amplitude must be >= 0");
  if (!(noise_power > 0.0)) throw std::invalid_argument("llr: noise power must be > 0");
}

}  // namespace

double chi2_llr(double power, double amplitude, double noise_power) {
  check_llr_args(power, amplitude, noise_power);
  const double a2 = amplitude * amplitude;
  const double z = 2.0 * std::sqrt(a2 * power) / noise_power;
  return -a2 / noise_power + log_bessel_i0(z);
}

double gaussian_llr(double power, double amplitude, double noise_power) {
  check_llr_args(power, amplitude, noise_power);
  const double a2 = amplitude * amplitude;
  return (power - noise_power - a2 / 2.0) * a2 / (noise_power * noise_power);
}

double layer_llr(LlrKind kind, double power, double amplitude, double noise_power) {
  return kind == LlrKind::chi_squared ? chi2_llr(power, amplitude, noise_power)
                                      : gaussian_llr(power, amplitude, noise_power);
}

// ---------------------------------------------------------------------------

TrellisState TrellisState::initial() {
  TrellisState s;
  s.losses.fill(std::numeric_limits<double>::infinity());
  s.losses[0] = 0.0;
  return s;
}

TrellisState TrellisState::uniform() {
  TrellisState s;
  s.losses.fill(0.0);
  return s;
}

bool TrellisState::reachable(int state) const {
  return std::isfinite(losses[static_cast<std::size_t>(state)]);
}

int TrellisState::best_state() const {
  int best = 0;
  for (int s = 1; s < kConvStates; ++s) {
    if (losses[s] < losses[best]) best = s;
  }
  return best;
}

TrellisState viterbi_step(const TrellisState& state, double llr1, double llr2) {
  auto branch_metric = [&](const ConvBranch& br) {
    return (br.out1 ? -llr1 : llr1) + (br.out2 ? -llr2 : llr2);
  };

  TrellisState next;
  next.level = state.level + 1;
  for (int s = 0; s < kConvStates; ++s) {
    // s = (u, m1); predecessors are (m1, 0) and (m1, 1).
    const std::uint8_t input = static_cast<std::uint8_t>((s >> 1) & 1);
    const int m1 = s & 1;
    const int t1 = m1 << 1;
    const int t2 = t1 | 1;
    const double l1 = state.losses[t1] + branch_metric(conv_branch(t1, input));
    const double l2 = state.losses[t2] + branch_metric(conv_branch(t2, input));
    const bool take_second = l2 < l1;
    const int winner = take_second ? t2 : t1;
    next.losses[s] = take_second ? l2 : l1;
    next.paths[s] = state.paths[winner];
    next.paths[s].push_back(input);
  }
  return next;
}

Bits viterbi_decode(std::span<const double> llrs) {
  if (llrs.size() % 2 != 0) {
    throw std::invalid_argument("viterbi_decode: LLR sequence length must be even, got " +
                                std::to_string(llrs.size()));
  }
  TrellisState state = TrellisState::initial();
  for (std::size_t i = 0; i < llrs.size(); i += 2) {
    state = viterbi_step(state, llrs[i], llrs[i + 1]);
  }
  return state.paths[state.best_state()];
}

std::size_t ml_decode_llrs(std::span<const double> llrs, const std::vector<Bits>& patterns) {
  if (patterns.empty()) throw std::invalid_argument("ml_decode: no candidate patterns");
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    const Bits& p = patterns[i];
    if (p.size() != llrs.size()) {
      throw std::invalid_argument("ml_decode: pattern " + std::to_string(i) + " has " +
                                  std::to_string(p.size()) + " layers, expected " +
                                  std::to_string(llrs.size()));
    }
    double score = 0.0;
    for (std::size_t l = 0; l < p.size(); ++l) {
      if (p[l]) score += llrs[l];
    }
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

std::size_t ml_decode(std::span<const double> powers, const std::vector<Bits>& patterns,
                      std::span<const double> amplitudes, double noise_power) {
  if (powers.size() != amplitudes.size()) {
    throw std::invalid_argument("ml_decode: powers and amplitudes differ in length");
  }
  std::vector<double> llrs(powers.size());
  for (std::size_t l = 0; l < powers.size(); ++l) {
    llrs[l] = chi2_llr(powers[l], amplitudes[l], noise_power);
  }
  return ml_decode_llrs(llrs, patterns);
}

}  // namespace cbt
