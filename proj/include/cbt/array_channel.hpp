#pragma once

// ULA array-manifold math, line-of-sight channel generation and the noisy
// received-signal model used by every training procedure.

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace cbt {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using Rng = std::mt19937_64;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;

/// Row steering vector of an N-element half-wavelength ULA.
///
/// Entry k is exp(-j*pi*k*phi)/sqrt(N), so the vector has unit norm. The
/// matching beamformer (column) is the conjugate, see `as_beamformer`.
struct SteeringVector {
  ComplexVector entries;
  double spatial_direction = 0.0;

  int size() const { return static_cast<int>(entries.size()); }
  ComplexVector as_beamformer() const { return entries.conjugate(); }
};

SteeringVector steering_vector(double phi, int n_antennas);

/// Multipath channel row vector h = sqrt(N/L0) * sum_l beta_l * alpha(phi_l).
struct ChannelRealization {
  std::vector<Complex> gains;
  std::vector<double> directions;
  ComplexVector row_vector;

  int n_paths() const { return static_cast<int>(gains.size()); }
  int n_antennas() const { return static_cast<int>(row_vector.size()); }
};

ChannelRealization los_channel(Complex beta, double phi, int n_antennas);

/// Powers in watts. `pathloss_gain` is the amplitude factor gamma applied to
/// the channel; it is 1 in normalized-SNR mode.
struct LinkBudget {
  double transmit_power = 1.0;
  double noise_power = 1.0;
  double pathloss_gain = 1.0;
  double carrier_frequency = 3.5e9;
  double distance = 0.0;  // 0 in normalized-SNR mode

  /// P = 1, sigma^2 = 10^(-snr_db/10), gamma = 1.
  static LinkBudget normalized(double snr_db);
  static LinkBudget at_distance(double transmit_power_w, double noise_power_w,
                                double carrier_frequency_hz, double distance_m);

  /// Per-antenna SNR P*gamma^2/sigma^2 (unit |beta|).
  double snr() const;
  void validate() const;
};

/// y = sqrt(P) * gamma * (h . w) * s0 + n with s0 = 1. `h . w` is the plain
/// (non-conjugating) product of the row channel and the column beamformer.
Complex received_sample(const ChannelRealization& channel, const ComplexVector& beamformer,
                        const LinkBudget& budget, Complex noise);

inline double received_power(Complex sample) { return std::norm(sample); }

/// gamma = (c / f_c) / (4 * pi * d).
double pathloss_gain(double distance_m, double carrier_frequency_hz);

/// Circularly-symmetric complex Gaussian draw with E|n|^2 = noise_power.
Complex draw_noise(double noise_power, Rng& rng);

double dbm_to_watts(double dbm);

}  // namespace cbt
