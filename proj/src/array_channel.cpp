#include "cbt/array_channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cbt {

SteeringVector steering_vector(double phi, int n_antennas) {
  if (n_antennas < 1) {
    throw std::invalid_argument("steering_vector: n_antennas must be >= 1");
  }
  if (!(phi >= -1.0 && phi <= 1.0)) {
    throw std::invalid_argument("steering_vector: phi out of [-1, 1]: " + std::to_string(phi));
  }
  SteeringVector sv;
  sv.spatial_direction = phi;
  sv.entries.resize(n_antennas);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_antennas));
  for (int k = 0; k < n_antennas; ++k) {
    sv.entries(k) = std::polar(scale, -kPi * k * phi);
  }
  return sv;
}

ChannelRealization los_channel(Complex beta, double phi, int n_antennas) {
  ChannelRealization ch;
  ch.gains = {beta};
  ch.directions = {phi};
  ch.row_vector = std::sqrt(static_cast<double>(n_antennas)) * beta *
                  steering_vector(phi, n_antennas).entries;
  return ch;
}

LinkBudget LinkBudget::normalized(double snr_db) {
  LinkBudget b;
  b.transmit_power = 1.0;
  b.noise_power = std::pow(10.0, -snr_db / 10.0);
  b.pathloss_gain = 1.0;
  return b;
}

LinkBudget LinkBudget::at_distance(double transmit_power_w, double noise_power_w,
                                   double carrier_frequency_hz, double distance_m) {
  LinkBudget b;
  b.transmit_power = transmit_power_w;
  b.noise_power = noise_power_w;
  b.carrier_frequency = carrier_frequency_hz;
  b.distance = distance_m;
  b.pathloss_gain = cbt::pathloss_gain(distance_m, carrier_frequency_hz);
  b.validate();
  return b;
}

double LinkBudget::snr() const {
  return transmit_power * pathloss_gain * pathloss_gain / noise_power;
}

void LinkBudget::validate() const {
  if (!(transmit_power > 0.0) || !(noise_power > 0.0)) {
    throw std::invalid_argument("LinkBudget: powers must be strictly positive");
  }
  if (!(pathloss_gain > 0.0)) {
    throw std::invalid_argument("LinkBudget: pathloss gain must be positive");
  }
}

Complex received_sample(const ChannelRealization& channel, const ComplexVector& beamformer,
                        const LinkBudget& budget, Complex noise) {
  if (channel.row_vector.size() != beamformer.size()) {
    throw std::invalid_argument("received_sample: channel has " +
                                std::to_string(channel.row_vector.size()) +
                                " antennas, beamformer has " +
                                std::to_string(beamformer.size()));
  }
  const Complex hw = (channel.row_vector.transpose() * beamformer)(0);
  return std::sqrt(budget.transmit_power) * budget.pathloss_gain * hw + noise;
}

double pathloss_gain(double distance_m, double carrier_frequency_hz) {
  if (!(distance_m > 0.0) || !(carrier_frequency_hz > 0.0)) {
    throw std::invalid_argument("pathloss_gain: distance and frequency must be positive");
  }
  const double wavelength = kSpeedOfLight / carrier_frequency_hz;
  return wavelength / (4.0 * kPi * distance_m);
}

Complex draw_noise(double noise_power, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(noise_power / 2.0));
  const double re = gauss(rng);
  const double im = gauss(rng);
  return {re, im};
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace cbt
