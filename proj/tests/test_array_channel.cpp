#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cbt/array_channel.hpp"

using namespace cbt;

TEST_CASE("steering vector entries") {
  const auto a = steering_vector(0.0, 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(a.entries(k).real() == doctest::Approx(0.5));
    CHECK(a.entries(k).imag() == doctest::Approx(0.0));
  }

  const auto b = steering_vector(1.0, 2);
  CHECK(b.entries(0).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(b.entries(1).real() == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(std::abs(b.entries(1).imag()) < 1e-15);

  const auto c = steering_vector(0.5, 8);
  for (int k = 0; k < 8; ++k) {
    const Complex want = std::polar(1.0 / std::sqrt(8.0), -kPi * k / 2.0);
    CHECK(std::abs(c.entries(k) - want) < 1e-14);
  }
  CHECK(std::abs(c.entries.dot(c.entries)) == doctest::Approx(1.0));
}

TEST_CASE("steering vector rejects bad input") {
  CHECK_THROWS_AS(steering_vector(1.5, 4), std::invalid_argument);
  CHECK_THROWS_AS(steering_vector(-1.01, 4), std::invalid_argument);
  CHECK_THROWS_AS(steering_vector(0.0, 0), std::invalid_argument);
}

TEST_CASE("line-of-sight channel") {
  const auto h = los_channel(1.0, 0.0, 4);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(h.row_vector(k) - Complex(1.0, 0.0)) < 1e-15);

  const auto z = los_channel(0.0, 0.3, 16);
  CHECK(z.row_vector.norm() == 0.0);

  const Complex beta(0.0, 0.5);
  const auto h2 = los_channel(beta, -0.25, 8);
  const auto a = steering_vector(-0.25, 8);
  for (int k = 0; k < 8; ++k) CHECK(std::abs(h2.row_vector(k) - std::sqrt(8.0) * beta * a.entries(k)) < 1e-15);
}

TEST_CASE("received sample") {
  ChannelRealization ch;
  ch.gains = {1.0};
  ch.directions = {0.0};
  ch.row_vector = ComplexVector::Ones(2);
  ComplexVector w = ComplexVector::Ones(2) / std::sqrt(2.0);
  LinkBudget budget;
  budget.transmit_power = 2.0;
  CHECK(std::abs(received_sample(ch, w, budget, 0.0) - Complex(2.0, 0.0)) < 1e-14);

  ComplexVector orth(2);
  orth << 1.0, -1.0;
  CHECK(std::abs(received_sample(ch, orth, budget, 0.0)) < 1e-15);

  const double phi = 0.3;
  const auto h = los_channel(1.0, phi, 16);
  const LinkBudget unit;
  const Complex y = received_sample(h, steering_vector(phi, 16).as_beamformer(), unit, 0.0);
  CHECK(std::abs(y) == doctest::Approx(4.0));

  ComplexVector wrong = ComplexVector::Ones(3);
  CHECK_THROWS_AS(received_sample(ch, wrong, budget, 0.0), std::invalid_argument);
}

TEST_CASE("received power") {
  CHECK(received_power(Complex(3.0, 4.0)) == doctest::Approx(25.0));
  CHECK(received_power(0.0) == 0.0);
  CHECK(received_power(Complex(2.0, 0.0)) == doctest::Approx(4.0));
}

TEST_CASE("path loss") {
  CHECK(pathloss_gain(300.0, 3.5e9) == doctest::Approx(2.27206912344616e-5).epsilon(1e-12));
  const double lambda = kSpeedOfLight / 28e9;
  CHECK(pathloss_gain(lambda / (4.0 * kPi), 28e9) == doctest::Approx(1.0));
  CHECK_THROWS_AS(pathloss_gain(0.0, 3.5e9), std::invalid_argument);
  CHECK_THROWS_AS(pathloss_gain(10.0, -1.0), std::invalid_argument);
}

TEST_CASE("link budgets") {
  const auto n = LinkBudget::normalized(10.0);
  CHECK(n.snr() == doctest::Approx(10.0));
  const auto d = LinkBudget::at_distance(dbm_to_watts(40.0), dbm_to_watts(-110.0), 3.5e9, 300.0);
  CHECK(d.transmit_power == doctest::Approx(10.0));
  CHECK(d.noise_power == doctest::Approx(1e-14));
  CHECK(10.0 * std::log10(d.snr()) == doctest::Approx(57.13).epsilon(1e-3));
}

TEST_CASE("noise power matches its variance") {
  Rng rng(7);
  const double sigma2 = 0.37;
  double acc = 0.0;
  double re = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Complex z = draw_noise(sigma2, rng);
    acc += std::norm(z);
    re += z.real() * z.real();
  }
  CHECK(acc / n == doctest::Approx(sigma2).epsilon(0.02));
  CHECK(re / n == doctest::Approx(sigma2 / 2.0).epsilon(0.02));
}
