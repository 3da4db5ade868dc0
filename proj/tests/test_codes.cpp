#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "cbt/beampattern.hpp"
#include "cbt/codes.hpp"

using namespace cbt;

namespace {

// Direct shift-register evaluation, kept separate from the library encoder.
Bits shift_register_encode(const Bits& u) {
  Bits out;
  std::uint8_t m1 = 0, m2 = 0;
  for (auto b : u) {
    out.push_back(static_cast<std::uint8_t>(b ^ m1 ^ m2));
    out.push_back(static_cast<std::uint8_t>(b ^ m2));
    m2 = m1;
    m1 = b;
  }
  return out;
}

long double series_log_i0(long double z) {
  long double term = 1.0L, sum = 1.0L;
  const long double q = z * z / 4.0L;
  for (int m = 1; m < 400; ++m) {
    term *= q / (static_cast<long double>(m) * m);
    sum += term;
    if (term < sum * 1e-21L) break;
  }
  return std::log(sum);
}

}  // namespace

TEST_CASE("bintodec and dectobin") {
  CHECK(bintodec(Bits{0, 0, 1, 0}) == 2);
  CHECK(bintodec(Bits{1, 0, 1, 0}) == 10);
  CHECK(dectobin(10, 4) == Bits{1, 0, 1, 0});
  for (std::size_t v = 0; v < 64; ++v) CHECK(bintodec(dectobin(v, 6)) == v);
}

TEST_CASE("hamming encode") {
  CHECK(HammingCode74::encode(Bits{0, 0, 1, 0}) == Bits{0, 0, 1, 0, 1, 0, 1});
  CHECK(HammingCode74::encode(Bits{0, 0, 0, 0}) == Bits(7, 0));
  CHECK(HammingCode74::encode(Bits{1, 0, 0, 0}) == Bits{1, 0, 0, 0, 1, 1, 1});
  CHECK_THROWS(HammingCode74::encode(Bits{1, 0, 0}));
}

TEST_CASE("hamming syndrome table") {
  CHECK(HammingCode74::error_position({1, 1, 1}) == 1);
  CHECK(HammingCode74::error_position({0, 0, 0}) == 0);
  CHECK(HammingCode74::error_position({1, 0, 0}) == 5);
  Bits x(7, 0);
  x[4] = 1;
  const auto fix = HammingCode74::correct(x);
  CHECK(fix.syndrome == std::array<std::uint8_t, 3>{1, 0, 0});
  CHECK(fix.corrected == Bits(7, 0));
}

TEST_CASE("hamming corrects every single-bit error") {
  int cases = 0;
  for (std::size_t m = 0; m < 16; ++m) {
    const Bits c = HammingCode74::encode(dectobin(m, 4));
    const auto clean = HammingCode74::correct(c);
    CHECK(clean.syndrome == std::array<std::uint8_t, 3>{0, 0, 0});
    CHECK(clean.error_position == 0);
    for (int pos = 0; pos < 7; ++pos) {
      Bits r = c;
      r[static_cast<std::size_t>(pos)] ^= 1;
      const auto fix = HammingCode74::correct(r);
      CHECK(fix.corrected == c);
      CHECK(fix.error_position == pos + 1);
      ++cases;
    }
  }
  CHECK(cases == 112);
}

TEST_CASE("hamming worked example") {
  const auto fix = HammingCode74::correct(Bits{1, 0, 1, 0, 1, 0, 1});
  CHECK(fix.syndrome == std::array<std::uint8_t, 3>{1, 1, 1});
  CHECK(fix.error_position == 1);
  CHECK(fix.corrected == Bits{0, 0, 1, 0, 1, 0, 1});
  CHECK(bintodec(std::span(fix.corrected).first(4)) + 1 == 3);
}

TEST_CASE("convolutional encoder") {
  CHECK(conv_encode(Bits{1}) == Bits{1, 1});
  CHECK(conv_encode(Bits{1, 0, 0}) == Bits{1, 1, 1, 0, 1, 1});
  CHECK(conv_encode(Bits(5, 0)) == Bits(10, 0));
  CHECK(conv_branch(0, 1).next_state == 2);
  CHECK(conv_branch(2, 0).next_state == 1);
  CHECK(conv_branch(1, 0).next_state == 0);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    Bits a(9), b(9), s(9);
    for (int i = 0; i < 9; ++i) {
      a[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(rng() & 1);
      b[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(rng() & 1);
      s[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)] ^ b[static_cast<std::size_t>(i)];
    }
    CHECK(conv_encode(a) == shift_register_encode(a));
    const Bits ea = conv_encode(a), eb = conv_encode(b), es = conv_encode(s);
    for (std::size_t i = 0; i < es.size(); ++i) CHECK(es[i] == (ea[i] ^ eb[i]));
  }
}

TEST_CASE("log I0 against series oracle") {
  CHECK(log_bessel_i0(0.0) == 0.0);
  CHECK(log_bessel_i0(2.0) == doctest::Approx(0.823993541482956).epsilon(1e-12));
  CHECK(log_bessel_i0(100.0) == doctest::Approx(96.7797326899426).epsilon(1e-12));
  CHECK(log_bessel_i0(1000.0) == doctest::Approx(995.627308889869).epsilon(1e-12));
  for (double z = 0.0; z <= 20.0; z += 0.05) {
    const double want = static_cast<double>(series_log_i0(z));
    CHECK(std::abs(log_bessel_i0(z) - want) <= 1e-9 * std::max(1.0, std::abs(want)));
  }
  for (double z = 20.0; z <= 600.0; z += 7.3) {
    CHECK(log_bessel_i0(z) == doctest::Approx(std::log(std::cyl_bessel_i(0.0, z))).epsilon(1e-10));
  }
  CHECK_THROWS_AS(log_bessel_i0(-1.0), std::invalid_argument);
}

TEST_CASE("chi-squared LLR") {
  CHECK(chi2_llr(1.0, 1.0, 1.0) == doctest::Approx(-0.176006458517044).epsilon(1e-9));
  CHECK(chi2_llr(0.0, 2.0, 0.5) == doctest::Approx(-8.0));
  CHECK(chi2_llr(3.7, 0.0, 0.5) == 0.0);
  CHECK(chi2_llr(0.0, 1.0, 1.0) < 0.0);
  CHECK(chi2_llr(10.0, 1.0, 1.0) > 0.0);
  CHECK_THROWS_AS(chi2_llr(-1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(chi2_llr(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("gaussian LLR") {
  CHECK(gaussian_llr(1.5, 1.0, 1.0) == doctest::Approx(0.0));
  CHECK(gaussian_llr(2.0, 1.0, 1.0) == doctest::Approx(0.5));
  CHECK(gaussian_llr(0.3 + 0.5 * 4.0, 2.0, 0.3) == doctest::Approx(0.0));
  CHECK(layer_llr(LlrKind::gaussian, 2.0, 1.0, 1.0) == doctest::Approx(0.5));
  CHECK(layer_llr(LlrKind::chi_squared, 1.0, 1.0, 1.0) == doctest::Approx(chi2_llr(1.0, 1.0, 1.0)));
}

TEST_CASE("viterbi step example") {
  const auto next = viterbi_step(TrellisState::uniform(), 10.0, 10.0);
  CHECK(next.level == 1);
  CHECK(next.losses[2] == doctest::Approx(-20.0));
  CHECK(next.paths[2] == Bits{1});
  // 01 with input 0 also emits 11.
  CHECK(next.losses[0] == doctest::Approx(-20.0));
}

TEST_CASE("viterbi trellis from state 00") {
  const auto s = TrellisState::initial();
  CHECK(s.reachable(0));
  CHECK_FALSE(s.reachable(1));
  const auto one = viterbi_step(s, 1.0, -1.0);
  CHECK(one.reachable(0));
  CHECK(one.reachable(2));
  CHECK_FALSE(one.reachable(1));
  CHECK_FALSE(one.reachable(3));
  const auto two = viterbi_step(one, 0.0, 0.0);
  for (int st = 0; st < 4; ++st) CHECK(two.reachable(st));
  for (const auto& p : two.paths) CHECK(p.size() == 2);
}

TEST_CASE("viterbi ties resolve to zeros") {
  CHECK(viterbi_decode(std::vector<double>(12, 0.0)) == Bits(6, 0));
  CHECK_THROWS(viterbi_decode(std::vector<double>(5, 1.0)));
}

TEST_CASE("viterbi round trip for all length-9 messages") {
  for (std::size_t m = 0; m < 512; ++m) {
    const Bits u = dectobin(m, 9);
    const Bits c = conv_encode(u);
    std::vector<double> llr;
    for (auto b : c) llr.push_back(b ? 1e6 : -1e6);
    CHECK(viterbi_decode(llr) == u);
  }
}

TEST_CASE("viterbi matches exhaustive ML") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 2.0);
  int compared = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int L = 1 + trial % 6;
    const auto patterns = conv_pattern(L).columns();
    std::vector<double> llr(static_cast<std::size_t>(2 * L));
    for (auto& v : llr) v = g(rng);

    double best = -std::numeric_limits<double>::infinity();
    int count_best = 0;
    for (const auto& p : patterns) {
      double s = 0.0;
      for (std::size_t l = 0; l < p.size(); ++l) if (p[l]) s += llr[l];
      if (s > best + 1e-12) {
        best = s;
        count_best = 1;
      } else if (std::abs(s - best) <= 1e-12) {
        ++count_best;
      }
    }
    if (count_best != 1) continue;
    ++compared;
    CHECK(bintodec(viterbi_decode(llr)) == ml_decode_llrs(llr, patterns));
  }
  CHECK(compared > 9000);
}

TEST_CASE("ml decode from noiseless powers") {
  const int L = 4;
  const auto patterns = conv_pattern(L).columns();
  const std::vector<double> amp(2 * L, 3.0);
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    std::vector<double> x;
    for (auto b : patterns[i]) x.push_back(b ? 9.0 : 0.0);
    CHECK(ml_decode(x, patterns, amp, 0.01) == i);
  }
  CHECK_THROWS(ml_decode(std::vector<double>(3, 0.0), patterns, amp, 1.0));
}
