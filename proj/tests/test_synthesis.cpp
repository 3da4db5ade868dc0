#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cbt/synthesis.hpp"

using namespace cbt;

TEST_CASE("dft codebook") {
  const auto w = dft_codebook(2);
  CHECK(w.size() == 2);
  CHECK(std::abs(w[0](1) - steering_vector(-0.5, 2).entries.conjugate()(1)) < 1e-15);
  CHECK(dft_direction(3, 16) == doctest::Approx(-11.0 / 16.0));
  CHECK(dft_index_of(-11.0 / 16.0, 16) == 3);
  CHECK(dft_index_of(1.0, 16) == 16);
  for (int n = 1; n <= 64; ++n) CHECK(dft_index_of(dft_direction(n, 64), 64) == n);
}

TEST_CASE("desired gain") {
  const auto full = desired_gain(CoverageSet::full(4), 64);
  for (double m : full.target_magnitudes) CHECK(m == doctest::Approx(1.0));
  const auto half = desired_gain(CoverageSet(2, Bits{1, 0}), 64);
  CHECK(half.target_magnitudes.front() == doctest::Approx(std::sqrt(2.0)));
  CHECK(half.target_magnitudes.back() == 0.0);
  CHECK_THROWS_AS(desired_gain(CoverageSet::empty(4), 64), std::invalid_argument);
}

TEST_CASE("manifold FFT products match the dense matrix") {
  const ManifoldMatrix m(16, 64);
  const Eigen::MatrixXcd a = m.dense();
  CHECK((a * a.adjoint() - 64.0 * Eigen::MatrixXcd::Identity(16, 16)).norm() < 1e-9);

  Rng rng(5);
  std::normal_distribution<double> g;
  ComplexVector v(16), gk(64);
  for (int i = 0; i < 16; ++i) v(i) = Complex(g(rng), g(rng));
  for (int i = 0; i < 64; ++i) gk(i) = Complex(g(rng), g(rng));

  CHECK((m.adjoint_apply(v) - a.adjoint() * v).norm() < 1e-10);
  const ComplexVector ls = (a * a.adjoint()).ldlt().solve(a * gk);
  CHECK((m.least_squares(gk) - ls).norm() < 1e-10);

  const auto profile = beam_gain_profile(v, m.sample_angles());
  const ComplexVector direct = m.adjoint_apply(v);
  for (int i = 0; i < 64; ++i) CHECK(std::abs(profile[static_cast<std::size_t>(i)] - direct(i)) < 1e-10);

  CHECK_THROWS_AS(ManifoldMatrix(16, 8), std::invalid_argument);
}

TEST_CASE("beam gain of a DFT codeword") {
  const int n = 32;
  const double phi = dft_direction(7, n);
  const auto w = dft_codebook(n)[6];
  const auto g = beam_gain_profile(w, {phi});
  CHECK(std::abs(g[0]) == doctest::Approx(std::sqrt(static_cast<double>(n))));
  CHECK(std::abs(beam_gain_profile(ComplexVector::Zero(n), {0.1})[0]) == 0.0);
}

TEST_CASE("GS design") {
  const int n = 64;
  const ManifoldMatrix m(n, 4 * n);
  const CoverageSet cov(8, Bits{1, 0, 0, 1, 1, 0, 0, 0});
  const auto spec = desired_gain(cov, 4 * n);

  const auto trace = gs_design_traced(spec, m, 100, 42);
  CHECK(trace.codeword.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trace.residuals.size() == 100);
  for (std::size_t i = 1; i < trace.residuals.size(); ++i) {
    CHECK(trace.residuals[i] <= trace.residuals[i - 1] * (1.0 + 1e-12));
  }

  const auto again = gs_design(spec, m, 100, 42);
  CHECK(again == trace.codeword);
  CHECK_FALSE(gs_design(spec, m, 100, 43) == trace.codeword);

  CHECK(coverage_contrast_db(trace.codeword, cov, uniform_angles(4096)) >= 8.0);
}

TEST_CASE("GS beam follows the 3 dB DFT comparison") {
  // A one-segment GS beam at width 2/N should track the DFT codeword it replaces.
  const int n = 32;
  const BeamSynthesizer synth(n);
  const int seg[] = {9};
  const auto& w = synth.beam(CoverageSet::from_segments(n, seg));
  const double center = dft_direction(10, n);
  const double gs = std::norm(beam_gain_profile(w, {center})[0]);
  const double dft = std::norm(beam_gain_profile(dft_codebook(n)[9], {center})[0]);
  CHECK(10.0 * std::log10(dft / gs) < 3.0);
}

TEST_CASE("synthesizer cache") {
  const BeamSynthesizer synth(16);
  const CoverageSet a(4, Bits{1, 0, 0, 0});
  const auto& w1 = synth.beam(a);
  const auto& w2 = synth.beam(a);
  CHECK(&w1 == &w2);
  CHECK(synth.cache_size() == 1);
  synth.beam(a.refined(8));
  CHECK(synth.cache_size() == 2);
  CHECK(coverage_seed(1, a) != coverage_seed(2, a));
}

TEST_CASE("codebooks") {
  const BeamSynthesizer synth(16);
  const auto ham = hamming_codebook(synth);
  CHECK(ham.n_layers() == 7);
  for (const auto& layer : ham.layers) CHECK(layer.size() == 2);

  const auto conv = conv_codebook(synth);
  CHECK(conv.n_layers() == 7);
  CHECK(conv.layers.back().size() == 16);

  const auto hier = hierarchical_codebook(synth);
  CHECK(hier.n_layers() == 4);
  for (int l = 0; l < 4; ++l) CHECK(hier.layers[static_cast<std::size_t>(l)].size() == (2u << l));

  CHECK_THROWS(hamming_codebook(BeamSynthesizer(32)));
}

TEST_CASE("codebook round trip") {
  const BeamSynthesizer synth(16, SynthesisOptions{4, 50, 9});
  const auto book = conv_codebook(synth);
  std::stringstream ss;
  write_codebook(ss, book);
  const std::string bytes = ss.str();
  CHECK(bytes.substr(0, 8) == "CBTCBK01");

  const auto back = read_codebook(ss);
  CHECK(back.n_antennas == 16);
  CHECK(back.n_samples == 64);
  CHECK(back.seed == 9);
  REQUIRE(back.n_layers() == book.n_layers());
  for (std::size_t l = 0; l < book.layers.size(); ++l) {
    REQUIRE(back.layers[l].size() == book.layers[l].size());
    for (std::size_t i = 0; i < book.layers[l].size(); ++i) CHECK(back.layers[l][i] == book.layers[l][i]);
  }

  std::stringstream bad("NOTACODEBOOK");
  CHECK_THROWS(read_codebook(bad));
}
