#pragma once

// Beamforming codeword synthesis: the DFT (exhaustive) codebook, target gain
// profiles for a coverage set and Gerchberg-Saxton multi-mainlobe design.
//
// Gain convention: the beam gain of a codeword w toward phi is
//   g(phi) = sqrt(N) * alpha(phi) . w = sum_k exp(-j*pi*k*phi) * w_k,
// so a DFT codeword peaks at sqrt(N) and any unit-norm codeword satisfies
// integral_{-1}^{1} |g|^2 dphi = 2, matching the ideal sqrt(2/|B|) plateau.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "cbt/array_channel.hpp"
#include "cbt/beampattern.hpp"

namespace cbt {

/// Spatial direction of DFT codeword `index` (1-based): -1 + (2n-1)/N.
double dft_direction(int index, int n_antennas);
/// DFT codeword whose segment contains phi (1-based).
int dft_index_of(double phi, int n_antennas);

/// Beamformers conj(alpha(phi_n)) for n = 1..N.
std::vector<ComplexVector> dft_codebook(int n_antennas);

struct GainSpec {
  std::vector<double> sample_angles;
  std::vector<double> target_magnitudes;
  CoverageSet coverage;
};

/// Uniform cell midpoints -1 + (2n+1)/K, n = 0..K-1. No sample sits on a
/// segment boundary.
std::vector<double> uniform_angles(int n_samples);

/// Target sqrt(2/|B|) on the coverage, 0 elsewhere. Throws on empty coverage.
GainSpec desired_gain(const CoverageSet& coverage, int n_samples);

/// N x K manifold A with column n = conj(sqrt(N) * alpha(phi_n))^T on the
/// uniform grid, so (A^H v)_n = g(phi_n).
///
/// On this grid A A^H = K I, which lets both products run as zero-padded
/// K-point FFTs with a per-antenna phase ramp. `dense()` materializes A for
/// checks.
class ManifoldMatrix {
 public:
  ManifoldMatrix(int n_antennas, int n_samples);

  int n_antennas() const { return n_antennas_; }
  int n_samples() const { return n_samples_; }
  const std::vector<double>& sample_angles() const { return angles_; }

  /// A^H v, length K.
  ComplexVector adjoint_apply(const ComplexVector& v) const;
  /// (A A^H)^{-1} A g, length N.
  ComplexVector least_squares(const ComplexVector& g) const;

  Eigen::MatrixXcd dense() const;

 private:
  struct Plans;

  int n_antennas_;
  int n_samples_;
  std::vector<double> angles_;
  std::vector<Complex> ramp_;  // exp(-j*pi*k*phi_0)
  std::shared_ptr<const Plans> plans_;
};

struct GsTrace {
  ComplexVector codeword;
  /// || |A^H v_i| - |g| ||_2 after each iteration, before normalization.
  std::vector<double> residuals;
};

/// GS codeword design with seeded random initial phases; output has unit norm.
ComplexVector gs_design(const GainSpec& spec, const ManifoldMatrix& manifold, int max_iters,
                        std::uint64_t seed);
GsTrace gs_design_traced(const GainSpec& spec, const ManifoldMatrix& manifold, int max_iters,
                         std::uint64_t seed);

/// g(phi) for each angle under the convention above.
std::vector<Complex> beam_gain_profile(const ComplexVector& codeword,
                                       const std::vector<double>& angles);

/// Mean in-coverage over mean out-of-coverage power of a beam, in dB,
/// evaluated on `angles`.
double coverage_contrast_db(const ComplexVector& codeword, const CoverageSet& coverage,
                            const std::vector<double>& angles);

struct SynthesisOptions {
  int oversampling = 4;  // K = oversampling * N
  int max_iters = 100;
  std::uint64_t seed = 1;
};

/// Memoized GS beams keyed by the exact coverage set. Each beam's initial
/// phases come from a seed derived from (options.seed, coverage), so results
/// do not depend on request order. Safe for concurrent use.
class BeamSynthesizer {
 public:
  BeamSynthesizer(int n_antennas, SynthesisOptions options = {});

  int n_antennas() const { return manifold_.n_antennas(); }
  const ManifoldMatrix& manifold() const { return manifold_; }
  const SynthesisOptions& options() const { return options_; }

  /// Returned reference stays valid for the synthesizer's lifetime.
  const ComplexVector& beam(const CoverageSet& coverage) const;

  std::size_t cache_size() const;

 private:
  ManifoldMatrix manifold_;
  SynthesisOptions options_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::string, std::unique_ptr<ComplexVector>> cache_;
};

std::uint64_t coverage_seed(std::uint64_t base_seed, const CoverageSet& coverage);

/// Layered codebook with a variable number of codewords per layer.
struct Codebook {
  int n_antennas = 0;
  int n_samples = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<ComplexVector>> layers;

  int n_layers() const { return static_cast<int>(layers.size()); }
};

/// Hamming(7,4) codebook: 7 layers x 2 complementary GS beams at N = 16.
Codebook hamming_codebook(const BeamSynthesizer& synth);
/// Fixed convolutional codebook: 2L single-beam layers then the DFT bottom layer.
Codebook conv_codebook(const BeamSynthesizer& synth);
/// Binary-search codebook: layer l holds 2^l dyadic beams; the last layer is DFT.
Codebook hierarchical_codebook(const BeamSynthesizer& synth);

/// Binary layout (little endian):
///   char[8] "CBTCBK01", u32 n_antennas, u32 n_layers, u32 n_samples, u64 seed,
///   u32 codewords-per-layer x n_layers,
///   then each codeword as n_antennas x (f64 real, f64 imag), layer-major.
void write_codebook(std::ostream& os, const Codebook& book);
Codebook read_codebook(std::istream& is);

}  // namespace cbt
