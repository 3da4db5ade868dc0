#include "cbt/synthesis.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <mutex>
#include <ostream>
#include <random>
#include <stdexcept>

#include <fftw3.h>

namespace cbt {

double dft_direction(int index, int n_antennas) {
  return -1.0 + (2.0 * index - 1.0) / n_antennas;
}

int dft_index_of(double phi, int n_antennas) { return segment_of(phi, n_antennas) + 1; }

std::vector<ComplexVector> dft_codebook(int n_antennas) {
  if (n_antennas < 1) throw std::invalid_argument("dft_codebook: n_antennas must be >= 1");
  std::vector<ComplexVector> book;
  book.reserve(static_cast<std::size_t>(n_antennas));
  for (int n = 1; n <= n_antennas; ++n) {
    book.push_back(steering_vector(dft_direction(n, n_antennas), n_antennas).as_beamformer());
  }
  return book;
}

std::vector<double> uniform_angles(int n_samples) {
  std::vector<double> a(static_cast<std::size_t>(n_samples));
  for (int n = 0; n < n_samples; ++n) a[static_cast<std::size_t>(n)] = -1.0 + (2.0 * n + 1.0) / n_samples;
  return a;
}

GainSpec desired_gain(const CoverageSet& coverage, int n_samples) {
  if (coverage.is_empty()) throw std::invalid_argument("desired_gain: empty coverage");
  GainSpec spec;
  spec.coverage = coverage;
  spec.sample_angles = uniform_angles(n_samples);
  const double level = std::sqrt(2.0 / coverage.measure());
  spec.target_magnitudes.resize(spec.sample_angles.size());
  for (std::size_t n = 0; n < spec.sample_angles.size(); ++n) {
    spec.target_magnitudes[n] = coverage.contains(spec.sample_angles[n]) ? level : 0.0;
  }
  return spec;
}

// ---------------------------------------------------------------------------

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

struct ManifoldMatrix::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Plans(int k) {
    std::lock_guard lock(planner_mutex());
    auto* in = fftw_alloc_complex(static_cast<std::size_t>(k));
    auto* out = fftw_alloc_complex(static_cast<std::size_t>(k));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward = fftw_plan_dft_1d(k, in, out, FFTW_FORWARD, flags);
    backward = fftw_plan_dft_1d(k, in, out, FFTW_BACKWARD, flags);
    fftw_free(in);
    fftw_free(out);
    if (!forward || !backward) throw std::runtime_error("ManifoldMatrix: FFT planning failed");
  }
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

ManifoldMatrix::ManifoldMatrix(int n_antennas, int n_samples)
    : n_antennas_(n_antennas), n_samples_(n_samples), angles_(uniform_angles(n_samples)) {
  if (n_antennas < 1 || n_samples < n_antennas) {
    // With fewer samples than antennas A A^H is singular.
    throw std::invalid_argument("ManifoldMatrix: need n_samples >= n_antennas >= 1");
  }
  plans_ = std::make_shared<const Plans>(n_samples);
  ramp_.resize(static_cast<std::size_t>(n_antennas));
  for (int k = 0; k < n_antennas; ++k) ramp_[static_cast<std::size_t>(k)] = std::polar(1.0, -kPi * k * angles_.front());
}

ComplexVector ManifoldMatrix::adjoint_apply(const ComplexVector& v) const {
  if (v.size() != n_antennas_) throw std::invalid_argument("adjoint_apply: size mismatch");
  ComplexVector in = ComplexVector::Zero(n_samples_);
  for (int k = 0; k < n_antennas_; ++k) in(k) = ramp_[static_cast<std::size_t>(k)] * v(k);
  ComplexVector out(n_samples_);
  fftw_execute_dft(plans_->forward, as_fftw(in.data()), as_fftw(out.data()));
  return out;
}

ComplexVector ManifoldMatrix::least_squares(const ComplexVector& g) const {
  if (g.size() != n_samples_) throw std::invalid_argument("least_squares: size mismatch");
  ComplexVector in = g;
  ComplexVector out(n_samples_);
  fftw_execute_dft(plans_->backward, as_fftw(in.data()), as_fftw(out.data()));
  ComplexVector v(n_antennas_);
  const double scale = 1.0 / n_samples_;
  for (int k = 0; k < n_antennas_; ++k) v(k) = scale * std::conj(ramp_[static_cast<std::size_t>(k)]) * out(k);
  return v;
}

Eigen::MatrixXcd ManifoldMatrix::dense() const {
  Eigen::MatrixXcd a(n_antennas_, n_samples_);
  for (int n = 0; n < n_samples_; ++n) {
    for (int k = 0; k < n_antennas_; ++k) a(k, n) = std::polar(1.0, kPi * k * angles_[static_cast<std::size_t>(n)]);
  }
  return a;
}

// ---------------------------------------------------------------------------

GsTrace gs_design_traced(const GainSpec& spec, const ManifoldMatrix& manifold, int max_iters,
                         std::uint64_t seed) {
  if (max_iters < 1) throw std::invalid_argument("gs_design: max_iters must be >= 1");
  const int k = manifold.n_samples();
  if (static_cast<int>(spec.target_magnitudes.size()) != k) {
    throw std::invalid_argument("gs_design: gain spec and manifold sample counts differ");
  }

  Rng rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  ComplexVector g(k);
  for (int n = 0; n < k; ++n) g(n) = std::polar(spec.target_magnitudes[static_cast<std::size_t>(n)], phase(rng));

  GsTrace trace;
  trace.residuals.reserve(static_cast<std::size_t>(max_iters));
  for (int it = 0; it < max_iters; ++it) {
    const ComplexVector v = manifold.least_squares(g);
    const ComplexVector beam = manifold.adjoint_apply(v);
    double residual = 0.0;
    for (int n = 0; n < k; ++n) {
      const double target = spec.target_magnitudes[static_cast<std::size_t>(n)];
      const double mag = std::abs(beam(n));
      residual += (mag - target) * (mag - target);
      // Keep the target magnitude, take the current phase.
      g(n) = mag > 0.0 ? beam(n) * (target / mag) : Complex(target, 0.0);
    }
    trace.residuals.push_back(std::sqrt(residual));
  }

  ComplexVector w = manifold.least_squares(g);
  const double norm = w.norm();
  if (!(norm > 0.0)) throw std::runtime_error("gs_design: degenerate zero codeword");
  trace.codeword = w / norm;
  return trace;
}

ComplexVector gs_design(const GainSpec& spec, const ManifoldMatrix& manifold, int max_iters,
                        std::uint64_t seed) {
  return gs_design_traced(spec, manifold, max_iters, seed).codeword;
}

std::vector<Complex> beam_gain_profile(const ComplexVector& codeword,
                                       const std::vector<double>& angles) {
  std::vector<Complex> out;
  out.reserve(angles.size());
  for (double phi : angles) {
    Complex acc = 0.0;
    for (Eigen::Index k = 0; k < codeword.size(); ++k) {
      acc += std::polar(1.0, -kPi * static_cast<double>(k) * phi) * codeword(k);
    }
    out.push_back(acc);
  }
  return out;
}

double coverage_contrast_db(const ComplexVector& codeword, const CoverageSet& coverage,
                            const std::vector<double>& angles) {
  const auto profile = beam_gain_profile(codeword, angles);
  double in_sum = 0.0, out_sum = 0.0;
  int in_n = 0, out_n = 0;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (coverage.contains(angles[i])) {
      in_sum += std::norm(profile[i]);
      ++in_n;
    } else {
      out_sum += std::norm(profile[i]);
      ++out_n;
    }
  }
  if (in_n == 0 || out_n == 0) throw std::invalid_argument("coverage_contrast_db: trivial coverage");
  return 10.0 * std::log10((in_sum / in_n) / (out_sum / out_n));
}

// ---------------------------------------------------------------------------

std::uint64_t coverage_seed(std::uint64_t base_seed, const CoverageSet& coverage) {
  // FNV-1a over the key, then a splitmix64 finalizer.
  std::uint64_t h = 1469598103934665603ull ^ base_seed;
  const std::string key = coverage.key();
  for (char c : key) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  h ^= static_cast<std::uint64_t>(coverage.n_segments());
  h += 0x9e3779b97f4a7c15ull;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
  return h ^ (h >> 31);
}

BeamSynthesizer::BeamSynthesizer(int n_antennas, SynthesisOptions options)
    : manifold_(n_antennas, options.oversampling * n_antennas), options_(options) {}

const ComplexVector& BeamSynthesizer::beam(const CoverageSet& coverage) const {
  const std::string key = std::to_string(coverage.n_segments()) + ":" + coverage.key();
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;
  }
  // Synthesize outside the lock; GS is deterministic so a racing duplicate is harmless.
  auto w = std::make_unique<ComplexVector>(
      gs_design(desired_gain(coverage, manifold_.n_samples()), manifold_, options_.max_iters,
                coverage_seed(options_.seed, coverage)));
  std::unique_lock lock(mutex_);
  auto [it, inserted] = cache_.try_emplace(key, std::move(w));
  return *it->second;
}

std::size_t BeamSynthesizer::cache_size() const {
  std::shared_lock lock(mutex_);
  return cache_.size();
}

// ---------------------------------------------------------------------------

namespace {

Codebook empty_book(const BeamSynthesizer& synth) {
  Codebook book;
  book.n_antennas = synth.n_antennas();
  book.n_samples = synth.manifold().n_samples();
  book.seed = synth.options().seed;
  return book;
}

int log2_exact(int n) {
  if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("n_antennas must be a power of two >= 2");
  return std::countr_zero(static_cast<unsigned>(n));
}

}  // namespace

Codebook hamming_codebook(const BeamSynthesizer& synth) {
  if (synth.n_antennas() != 16) throw std::invalid_argument("hamming_codebook: requires N = 16");
  Codebook book = empty_book(synth);
  const SpaceTimeBeamPattern pattern = hamming_pattern();
  for (int l = 0; l < pattern.n_layers(); ++l) {
    book.layers.push_back({synth.beam(coverage_set(pattern, l, 0)),
                           synth.beam(coverage_set(pattern, l, 1))});
  }
  return book;
}

Codebook conv_codebook(const BeamSynthesizer& synth) {
  const int n_bits = log2_exact(synth.n_antennas());
  if (n_bits < 2) throw std::invalid_argument("conv_codebook: requires N >= 4");
  Codebook book = empty_book(synth);
  const SpaceTimeBeamPattern pattern = conv_pattern(n_bits - 1);
  for (int l = 0; l < pattern.n_layers(); ++l) {
    const CoverageSet cov = coverage_set(pattern, l);
    // A layer whose mask is all zeros carries no energy; emit a zero codeword.
    book.layers.push_back({cov.is_empty() ? ComplexVector::Zero(synth.n_antennas()) : synth.beam(cov)});
  }
  book.layers.push_back(dft_codebook(synth.n_antennas()));
  return book;
}

Codebook hierarchical_codebook(const BeamSynthesizer& synth) {
  const int n_bits = log2_exact(synth.n_antennas());
  Codebook book = empty_book(synth);
  for (int l = 1; l < n_bits; ++l) {
    const int count = 1 << l;
    std::vector<ComplexVector> layer;
    layer.reserve(static_cast<std::size_t>(count));
    for (int b = 0; b < count; ++b) {
      const int seg[] = {b};
      layer.push_back(synth.beam(CoverageSet::from_segments(count, seg)));
    }
    book.layers.push_back(std::move(layer));
  }
  book.layers.push_back(dft_codebook(synth.n_antennas()));
  return book;
}

// ---------------------------------------------------------------------------

namespace {

static_assert(std::endian::native == std::endian::little, "codebook I/O assumes little endian");

constexpr char kMagic[8] = {'C', 'B', 'T', 'C', 'B', 'K', '0', '1'};

template <typename T>
void put(std::ostream& os, T value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T value{};
  if (!is.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw std::runtime_error("read_codebook: truncated input");
  }
  return value;
}

}  // namespace

void write_codebook(std::ostream& os, const Codebook& book) {
  os.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(book.n_antennas));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(book.n_layers()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(book.n_samples));
  put<std::uint64_t>(os, book.seed);
  for (const auto& layer : book.layers) put<std::uint32_t>(os, static_cast<std::uint32_t>(layer.size()));
  for (const auto& layer : book.layers) {
    for (const auto& w : layer) {
      if (w.size() != book.n_antennas) throw std::invalid_argument("write_codebook: codeword size mismatch");
      for (Eigen::Index k = 0; k < w.size(); ++k) {
        put<double>(os, w(k).real());
        put<double>(os, w(k).imag());
      }
    }
  }
}

Codebook read_codebook(std::istream& is) {
  char magic[8];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("read_codebook: bad magic");
  }
  Codebook book;
  book.n_antennas = static_cast<int>(get<std::uint32_t>(is));
  const auto n_layers = get<std::uint32_t>(is);
  book.n_samples = static_cast<int>(get<std::uint32_t>(is));
  book.seed = get<std::uint64_t>(is);
  std::vector<std::uint32_t> counts(n_layers);
  for (auto& c : counts) c = get<std::uint32_t>(is);
  for (auto c : counts) {
    std::vector<ComplexVector> layer;
    for (std::uint32_t j = 0; j < c; ++j) {
      ComplexVector w(book.n_antennas);
      for (int k = 0; k < book.n_antennas; ++k) {
        const double re = get<double>(is);
        const double im = get<double>(is);
        w(k) = Complex(re, im);
      }
      layer.push_back(std::move(w));
    }
    book.layers.push_back(std::move(layer));
  }
  return book;
}

}  // namespace cbt
