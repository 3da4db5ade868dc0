#include "cbt/beampattern.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace cbt {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

int segment_of(double phi, int n_segments) {
  const int s = static_cast<int>(std::floor((phi + 1.0) / 2.0 * n_segments));
  return std::clamp(s, 0, n_segments - 1);
}

CoverageSet::CoverageSet(int n_segments, Bits membership)
    : n_segments_(n_segments), membership_(std::move(membership)) {
  if (n_segments < 1 || membership_.size() != static_cast<std::size_t>(n_segments)) {
    throw std::invalid_argument("CoverageSet: membership size does not match segment count");
  }
  for (auto& b : membership_) b = b ? 1 : 0;
}

CoverageSet CoverageSet::empty(int n_segments) {
  return CoverageSet(n_segments, Bits(static_cast<std::size_t>(n_segments), 0));
}

CoverageSet CoverageSet::full(int n_segments) {
  return CoverageSet(n_segments, Bits(static_cast<std::size_t>(n_segments), 1));
}

CoverageSet CoverageSet::from_segments(int n_segments, std::span<const int> segments) {
  Bits m(static_cast<std::size_t>(n_segments), 0);
  for (int s : segments) {
    if (s < 0 || s >= n_segments) throw std::out_of_range("CoverageSet: segment out of range");
    m[static_cast<std::size_t>(s)] = 1;
  }
  return CoverageSet(n_segments, std::move(m));
}

bool CoverageSet::contains(double phi) const {
  return contains_segment(segment_of(phi, n_segments_));
}

int CoverageSet::count() const {
  return static_cast<int>(std::count(membership_.begin(), membership_.end(), 1));
}

double CoverageSet::measure() const { return count() * 2.0 / n_segments_; }

std::vector<int> CoverageSet::segments() const {
  std::vector<int> out;
  for (int i = 0; i < n_segments_; ++i) {
    if (membership_[static_cast<std::size_t>(i)]) out.push_back(i);
  }
  return out;
}

CoverageSet CoverageSet::refined(int n_segments) const {
  if (n_segments % n_segments_ != 0) {
    throw std::invalid_argument("CoverageSet: refinement must be an integer factor");
  }
  const int factor = n_segments / n_segments_;
  Bits m(static_cast<std::size_t>(n_segments));
  for (int i = 0; i < n_segments; ++i) {
    m[static_cast<std::size_t>(i)] = membership_[static_cast<std::size_t>(i / factor)];
  }
  return CoverageSet(n_segments, std::move(m));
}

std::string CoverageSet::key() const {
  std::string k(membership_.size(), '0');
  for (std::size_t i = 0; i < membership_.size(); ++i) {
    if (membership_[i]) k[i] = '1';
  }
  return k;
}

// ---------------------------------------------------------------------------

SpaceTimeBeamPattern::SpaceTimeBeamPattern(int n_layers, int n_slots, int n_segments)
    : n_layers_(n_layers), n_slots_(n_slots), n_segments_(n_segments) {
  if (n_layers < 1 || n_slots < 1 || n_slots > 2 || !is_power_of_two(n_segments)) {
    throw std::invalid_argument("SpaceTimeBeamPattern: invalid shape");
  }
  masks_.assign(static_cast<std::size_t>(n_layers) * n_slots * n_segments, 0);
}

std::size_t SpaceTimeBeamPattern::offset(int layer, int slot, int segment) const {
  if (layer < 0 || layer >= n_layers_ || slot < 0 || slot >= n_slots_ || segment < 0 ||
      segment >= n_segments_) {
    throw std::out_of_range("SpaceTimeBeamPattern: index out of range");
  }
  return (static_cast<std::size_t>(layer) * n_slots_ + slot) * n_segments_ + segment;
}

std::uint8_t SpaceTimeBeamPattern::at(int layer, int slot, int segment) const {
  return masks_[offset(layer, slot, segment)];
}

void SpaceTimeBeamPattern::set(int layer, int slot, int segment, std::uint8_t value) {
  masks_[offset(layer, slot, segment)] = value ? 1 : 0;
}

Bits SpaceTimeBeamPattern::column(int segment) const {
  Bits c(static_cast<std::size_t>(n_layers_));
  for (int l = 0; l < n_layers_; ++l) c[static_cast<std::size_t>(l)] = at(l, 0, segment);
  return c;
}

std::vector<Bits> SpaceTimeBeamPattern::columns() const {
  std::vector<Bits> out;
  out.reserve(static_cast<std::size_t>(n_segments_));
  for (int i = 0; i < n_segments_; ++i) out.push_back(column(i));
  return out;
}

void SpaceTimeBeamPattern::write_text(std::ostream& os) const {
  for (int l = 0; l < n_layers_; ++l) {
    for (int b = 0; b < n_slots_; ++b) {
      for (int i = 0; i < n_segments_; ++i) os << static_cast<char>('0' + at(l, b, i));
      os << '\n';
    }
  }
}

SpaceTimeBeamPattern hamming_pattern() {
  SpaceTimeBeamPattern p(HammingCode74::kCodeBits, 2, 16);
  for (int i = 0; i < 16; ++i) {
    const Bits x = HammingCode74::encode(dectobin(static_cast<std::size_t>(i), 4));
    for (int l = 0; l < HammingCode74::kCodeBits; ++l) {
      p.set(l, 0, i, x[static_cast<std::size_t>(l)]);
      p.set(l, 1, i, x[static_cast<std::size_t>(l)] ^ 1u);
    }
  }
  return p;
}

SpaceTimeBeamPattern conv_pattern(int message_bits) {
  if (message_bits < 1 || message_bits > 20) {
    throw std::invalid_argument("conv_pattern: message length must be in [1, 20]");
  }
  const int n_segments = 1 << message_bits;
  SpaceTimeBeamPattern p(2 * message_bits, 1, n_segments);
  for (int i = 0; i < n_segments; ++i) {
    const Bits x = conv_encode(dectobin(static_cast<std::size_t>(i), message_bits));
    for (int l = 0; l < 2 * message_bits; ++l) p.set(l, 0, i, x[static_cast<std::size_t>(l)]);
  }
  return p;
}

CoverageSet coverage_set(const SpaceTimeBeamPattern& pattern, int layer, int slot) {
  Bits m(static_cast<std::size_t>(pattern.n_segments()));
  for (int i = 0; i < pattern.n_segments(); ++i) {
    m[static_cast<std::size_t>(i)] = pattern.at(layer, slot, i);
  }
  return CoverageSet(pattern.n_segments(), std::move(m));
}

CoverageSet survivor_directions(std::span<const Bits> paths) {
  if (paths.empty() || paths.front().empty()) return CoverageSet::full(1);
  const std::size_t width = paths.front().size();
  if (width > 30) throw std::invalid_argument("survivor_directions: path too long");
  const int n_segments = 1 << width;
  Bits m(static_cast<std::size_t>(n_segments), 0);
  for (const Bits& p : paths) {
    if (p.size() != width) {
      throw std::invalid_argument("survivor_directions: survivor paths differ in length");
    }
    m[bintodec(p)] = 1;
  }
  return CoverageSet(n_segments, std::move(m));
}

CoverageSet adaptive_coverage(const CoverageSet& base, const CoverageSet& survivors) {
  const int n = std::max(base.n_segments(), survivors.n_segments());
  const CoverageSet a = base.refined(n);
  const CoverageSet b = survivors.refined(n);
  Bits m(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    m[static_cast<std::size_t>(i)] = a.contains_segment(i) && b.contains_segment(i);
  }
  return CoverageSet(n, std::move(m));
}

}  // namespace cbt
