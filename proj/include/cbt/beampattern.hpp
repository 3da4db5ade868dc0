#pragma once

// Space-time 0-1 beam patterns built from channel codes, and the coverage-set
// arithmetic used to turn them (and Viterbi survivors) into beam targets.
//
// Convention: a mask value of 1 means the beam should have high gain on that
// angular segment.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cbt/codes.hpp"

namespace cbt {

/// Union of equal-width angular segments partitioning [-1, 1].
/// Segment i spans [-1 + 2i/n, -1 + 2(i+1)/n].
class CoverageSet {
 public:
  CoverageSet() = default;
  CoverageSet(int n_segments, Bits membership);

  static CoverageSet empty(int n_segments);
  static CoverageSet full(int n_segments);
  static CoverageSet from_segments(int n_segments, std::span<const int> segments);

  int n_segments() const { return n_segments_; }
  bool contains_segment(int segment) const { return membership_[static_cast<std::size_t>(segment)] != 0; }
  /// Segment lookup for a direction; phi = 1 belongs to the last segment.
  bool contains(double phi) const;
  int count() const;
  bool is_empty() const { return count() == 0; }
  /// Interval length |B| = count * 2 / n_segments.
  double measure() const;
  std::vector<int> segments() const;
  const Bits& membership() const { return membership_; }

  /// Same set on a grid refined by an integer factor.
  CoverageSet refined(int n_segments) const;

  /// 0/1 string, one character per segment. Used as a cache key.
  std::string key() const;

  friend bool operator==(const CoverageSet&, const CoverageSet&) = default;

 private:
  int n_segments_ = 0;
  Bits membership_;
};

int segment_of(double phi, int n_segments);

/// Per-layer, per-slot binary masks over 2^k angular segments.
class SpaceTimeBeamPattern {
 public:
  SpaceTimeBeamPattern(int n_layers, int n_slots, int n_segments);

  int n_layers() const { return n_layers_; }
  int n_slots() const { return n_slots_; }
  int n_segments() const { return n_segments_; }

  // Indices are zero-based: layer 0 is the first transmitted layer.
  std::uint8_t at(int layer, int slot, int segment) const;
  void set(int layer, int slot, int segment, std::uint8_t value);

  /// Bits of slot 0 across layers for one segment (the segment's codeword).
  Bits column(int segment) const;
  /// Columns for every segment, in segment order.
  std::vector<Bits> columns() const;

  /// Plain-text 0/1 grid: one line per (layer, slot) in layer-major order.
  void write_text(std::ostream& os) const;

 private:
  std::size_t offset(int layer, int slot, int segment) const;

  int n_layers_;
  int n_slots_;
  int n_segments_;
  Bits masks_;
};

/// 7 layers x 2 complementary slots over 16 segments from Hamming(7,4).
SpaceTimeBeamPattern hamming_pattern();

/// 2L layers x 1 slot over 2^L segments from the K=3 convolutional code.
SpaceTimeBeamPattern conv_pattern(int message_bits);

CoverageSet coverage_set(const SpaceTimeBeamPattern& pattern, int layer, int slot = 0);

/// Union of the prefix regions of the given survivor paths. A path of m bits
/// with value d maps to [-1 + 2d/2^m, -1 + 2(d+1)/2^m]. Empty input or
/// zero-length paths give the full space.
CoverageSet survivor_directions(std::span<const Bits> paths);

/// Bnew = base intersected with survivors, on the finer of the two grids.
CoverageSet adaptive_coverage(const CoverageSet& base, const CoverageSet& survivors);

}  // namespace cbt
