#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "cbt/beampattern.hpp"

using namespace cbt;

TEST_CASE("coverage sets") {
  CHECK(CoverageSet::full(8).measure() == doctest::Approx(2.0));
  CHECK(CoverageSet::empty(8).is_empty());
  CHECK(CoverageSet::empty(8).measure() == 0.0);

  const CoverageSet m(8, Bits{1, 0, 1, 1, 0, 0, 1, 0});
  CHECK(m.count() == 4);
  CHECK(m.measure() == doctest::Approx(1.0));
  CHECK(m.segments() == std::vector<int>{0, 2, 3, 6});
  CHECK(m.key() == "10110010");
  CHECK(m.contains(-0.9));
  CHECK_FALSE(m.contains(-0.7));
  CHECK_FALSE(m.contains(1.0));

  const auto r = m.refined(16);
  CHECK(r.measure() == doctest::Approx(1.0));
  CHECK(r.contains_segment(0));
  CHECK(r.contains_segment(1));
  CHECK_FALSE(r.contains_segment(2));

  CHECK_THROWS_AS(CoverageSet(4, Bits{1, 0}), std::invalid_argument);
}

TEST_CASE("segment lookup") {
  CHECK(segment_of(-1.0, 8) == 0);
  CHECK(segment_of(1.0, 8) == 7);
  CHECK(segment_of(-0.75, 8) == 1);
  CHECK(segment_of(0.0, 2) == 1);
}

TEST_CASE("hamming pattern") {
  const auto p = hamming_pattern();
  CHECK(p.n_layers() == 7);
  CHECK(p.n_slots() == 2);
  CHECK(p.n_segments() == 16);
  CHECK(p.at(2, 0, 2) == 1);
  CHECK(p.column(2) == Bits{0, 0, 1, 0, 1, 0, 1});
  for (int l = 0; l < 7; ++l) {
    for (int s = 0; s < 16; ++s) CHECK(p.at(l, 0, s) + p.at(l, 1, s) == 1);
  }
  // Minimum distance 3 between columns.
  const auto cols = p.columns();
  int dmin = 7;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    for (std::size_t j = i + 1; j < cols.size(); ++j) {
      int d = 0;
      for (int l = 0; l < 7; ++l) d += cols[i][static_cast<std::size_t>(l)] != cols[j][static_cast<std::size_t>(l)];
      dmin = std::min(dmin, d);
    }
  }
  CHECK(dmin == 3);
}

TEST_CASE("convolutional pattern") {
  const auto p = conv_pattern(3);
  CHECK(p.n_layers() == 6);
  CHECK(p.n_slots() == 1);
  CHECK(p.n_segments() == 8);
  CHECK(p.column(0) == Bits(6, 0));
  CHECK(p.column(4) == Bits{1, 1, 1, 0, 1, 1});
  for (int s = 0; s < 8; ++s) CHECK(p.column(s) == conv_encode(dectobin(static_cast<std::size_t>(s), 3)));

  const auto big = conv_pattern(6);
  const auto cols = big.columns();
  int dmin = 100;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    for (std::size_t j = i + 1; j < cols.size(); ++j) {
      int d = 0;
      for (std::size_t l = 0; l < cols[i].size(); ++l) d += cols[i][l] != cols[j][l];
      dmin = std::min(dmin, d);
    }
  }
  // Truncated code: the last bit is protected by its two layers only.
  CHECK(dmin == 2);

  std::ostringstream os;
  p.write_text(os);
  CHECK(os.str().substr(0, 9) == "00001111\n");
}

TEST_CASE("layer coverage") {
  const auto p = conv_pattern(3);
  const auto b0 = coverage_set(p, 0);
  CHECK(b0.n_segments() == 8);
  CHECK(b0.measure() == doctest::Approx(1.0));
  CHECK(b0.segments() == std::vector<int>{4, 5, 6, 7});
}

TEST_CASE("survivor directions") {
  const std::vector<Bits> all{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  CHECK(survivor_directions(all).measure() == doctest::Approx(2.0));

  const std::vector<Bits> same{{0, 0}, {0, 0}, {0, 0}, {0, 0}};
  const auto s = survivor_directions(same);
  CHECK(s.measure() == doctest::Approx(0.5));
  CHECK(s.contains(-0.9));
  CHECK_FALSE(s.contains(-0.4));

  const std::vector<Bits> eighths{{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
  const auto e = survivor_directions(eighths);
  CHECK(e.measure() == doctest::Approx(1.0));
  CHECK(e.segments() == std::vector<int>{0, 3, 5, 6});

  CHECK(survivor_directions(std::vector<Bits>{}).measure() == doctest::Approx(2.0));
}

TEST_CASE("adaptive coverage") {
  const CoverageSet b(4, Bits{1, 1, 0, 0});
  CHECK(adaptive_coverage(b, CoverageSet::full(1)) == b);
  CHECK(adaptive_coverage(b, CoverageSet(4, Bits{0, 0, 1, 1})).is_empty());

  const auto half = adaptive_coverage(b, CoverageSet(4, Bits{0, 1, 1, 0}));
  CHECK(half.measure() == doctest::Approx(0.5));

  const auto fine = adaptive_coverage(CoverageSet(8, Bits{1, 0, 1, 0, 1, 0, 1, 0}), CoverageSet(2, Bits{1, 0}));
  CHECK(fine.n_segments() == 8);
  CHECK(fine.segments() == std::vector<int>{0, 2});
}
