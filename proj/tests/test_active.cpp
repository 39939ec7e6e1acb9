#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <tuple>

#include "lisense/active.hpp"
#include "lisense/channel.hpp"
#include "lisense/radiomap.hpp"

namespace lisense {
namespace {

LisArrayConfig unit_lattice(int w, int h) {
  LisArrayConfig lis;
  lis.elements_x = w;
  lis.elements_y = h;
  lis.spacing = 0.1;
  lis.carrier_frequency = 3.5e9;
  return lis;
}

PeakList peaks_of(std::initializer_list<double> magnitudes) {
  PeakList list;
  int col = 0;
  for (double m : magnitudes) list.entries.push_back({{col, 0}, m});
  for (auto& p : list.entries) p.pixel.col = col++;
  return list;
}

/// Exhaustive O(M K^2) scan with clipped windows, then greedy suppression in
/// (magnitude desc, row, col) order.
std::vector<Peak> brute_force_peaks(const RealGrid& g, int k) {
  const int w = static_cast<int>(g.width());
  const int h = static_cast<int>(g.height());
  const double floor = *std::min_element(g.begin(), g.end());
  std::vector<Peak> cands;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      bool is_max = g(c, r) > floor;
      for (int dr = -k; dr <= k && is_max; ++dr) {
        for (int dc = -k; dc <= k && is_max; ++dc) {
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr < 0 || cc < 0 || rr >= h || cc >= w) continue;
          if (g(cc, rr) > g(c, r)) is_max = false;
        }
      }
      if (is_max) cands.push_back({{c, r}, g(c, r)});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Peak& a, const Peak& b) {
    return std::make_tuple(-a.magnitude, a.pixel.row, a.pixel.col) <
           std::make_tuple(-b.magnitude, b.pixel.row, b.pixel.col);
  });
  std::vector<Peak> kept;
  for (const Peak& p : cands) {
    bool near = false;
    for (const Peak& q : kept) {
      near = near || std::max(std::abs(p.pixel.col - q.pixel.col),
                              std::abs(p.pixel.row - q.pixel.row)) <= k;
    }
    if (!near) kept.push_back(p);
  }
  return kept;
}

TEST(LocalMaxima, SingleNonzeroPixel) {
  RealGrid g(10, 8, 0.0);
  g(6, 3) = 2.5;
  const PeakList peaks = local_maxima(g, 2);
  ASSERT_EQ(peaks.entries.size(), 1u);
  EXPECT_EQ(peaks.entries[0].pixel, (Pixel{6, 3}));
  EXPECT_EQ(peaks.entries[0].magnitude, 2.5);
}

TEST(LocalMaxima, RejectsSmallWindow) {
  EXPECT_THROW(local_maxima(RealGrid(4, 4, 1.0), 0), std::invalid_argument);
}

TEST(LocalMaxima, MatchesBruteForceOnRandomMaps) {
  Rng rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> coarse(0, 4);
  for (int t = 0; t < 200; ++t) {
    RealGrid g(16, 16);
    // Quantized values on half of the maps exercise plateaus and ties.
    const bool ties = t % 2 == 0;
    for (double& v : g) v = ties ? coarse(rng) : u(rng);
    for (int k : {1, 2, 3, 5}) {
      const PeakList got = local_maxima(g, k);
      const auto expected = brute_force_peaks(g, k);
      ASSERT_EQ(got.entries.size(), expected.size()) << "trial " << t << " K_a " << k;
      for (std::size_t i = 0; i < expected.size(); ++i) {
        EXPECT_EQ(got.entries[i].pixel, expected[i].pixel);
        EXPECT_EQ(got.entries[i].magnitude, expected[i].magnitude);
      }
    }
  }
}

TEST(LocalMaxima, SeparatedAndSorted) {
  Rng rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RealGrid g(30, 30);
  for (double& v : g) v = u(rng);
  for (int k = 1; k <= 6; ++k) {
    const PeakList peaks = local_maxima(g, k);
    for (std::size_t i = 0; i < peaks.entries.size(); ++i) {
      for (std::size_t j = i + 1; j < peaks.entries.size(); ++j) {
        const Pixel a = peaks.entries[i].pixel;
        const Pixel b = peaks.entries[j].pixel;
        EXPECT_GT(std::max(std::abs(a.col - b.col), std::abs(a.row - b.row)), k);
        EXPECT_GE(peaks.entries[i].magnitude, peaks.entries[j].magnitude);
      }
    }
  }
}

TEST(LocalMaxima, CountNonIncreasingInWindow) {
  Rng rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    RealGrid g(24, 20);
    for (double& v : g) v = u(rng);
    std::size_t previous = local_maxima(g, 1).entries.size();
    for (int k = 2; k <= 8; ++k) {
      const std::size_t n = local_maxima(g, k).entries.size();
      EXPECT_LE(n, previous);
      previous = n;
    }
  }
}

TEST(LocalMaxima, BorderPeaksCount) {
  RealGrid g(12, 12, 0.0);
  g(0, 0) = 1.0;
  g(11, 11) = 0.8;
  g(0, 11) = 0.6;
  const PeakList peaks = local_maxima(g, 5);
  ASSERT_EQ(peaks.entries.size(), 3u);
  EXPECT_EQ(peaks.entries[0].pixel, (Pixel{0, 0}));
  EXPECT_EQ(peaks.entries[1].pixel, (Pixel{11, 11}));
  EXPECT_EQ(peaks.entries[2].pixel, (Pixel{0, 11}));
}

TEST(CountAndSelect, DropRuleExample) {
  const LisArrayConfig lis = unit_lattice(8, 1);
  const PeakList peaks = peaks_of({1.0, 0.95, 0.92, 0.05});
  for (PeakMeasure m : {PeakMeasure::magnitude, PeakMeasure::energy}) {
    DropRule rule;
    rule.measure = m;
    const auto result = count_and_select(peaks, lis, rule);
    EXPECT_EQ(result.count, 3u);
    EXPECT_EQ(result.detections.size(), 3u);
  }
}

TEST(CountAndSelect, MeasuresDiffer) {
  // 0.2 is above 10% of 1.0 in magnitude but below 10% in energy.
  const LisArrayConfig lis = unit_lattice(8, 1);
  const PeakList peaks = peaks_of({1.0, 0.2});
  DropRule magnitude;
  magnitude.measure = PeakMeasure::magnitude;
  EXPECT_EQ(count_and_select(peaks, lis, magnitude).count, 2u);
  EXPECT_EQ(count_and_select(peaks, lis).count, 1u);
}

TEST(CountAndSelect, ReferenceFirstVersusPrevious) {
  const LisArrayConfig lis = unit_lattice(8, 1);
  const PeakList peaks = peaks_of({1.0, 0.5, 0.2, 0.09});
  DropRule previous;
  previous.measure = PeakMeasure::magnitude;
  DropRule first = previous;
  first.reference = DropReference::first;
  EXPECT_EQ(count_and_select(peaks, lis, previous).count, 4u);
  EXPECT_EQ(count_and_select(peaks, lis, first).count, 3u);
}

TEST(CountAndSelect, SinglePeak) {
  const auto result = count_and_select(peaks_of({0.3}), unit_lattice(8, 1));
  EXPECT_EQ(result.count, 1u);
}

TEST(CountAndSelect, EmptyThrows) {
  EXPECT_THROW(count_and_select(PeakList{}, unit_lattice(8, 1)), std::domain_error);
}

TEST(CountAndSelect, WorldCoordinates) {
  LisArrayConfig lis = unit_lattice(8, 8);
  lis.origin_x = 1.0;
  lis.origin_y = 2.0;
  PeakList peaks;
  peaks.entries.push_back({{3, 5}, 1.0});
  const auto result = count_and_select(peaks, lis);
  EXPECT_DOUBLE_EQ(result.detections[0].world.x, 1.3);
  EXPECT_DOUBLE_EQ(result.detections[0].world.y, 2.5);
}

TEST(DetectActive, ScaleInvariant) {
  Rng rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RadioMap map;
  map.lis = unit_lattice(20, 20);
  map.magnitudes = RealGrid(20, 20);
  for (double& v : map.magnitudes) v = u(rng) * u(rng) * u(rng);
  const auto base = detect_active(map);
  for (double c : {0.25, 3.0, 1e6}) {
    RadioMap scaled = map;
    for (double& v : scaled.magnitudes) v *= c;
    const auto r = detect_active(scaled);
    ASSERT_EQ(r.count, base.count);
    for (std::size_t i = 0; i < r.count; ++i) {
      EXPECT_EQ(r.detections[i].pixel, base.detections[i].pixel);
    }
  }
}

TEST(DetectActive, NoiselessSingleEmitterAtArgmax) {
  ScenarioConfig cfg;
  cfg.lis.elements_x = 49;
  cfg.lis.elements_y = 49;
  cfg.lis.carrier_frequency = 3.5e9;
  cfg.lis.spacing = half_wavelength(cfg.lis.carrier_frequency);
  cfg.room = {2.2, 2.2, 3.0};
  center_array(cfg.lis, cfg.room);
  cfg.emitters.push_back({{1.05, 0.97, kEmitterHeight}, 20.0, 0.0});
  cfg.noiseless = true;
  const FilterKernel k = design_filter(3.5e9, 1.2, 19, cfg.lis.spacing);
  const RadioMap map =
      apply_filter(element_signal(superpose(cfg), noise_spec(cfg), cfg.lis.wavelength()), k,
                   cfg.lis);
  const auto result = detect_active(map);
  ASSERT_GE(result.count, 1u);
  const auto it = std::max_element(map.magnitudes.begin(), map.magnitudes.end());
  const auto idx = static_cast<std::size_t>(it - map.magnitudes.begin());
  EXPECT_EQ(result.detections[0].pixel,
            (Pixel{static_cast<int>(idx % 49), static_cast<int>(idx / 49)}));
}

TEST(DetectActive, ThreeSeparatedPeaks) {
  RadioMap map;
  map.lis = unit_lattice(40, 40);
  map.magnitudes = RealGrid(40, 40, 0.01);
  map.magnitudes(8, 9) = 1.0;
  map.magnitudes(30, 12) = 0.9;
  map.magnitudes(20, 31) = 0.8;
  map.magnitudes(21, 31) = 0.7;
  const auto result = detect_active(map);
  ASSERT_EQ(result.count, 3u);
  EXPECT_EQ(result.detections[0].pixel, (Pixel{8, 9}));
  EXPECT_EQ(result.detections[1].pixel, (Pixel{30, 12}));
  EXPECT_EQ(result.detections[2].pixel, (Pixel{20, 31}));
}

}  // namespace
}  // namespace lisense
