#include "lisense/active.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace lisense {

namespace {

// Sliding maximum over [i - k, i + k] clipped to [0, n), for a strided line.
void running_max(const double* in, double* out, std::size_t n, std::size_t stride, int k) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= static_cast<std::size_t>(k) ? i - k : 0;
    const std::size_t hi = std::min(n - 1, i + static_cast<std::size_t>(k));
    double m = in[lo * stride];
    for (std::size_t j = lo + 1; j <= hi; ++j) m = std::max(m, in[j * stride]);
    out[i * stride] = m;
  }
}

bool stronger(const Peak& a, const Peak& b) {
  if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
  if (a.pixel.row != b.pixel.row) return a.pixel.row < b.pixel.row;
  return a.pixel.col < b.pixel.col;
}

}  // namespace

PeakList local_maxima(const RealGrid& magnitudes, int min_distance) {
  if (min_distance < 1) throw std::invalid_argument("local_maxima: K_a must be >= 1");
  PeakList result;
  if (magnitudes.empty()) return result;
  const std::size_t w = magnitudes.width();
  const std::size_t h = magnitudes.height();

  // Separable max filter: rows, then columns.
  RealGrid rows(w, h);
  RealGrid window_max(w, h);
  for (std::size_t r = 0; r < h; ++r) {
    running_max(&magnitudes(0, r), &rows(0, r), w, 1, min_distance);
  }
  for (std::size_t c = 0; c < w; ++c) {
    running_max(&rows(c, 0), &window_max(c, 0), h, w, min_distance);
  }

  const double floor = *std::min_element(magnitudes.begin(), magnitudes.end());
  std::vector<Peak> candidates;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const double v = magnitudes(c, r);
      if (v == window_max(c, r) && v > floor) {
        candidates.push_back({{static_cast<int>(c), static_cast<int>(r)}, v});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), stronger);

  for (const Peak& cand : candidates) {
    const bool suppressed =
        std::any_of(result.entries.begin(), result.entries.end(), [&](const Peak& kept) {
          return std::max(std::abs(kept.pixel.col - cand.pixel.col),
                          std::abs(kept.pixel.row - cand.pixel.row)) <= min_distance;
        });
    if (!suppressed) result.entries.push_back(cand);
  }
  return result;
}

PeakList local_maxima(const RadioMap& map, int min_distance) {
  return local_maxima(map.magnitudes, min_distance);
}

ActiveDetectionResult count_and_select(const PeakList& peaks, const LisArrayConfig& lis,
                                       const DropRule& rule) {
  if (peaks.entries.empty()) throw std::domain_error("count_and_select: empty peak list");
  if (!(rule.drop_ratio >= 0.0 && rule.drop_ratio <= 1.0)) {
    throw std::invalid_argument("count_and_select: drop_ratio must be in [0, 1]");
  }
  const double keep = 1.0 - rule.drop_ratio;
  const auto measure = [&](const Peak& p) {
    return rule.measure == PeakMeasure::energy ? p.magnitude * p.magnitude : p.magnitude;
  };
  ActiveDetectionResult result;
  const auto add = [&](const Peak& p) {
    result.detections.push_back({p.pixel, pixel_to_world(p.pixel, lis), p.magnitude});
  };
  add(peaks.entries.front());
  for (std::size_t k = 1; k < peaks.entries.size(); ++k) {
    const double ref = rule.reference == DropReference::previous
                           ? measure(peaks.entries[k - 1])
                           : measure(peaks.entries.front());
    if (measure(peaks.entries[k]) < keep * ref) break;
    add(peaks.entries[k]);
  }
  result.count = result.detections.size();
  return result;
}

ActiveDetectionResult detect_active(const RadioMap& map, const ActiveParams& params) {
  return count_and_select(local_maxima(map, params.min_distance), map.lis, params.rule);
}

}  // namespace lisense
