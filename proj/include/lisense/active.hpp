#pragma once

#include <vector>

#include "lisense/grid.hpp"
#include "lisense/radiomap.hpp"
#include "lisense/scene.hpp"

namespace lisense {

struct Peak {
  Pixel pixel;
  double magnitude = 0.0;
};

/// Local maxima sorted by descending magnitude, ties by (row, col).
struct PeakList {
  std::vector<Peak> entries;
};

/// Maximum-filter peak search with a (2 K_a + 1)^2 window (clipped at the border).
/// A pixel is a peak when it equals its window maximum and exceeds the map minimum;
/// equal maxima closer than K_a (Chebyshev) keep only the first in (row, col) order.
PeakList local_maxima(const RealGrid& magnitudes, int min_distance);
PeakList local_maxima(const RadioMap& map, int min_distance);

enum class DropReference {
  /// Compare each peak with the previously accepted one.
  previous,
  /// Compare each peak with the strongest one.
  first,
};

enum class PeakMeasure {
  /// Compare squared magnitudes (matched-filter output energy).
  energy,
  /// Compare magnitudes directly.
  magnitude,
};

struct Detection {
  Pixel pixel;
  WorldXY world;
  double magnitude = 0.0;
};

struct ActiveDetectionResult {
  std::vector<Detection> detections;
  std::size_t count = 0;
};

struct DropRule {
  double drop_ratio = 0.9;
  DropReference reference = DropReference::previous;
  PeakMeasure measure = PeakMeasure::energy;
};

/// Energy-drop stopping rule: walking the descending list, peak k+1 is accepted
/// while measure(k+1) >= (1 - drop_ratio) * measure(reference), where measure is
/// |y_f|^2 or |y_f|. Throws std::domain_error for an empty list.
ActiveDetectionResult count_and_select(const PeakList& peaks, const LisArrayConfig& lis,
                                       const DropRule& rule = {});

struct ActiveParams {
  int min_distance = 5;
  DropRule rule;
};

ActiveDetectionResult detect_active(const RadioMap& map, const ActiveParams& params = {});

}  // namespace lisense
