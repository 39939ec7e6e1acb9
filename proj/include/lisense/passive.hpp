#pragma once

#include <optional>
#include <vector>

#include "lisense/active.hpp"
#include "lisense/grid.hpp"
#include "lisense/radiomap.hpp"
#include "lisense/scene.hpp"

namespace lisense {

enum class Polarity {
  /// 1 (white) marks high matched-filter energy.
  white_is_high_energy,
  /// Inverted map: reflectors are 0 (black).
  negative,
};

struct BinaryMap {
  ByteGrid bits;
  Polarity polarity = Polarity::white_is_high_energy;
};

/// White (1) pixels mark static scatterers.
struct MaskingMap {
  ByteGrid bits;
  int source_count = 0;
};

/// Binary pattern of one transmitter after binarization. `anchor` is the
/// position of the source peak inside the pattern.
struct TransmitterTemplate {
  ByteGrid bits;
  Pixel anchor;
};

enum class Connectivity { four = 4, eight = 8 };

struct Component {
  int label = 0;
  double centroid_col = 0.0;
  double centroid_row = 0.0;
  WorldXY world;
  int area = 0;
  Pixel bbox_min;
  Pixel bbox_max;
};

struct LabeledComponents {
  /// 0 = background, otherwise 1..component_count.
  Grid<int> labels;
  int component_count = 0;
  std::vector<Component> components;
};

/// Two-class Lloyd iteration on pixel magnitudes, initialized at the minimum and
/// maximum values; the brighter class becomes 1. Stops at an assignment fixpoint
/// or after 100 iterations. Throws std::domain_error for a constant map.
BinaryMap binarize_kmeans(const RealGrid& magnitudes);
BinaryMap binarize_kmeans(const RadioMap& map);

BinaryMap negate(const BinaryMap& map);

/// Zero-mean normalized cross-correlation of `tmpl` placed with its top-left
/// corner at (left, top); pixels outside `image` count as 0. Returns 0 when
/// either window is constant.
double normalized_cross_correlation(const ByteGrid& image, const ByteGrid& tmpl, int left,
                                    int top);

struct TemplateMatchOptions {
  double ncc_threshold = 0.6;
  /// Anchor search radius around each seed pixel.
  int search_radius = 3;
  /// Extra border cleared around a matched template box.
  int clear_margin = 1;
};

struct TemplateMatch {
  Pixel anchor;
  std::size_t template_index = 0;
  double ncc = 0.0;
};

struct TemplateRemoval {
  BinaryMap map;
  std::vector<TemplateMatch> removed;
  /// Seeds (or, without seeds, nothing) for which no template cleared the threshold.
  std::vector<Pixel> unmatched_seeds;
};

/// Clears the expected transmitter pattern. With seeds, each seed gets the best
/// match within the search radius; without seeds, the best match anywhere is
/// cleared repeatedly until none clears the threshold.
TemplateRemoval remove_active_pattern(const BinaryMap& bin,
                                      const std::vector<TransmitterTemplate>& templates,
                                      const std::optional<PeakList>& known_peaks,
                                      const TemplateMatchOptions& options = {});

/// Logical OR of transmitter-free binary maps.
MaskingMap build_masking_map(const std::vector<BinaryMap>& maps);

/// negative OR mask: static pixels become white, other black pixels survive.
BinaryMap subtract_static(const BinaryMap& negative, const MaskingMap& mask);

/// Non-overlapping window_size^2 tiles (clipped at the border). A tile whose
/// black fraction is below `threshold` is set entirely white.
BinaryMap despeckle(const BinaryMap& bin, int window_size, double threshold);

/// Connected components of the black pixels, labeled in row-major first-touch order.
LabeledComponents label_components(const BinaryMap& bin, const LisArrayConfig& lis,
                                   Connectivity connectivity = Connectivity::eight);
LabeledComponents label_components(const BinaryMap& bin,
                                   Connectivity connectivity = Connectivity::eight);

/// Builds the transmitter template: a noiseless single emitter under the array
/// center at the kernel's design depth, matched filtered, binarized, cropped to
/// the white blob around the peak.
TransmitterTemplate make_transmitter_template(const LisArrayConfig& lis,
                                              const FilterKernel& kernel);

struct PassiveParams {
  int window_size = 2;        // K_c
  double threshold = 0.5;     // T_h
  int min_area = 3;
  Connectivity connectivity = Connectivity::eight;
  TemplateMatchOptions matching;
  ActiveParams seeding;
  /// When set, the strongest N local maxima of each map seed template matching;
  /// otherwise the energy-drop rule infers the transmitter count.
  std::optional<int> transmitters_per_map;
};

/// Intermediate binary images of one detection run.
struct PassiveStages {
  BinaryMap combined;
  BinaryMap negative;
  BinaryMap subtracted;
  BinaryMap despeckled;
};

struct PassiveResult {
  LabeledComponents labeled;
  /// Components with area >= min_area, relabeled 1..n.
  std::vector<Component> detections;
  PassiveStages stages;
};

/// Offline mask calibration and online human detection over radio maps of the
/// same lattice.
class PassiveDetector {
 public:
  PassiveDetector(LisArrayConfig lis, std::vector<TransmitterTemplate> templates,
                  PassiveParams params = {});

  /// Binarizes one map and clears its transmitter patterns.
  BinaryMap clean_snapshot(const RadioMap& map) const;

  /// Builds and stores the mask from maps captured without humans present.
  const MaskingMap& calibrate(const std::vector<RadioMap>& maps);
  void set_mask(MaskingMap mask);
  bool has_mask() const { return mask_.has_value(); }
  const MaskingMap& mask() const;

  /// Throws std::domain_error when no mask is available.
  PassiveResult detect(const std::vector<RadioMap>& maps) const;

  const PassiveParams& params() const { return params_; }

 private:
  LisArrayConfig lis_;
  std::vector<TransmitterTemplate> templates_;
  PassiveParams params_;
  std::optional<MaskingMap> mask_;
};

}  // namespace lisense
