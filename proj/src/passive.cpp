#include "lisense/passive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lisense/channel.hpp"

namespace lisense {

namespace {

constexpr int kMaxLloydIterations = 100;

void require_same_shape(const ByteGrid& a, const ByteGrid& b, const char* what) {
  if (!a.same_shape(b)) throw std::domain_error(std::string(what) + ": dimension mismatch");
}

}  // namespace

BinaryMap binarize_kmeans(const RealGrid& magnitudes) {
  if (magnitudes.empty()) throw std::domain_error("binarize_kmeans: empty map");
  const auto [lo_it, hi_it] = std::minmax_element(magnitudes.begin(), magnitudes.end());
  double low = *lo_it;
  double high = *hi_it;
  if (!(high > low)) throw std::domain_error("binarize_kmeans: constant map has no two classes");

  BinaryMap out{ByteGrid(magnitudes.width(), magnitudes.height(), 0),
                Polarity::white_is_high_energy};
  ByteGrid& assign = out.bits;
  for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
    bool changed = iter == 0;
    double sum[2] = {0.0, 0.0};
    std::size_t count[2] = {0, 0};
    for (std::size_t i = 0; i < magnitudes.size(); ++i) {
      const double v = magnitudes[i];
      const std::uint8_t cls = std::abs(v - high) < std::abs(v - low) ? 1 : 0;
      changed = changed || cls != assign[i];
      assign[i] = cls;
      sum[cls] += v;
      ++count[cls];
    }
    if (!changed) break;
    if (count[0] > 0) low = sum[0] / static_cast<double>(count[0]);
    if (count[1] > 0) high = sum[1] / static_cast<double>(count[1]);
  }
  return out;
}

BinaryMap binarize_kmeans(const RadioMap& map) { return binarize_kmeans(map.magnitudes); }

BinaryMap negate(const BinaryMap& map) {
  BinaryMap out = map;
  for (auto& b : out.bits) b = b ? 0 : 1;
  out.polarity = map.polarity == Polarity::negative ? Polarity::white_is_high_energy
                                                    : Polarity::negative;
  return out;
}

double normalized_cross_correlation(const ByteGrid& image, const ByteGrid& tmpl, int left,
                                    int top) {
  const auto tw = static_cast<int>(tmpl.width());
  const auto th = static_cast<int>(tmpl.height());
  const double n = static_cast<double>(tw) * th;
  double sum_t = 0.0;
  double sum_i = 0.0;
  double sum_ti = 0.0;
  for (int r = 0; r < th; ++r) {
    for (int c = 0; c < tw; ++c) {
      const double t = tmpl(c, r);
      const int ic = left + c;
      const int ir = top + r;
      const double v = image.contains(ic, ir) ? image(ic, ir) : 0.0;
      sum_t += t;
      sum_i += v;
      sum_ti += t * v;
    }
  }
  // Binary values: sum of squares equals the sum.
  const double var_t = sum_t - sum_t * sum_t / n;
  const double var_i = sum_i - sum_i * sum_i / n;
  if (var_t <= 0.0 || var_i <= 0.0) return 0.0;
  return (sum_ti - sum_t * sum_i / n) / std::sqrt(var_t * var_i);
}

namespace {

void clear_box(ByteGrid& bits, int left, int top, int w, int h, int margin) {
  const int c0 = std::max(0, left - margin);
  const int r0 = std::max(0, top - margin);
  const int c1 = std::min(static_cast<int>(bits.width()) - 1, left + w - 1 + margin);
  const int r1 = std::min(static_cast<int>(bits.height()) - 1, top + h - 1 + margin);
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) bits(c, r) = 0;
  }
}

// Best template placement whose anchor lies in `anchors`.
template <typename AnchorRange>
std::optional<TemplateMatch> best_match(const ByteGrid& bits,
                                        const std::vector<TransmitterTemplate>& templates,
                                        const AnchorRange& anchors) {
  std::optional<TemplateMatch> best;
  for (std::size_t t = 0; t < templates.size(); ++t) {
    const TransmitterTemplate& tp = templates[t];
    for (const Pixel& a : anchors) {
      const double ncc =
          normalized_cross_correlation(bits, tp.bits, a.col - tp.anchor.col, a.row - tp.anchor.row);
      if (!best || ncc > best->ncc) best = TemplateMatch{a, t, ncc};
    }
  }
  return best;
}

}  // namespace

TemplateRemoval remove_active_pattern(const BinaryMap& bin,
                                      const std::vector<TransmitterTemplate>& templates,
                                      const std::optional<PeakList>& known_peaks,
                                      const TemplateMatchOptions& options) {
  if (templates.empty()) throw std::invalid_argument("remove_active_pattern: no templates");
  TemplateRemoval result{bin, {}, {}};
  ByteGrid& bits = result.map.bits;

  const auto clear = [&](const TemplateMatch& m) {
    const TransmitterTemplate& tp = templates[m.template_index];
    clear_box(bits, m.anchor.col - tp.anchor.col, m.anchor.row - tp.anchor.row,
              static_cast<int>(tp.bits.width()), static_cast<int>(tp.bits.height()),
              options.clear_margin);
    result.removed.push_back(m);
  };

  if (known_peaks) {
    for (const Peak& seed : known_peaks->entries) {
      std::vector<Pixel> anchors;
      for (int dr = -options.search_radius; dr <= options.search_radius; ++dr) {
        for (int dc = -options.search_radius; dc <= options.search_radius; ++dc) {
          const Pixel p{seed.pixel.col + dc, seed.pixel.row + dr};
          if (bits.contains(p.col, p.row)) anchors.push_back(p);
        }
      }
      const auto m = best_match(bits, templates, anchors);
      if (m && m->ncc >= options.ncc_threshold) {
        clear(*m);
      } else {
        result.unmatched_seeds.push_back(seed.pixel);
      }
    }
    return result;
  }

  while (true) {
    std::vector<Pixel> anchors;
    for (std::size_t r = 0; r < bits.height(); ++r) {
      for (std::size_t c = 0; c < bits.width(); ++c) {
        if (bits(c, r)) anchors.push_back({static_cast<int>(c), static_cast<int>(r)});
      }
    }
    const auto m = best_match(bits, templates, anchors);
    if (!m || m->ncc < options.ncc_threshold) break;
    clear(*m);
  }
  return result;
}

MaskingMap build_masking_map(const std::vector<BinaryMap>& maps) {
  if (maps.empty()) throw std::invalid_argument("build_masking_map: no maps");
  MaskingMap mask{maps.front().bits, static_cast<int>(maps.size())};
  for (std::size_t k = 1; k < maps.size(); ++k) {
    require_same_shape(mask.bits, maps[k].bits, "build_masking_map");
    for (std::size_t i = 0; i < mask.bits.size(); ++i) mask.bits[i] |= maps[k].bits[i];
  }
  return mask;
}

BinaryMap subtract_static(const BinaryMap& negative, const MaskingMap& mask) {
  require_same_shape(negative.bits, mask.bits, "subtract_static");
  BinaryMap out{negative.bits, Polarity::negative};
  for (std::size_t i = 0; i < out.bits.size(); ++i) out.bits[i] |= mask.bits[i];
  return out;
}

BinaryMap despeckle(const BinaryMap& bin, int window_size, double threshold) {
  if (window_size < 1) throw std::invalid_argument("despeckle: K_c must be >= 1");
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("despeckle: T_h must be in [0, 1]");
  }
  BinaryMap out = bin;
  const std::size_t w = bin.bits.width();
  const std::size_t h = bin.bits.height();
  const auto k = static_cast<std::size_t>(window_size);
  for (std::size_t r0 = 0; r0 < h; r0 += k) {
    for (std::size_t c0 = 0; c0 < w; c0 += k) {
      const std::size_t r1 = std::min(h, r0 + k);
      const std::size_t c1 = std::min(w, c0 + k);
      std::size_t black = 0;
      for (std::size_t r = r0; r < r1; ++r) {
        for (std::size_t c = c0; c < c1; ++c) black += bin.bits(c, r) == 0 ? 1 : 0;
      }
      const double fraction =
          static_cast<double>(black) / static_cast<double>((r1 - r0) * (c1 - c0));
      if (fraction < threshold) {
        for (std::size_t r = r0; r < r1; ++r) {
          for (std::size_t c = c0; c < c1; ++c) out.bits(c, r) = 1;
        }
      }
    }
  }
  return out;
}

namespace {

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

void unite(std::vector<int>& parent, int a, int b) {
  a = find_root(parent, a);
  b = find_root(parent, b);
  if (a == b) return;
  if (a < b) {
    parent[b] = a;
  } else {
    parent[a] = b;
  }
}

}  // namespace

LabeledComponents label_components(const BinaryMap& bin, const LisArrayConfig& lis,
                                   Connectivity connectivity) {
  const ByteGrid& bits = bin.bits;
  const int w = static_cast<int>(bits.width());
  const int h = static_cast<int>(bits.height());
  LabeledComponents out;
  out.labels = Grid<int>(bits.width(), bits.height(), 0);

  // Pass 1: provisional labels with equivalences over already-visited neighbours.
  std::vector<int> parent{0};
  Grid<int>& labels = out.labels;
  const bool diag = connectivity == Connectivity::eight;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (bits(c, r) != 0) continue;
      int current = 0;
      const auto visit = [&](int nc, int nr) {
        if (nc < 0 || nr < 0 || nc >= w) return;
        const int l = labels(nc, nr);
        if (l == 0) return;
        if (current == 0) {
          current = l;
        } else {
          unite(parent, current, l);
        }
      };
      visit(c - 1, r);
      visit(c, r - 1);
      if (diag) {
        visit(c - 1, r - 1);
        visit(c + 1, r - 1);
      }
      if (current == 0) {
        current = static_cast<int>(parent.size());
        parent.push_back(current);
      }
      labels(c, r) = current;
    }
  }

  // Pass 2: canonical labels in first-touch row-major order.
  std::vector<int> canonical(parent.size(), 0);
  int next = 0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      int& l = labels(c, r);
      if (l == 0) continue;
      const int root = find_root(parent, l);
      if (canonical[root] == 0) canonical[root] = ++next;
      l = canonical[root];
    }
  }
  out.component_count = next;

  std::vector<double> sum_c(next + 1, 0.0);
  std::vector<double> sum_r(next + 1, 0.0);
  out.components.resize(next);
  for (int i = 0; i < next; ++i) {
    out.components[i].label = i + 1;
    out.components[i].bbox_min = {w, h};
    out.components[i].bbox_max = {-1, -1};
  }
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int l = labels(c, r);
      if (l == 0) continue;
      Component& comp = out.components[l - 1];
      ++comp.area;
      sum_c[l] += c;
      sum_r[l] += r;
      comp.bbox_min = {std::min(comp.bbox_min.col, c), std::min(comp.bbox_min.row, r)};
      comp.bbox_max = {std::max(comp.bbox_max.col, c), std::max(comp.bbox_max.row, r)};
    }
  }
  for (int l = 1; l <= next; ++l) {
    Component& comp = out.components[l - 1];
    comp.centroid_col = sum_c[l] / comp.area;
    comp.centroid_row = sum_r[l] / comp.area;
    comp.world = pixel_to_world(comp.centroid_col, comp.centroid_row, lis);
  }
  return out;
}

LabeledComponents label_components(const BinaryMap& bin, Connectivity connectivity) {
  LisArrayConfig unit;
  unit.elements_x = static_cast<int>(bin.bits.width());
  unit.elements_y = static_cast<int>(bin.bits.height());
  unit.spacing = 1.0;
  return label_components(bin, unit, connectivity);
}

TransmitterTemplate make_transmitter_template(const LisArrayConfig& lis,
                                              const FilterKernel& kernel) {
  ScenarioConfig scene;
  scene.lis = lis;
  scene.room = {lis.origin_x * 2.0 + lis.footprint_x(), lis.origin_y * 2.0 + lis.footprint_y(),
                kernel.design_depth + kEmitterHeight};
  const int cc = (lis.elements_x - 1) / 2;
  const int cr = (lis.elements_y - 1) / 2;
  const WorldXY center = pixel_to_world(Pixel{cc, cr}, lis);
  scene.emitters.push_back({{center.x, center.y, kEmitterHeight}, 20.0, 0.0});

  const ComplexGrid field = superpose(scene);
  const RadioMap map = apply_filter(field, kernel, lis);
  const BinaryMap bin = binarize_kmeans(map);

  const auto peak_it = std::max_element(map.magnitudes.begin(), map.magnitudes.end());
  const auto peak_index = static_cast<std::size_t>(peak_it - map.magnitudes.begin());
  const Pixel peak{static_cast<int>(peak_index % map.magnitudes.width()),
                   static_cast<int>(peak_index / map.magnitudes.width())};

  // White blob around the peak, found by labeling the negated map.
  const LabeledComponents comps = label_components(negate(bin), lis, Connectivity::eight);
  const int label = comps.labels(peak.col, peak.row);
  const Component& blob = comps.components.at(label - 1);

  // One black pixel of border so the pattern carries its own edge.
  const int left = blob.bbox_min.col - 1;
  const int top = blob.bbox_min.row - 1;
  const int tw = blob.bbox_max.col - blob.bbox_min.col + 3;
  const int th = blob.bbox_max.row - blob.bbox_min.row + 3;
  TransmitterTemplate tp{ByteGrid(tw, th, 0), {peak.col - left, peak.row - top}};
  for (int r = 0; r < th; ++r) {
    for (int c = 0; c < tw; ++c) {
      const int ic = left + c;
      const int ir = top + r;
      if (comps.labels.contains(ic, ir) && comps.labels(ic, ir) == label) tp.bits(c, r) = 1;
    }
  }
  return tp;
}

PassiveDetector::PassiveDetector(LisArrayConfig lis, std::vector<TransmitterTemplate> templates,
                                 PassiveParams params)
    : lis_(lis), templates_(std::move(templates)), params_(params) {
  if (templates_.empty()) throw std::invalid_argument("PassiveDetector: no templates");
}

BinaryMap PassiveDetector::clean_snapshot(const RadioMap& map) const {
  const BinaryMap bin = binarize_kmeans(map);
  PeakList seeds;
  if (params_.transmitters_per_map) {
    const PeakList peaks = local_maxima(map, params_.seeding.min_distance);
    const auto n = std::min<std::size_t>(peaks.entries.size(),
                                         static_cast<std::size_t>(*params_.transmitters_per_map));
    seeds.entries.assign(peaks.entries.begin(), peaks.entries.begin() + n);
  } else {
    const ActiveDetectionResult active = detect_active(map, params_.seeding);
    for (const Detection& d : active.detections) seeds.entries.push_back({d.pixel, d.magnitude});
  }
  return remove_active_pattern(bin, templates_, seeds, params_.matching).map;
}

const MaskingMap& PassiveDetector::calibrate(const std::vector<RadioMap>& maps) {
  std::vector<BinaryMap> cleaned;
  cleaned.reserve(maps.size());
  for (const RadioMap& m : maps) cleaned.push_back(clean_snapshot(m));
  mask_ = build_masking_map(cleaned);
  return *mask_;
}

void PassiveDetector::set_mask(MaskingMap mask) { mask_ = std::move(mask); }

const MaskingMap& PassiveDetector::mask() const {
  if (!mask_) throw std::domain_error("PassiveDetector: no masking map calibrated");
  return *mask_;
}

PassiveResult PassiveDetector::detect(const std::vector<RadioMap>& maps) const {
  if (!mask_) throw std::domain_error("detect_passive: missing masking map");
  if (maps.empty()) throw std::invalid_argument("detect_passive: no maps");
  std::vector<BinaryMap> cleaned;
  cleaned.reserve(maps.size());
  for (const RadioMap& m : maps) cleaned.push_back(clean_snapshot(m));
  const MaskingMap combined = build_masking_map(cleaned);

  PassiveResult result;
  result.stages.combined = {combined.bits, Polarity::white_is_high_energy};
  result.stages.negative = negate(result.stages.combined);
  result.stages.subtracted = subtract_static(result.stages.negative, *mask_);
  result.stages.despeckled =
      despeckle(result.stages.subtracted, params_.window_size, params_.threshold);
  result.labeled = label_components(result.stages.despeckled, lis_, params_.connectivity);
  for (const Component& c : result.labeled.components) {
    if (c.area >= params_.min_area) {
      result.detections.push_back(c);
      result.detections.back().label = static_cast<int>(result.detections.size());
    }
  }
  return result;
}

}  // namespace lisense
