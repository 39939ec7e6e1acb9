#pragma once

#include <cstddef>
#include <memory>

#include "lisense/grid.hpp"
#include "lisense/scene.hpp"

namespace lisense {

/// Expected spherical-wave pattern of a point source at `design_depth` below the
/// array, sampled on an n x n patch of the lattice. grid(c, c) is the on-axis
/// sample with c = n / 2.
struct FilterKernel {
  ComplexGrid grid;
  double design_frequency = 0.0;
  double design_depth = 0.0;
  double spacing = 0.0;

  std::size_t center_col() const { return grid.width() / 2; }
  std::size_t center_row() const { return grid.height() / 2; }
};

/// Samples (1 / d_i) exp(-j 2 pi d_i / lambda) with
/// d_i = sqrt(depth^2 + (p spacing)^2 + (q spacing)^2) at offsets (p, q) from the center.
FilterKernel design_filter(double frequency, double depth, int n, double spacing);

/// Default kernel side for an array: 100 elements per 259-element side, rounded
/// to the nearest odd count.
int default_kernel_size(int elements_x, int elements_y);

struct RadioMap {
  RealGrid magnitudes;
  ComplexGrid complex_map;
  LisArrayConfig lis;
};

/// Frequency-domain "same" correlation with the conjugated kernel, caching the
/// kernel spectrum for one grid shape. apply() is safe to call concurrently.
class MatchedFilter {
 public:
  MatchedFilter(const FilterKernel& kernel, std::size_t width, std::size_t height);
  ~MatchedFilter();
  MatchedFilter(MatchedFilter&&) noexcept;
  MatchedFilter& operator=(MatchedFilter&&) noexcept;
  MatchedFilter(const MatchedFilter&) = delete;
  MatchedFilter& operator=(const MatchedFilter&) = delete;

  ComplexGrid apply(const ComplexGrid& received) const;

  std::size_t width() const;
  std::size_t height() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Reference path: y_f(c, r) = sum_{a,b} conj(h(a, b)) y(c + a - cx, r + b - cy),
/// with zero padding outside the grid. O(M * N_f).
ComplexGrid correlate_direct(const ComplexGrid& received, const FilterKernel& kernel);

/// FFT path of the same correlation.
ComplexGrid correlate_fft(const ComplexGrid& received, const FilterKernel& kernel);

/// Radio map |y_f|. Throws std::domain_error when the kernel is larger than the grid.
RadioMap apply_filter(const ComplexGrid& received, const FilterKernel& kernel,
                      const LisArrayConfig& lis);
RadioMap apply_filter(const ComplexGrid& received, const FilterKernel& kernel);
RadioMap apply_filter(const ComplexGrid& received, const MatchedFilter& filter,
                      const LisArrayConfig& lis);

/// Wraps a correlation output as a radio map.
RadioMap make_radio_map(ComplexGrid filtered, const LisArrayConfig& lis);

/// Min-max normalization to 8-bit gray. A constant map renders all zero.
ByteGrid map_to_image(const RadioMap& map);
ByteGrid map_to_image(const RealGrid& magnitudes);

/// Smallest n >= minimum whose only prime factors are 2, 3, 5 and 7.
std::size_t fft_friendly_size(std::size_t minimum);

}  // namespace lisense
