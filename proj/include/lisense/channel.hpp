#pragma once

#include <cstdint>

#include "lisense/grid.hpp"
#include "lisense/random.hpp"
#include "lisense/scene.hpp"

namespace lisense {

/// Point re-radiator standing in for a passive object.
struct VirtualSource {
  Vec3 position;
  double reflection_coeff = 0.0;
};

/// Re-radiation point: object centroid at its top-face height.
VirtualSource as_virtual_source(const Scatterer& s);
VirtualSource as_virtual_source(const Human& h);

/// Complex transmit amplitude: free-space field magnitude at 1 m, sqrt(30 P)
/// with P in watts, rotated by the snapshot's symbol phase.
cplx emitter_amplitude(const Emitter& emitter);

/// Line-of-sight field at one element: a / d * exp(-j 2 pi d / lambda).
/// Throws std::domain_error when the emitter coincides with the element.
cplx los_field(const Emitter& emitter, const Vec3& element, double wavelength);

/// Single-bounce echo through `source`:
/// a * rho / (d1 * d2) * exp(-j 2 pi (d1 + d2) / lambda).
cplx virtual_source_field(const Emitter& emitter, const VirtualSource& source,
                          const Vec3& element, double wavelength);
cplx virtual_source_field(const Emitter& emitter, const Scatterer& obj, const Vec3& element,
                          double wavelength);
cplx virtual_source_field(const Emitter& emitter, const Human& obj, const Vec3& element,
                          double wavelength);

struct ChannelOptions {
  /// Adds first-order image-source echoes from the four side walls.
  bool wall_echoes = false;
  double wall_reflection = 0.3;
  unsigned threads = 1;
};

/// Noiseless field at every array element, summed over all emitters and over the
/// LoS path plus one echo per scatterer and human. Width = elements_x.
ComplexGrid superpose(const ScenarioConfig& cfg, const ChannelOptions& options = {});

/// Antenna output scale sqrt(lambda^2 Z_i / (4 pi Z0)) with Z_i = 1.
double antenna_scale(double wavelength);

/// Noise variance that makes the average SNR of `field` equal `snr_db`.
/// Throws std::domain_error for an all-zero field.
double calibrate_noise_variance(const ComplexGrid& field, double snr_db, double wavelength);

/// Average SNR (dB) of `field` for noise variance `sigma2`.
double average_snr_db(const ComplexGrid& field, double sigma2, double wavelength);

struct NoiseSpec {
  double snr_db = 0.0;
  int averaging_count = 1;
  std::uint64_t rng_seed = 0;
  bool noiseless = false;
};

/// Antenna outputs y = scale * E + n. The noise is i.i.d. circular Gaussian with
/// the variance calibrated from `field`; with averaging_count S > 1 the result is
/// the mean of S independent noisy draws of the same field.
ComplexGrid element_signal(const ComplexGrid& field, const NoiseSpec& noise, double wavelength,
                           Rng& rng);
ComplexGrid element_signal(const ComplexGrid& field, const NoiseSpec& noise, double wavelength);

/// Noise settings carried by a scenario.
NoiseSpec noise_spec(const ScenarioConfig& cfg);

}  // namespace lisense
