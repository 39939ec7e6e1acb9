#include "lisense/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "lisense/parallel.hpp"

namespace lisense {

namespace {

cplx propagate(double amplitude, double path_length, double wavelength) {
  return std::polar(amplitude, -2.0 * kPi * path_length / wavelength);
}

double checked_distance(const Vec3& a, const Vec3& b, const char* what) {
  const double d = distance(a, b);
  if (!(d > 0.0)) throw std::domain_error(std::string(what) + ": zero propagation distance");
  return d;
}

Emitter mirrored(const Emitter& e, int axis, double wall) {
  Emitter image = e;
  if (axis == 0) {
    image.position.x = 2.0 * wall - e.position.x;
  } else {
    image.position.y = 2.0 * wall - e.position.y;
  }
  return image;
}

}  // namespace

VirtualSource as_virtual_source(const Scatterer& s) {
  return {{s.center.x, s.center.y, s.height}, s.reflection_coeff};
}

VirtualSource as_virtual_source(const Human& h) {
  return {{h.center.x, h.center.y, h.height}, h.reflection_coeff};
}

cplx emitter_amplitude(const Emitter& emitter) {
  const double watts = std::pow(10.0, (emitter.tx_power_dbm - 30.0) / 10.0);
  return std::polar(std::sqrt(30.0 * watts), emitter.symbol_phase);
}

cplx los_field(const Emitter& emitter, const Vec3& element, double wavelength) {
  const double d = checked_distance(emitter.position, element, "los_field");
  return emitter_amplitude(emitter) * propagate(1.0 / d, d, wavelength);
}

cplx virtual_source_field(const Emitter& emitter, const VirtualSource& source,
                          const Vec3& element, double wavelength) {
  const double d1 = checked_distance(emitter.position, source.position, "virtual_source_field");
  const double d2 = checked_distance(source.position, element, "virtual_source_field");
  if (source.reflection_coeff == 0.0) return {0.0, 0.0};
  return emitter_amplitude(emitter) *
         propagate(source.reflection_coeff / (d1 * d2), d1 + d2, wavelength);
}

cplx virtual_source_field(const Emitter& emitter, const Scatterer& obj, const Vec3& element,
                          double wavelength) {
  return virtual_source_field(emitter, as_virtual_source(obj), element, wavelength);
}

cplx virtual_source_field(const Emitter& emitter, const Human& obj, const Vec3& element,
                          double wavelength) {
  return virtual_source_field(emitter, as_virtual_source(obj), element, wavelength);
}

ComplexGrid superpose(const ScenarioConfig& cfg, const ChannelOptions& options) {
  const LisArrayConfig& lis = cfg.lis;
  const double wavelength = lis.wavelength();
  const auto width = static_cast<std::size_t>(lis.elements_x);
  const auto height = static_cast<std::size_t>(lis.elements_y);
  ComplexGrid field(width, height);
  if (cfg.emitters.empty()) return field;

  std::vector<VirtualSource> sources;
  sources.reserve(cfg.scatterers.size() + cfg.humans.size());
  for (const auto& s : cfg.scatterers) sources.push_back(as_virtual_source(s));
  for (const auto& h : cfg.humans) sources.push_back(as_virtual_source(h));

  std::vector<Emitter> images;
  if (options.wall_echoes) {
    for (const auto& e : cfg.emitters) {
      images.push_back(mirrored(e, 0, 0.0));
      images.push_back(mirrored(e, 0, cfg.room.length_x));
      images.push_back(mirrored(e, 1, 0.0));
      images.push_back(mirrored(e, 1, cfg.room.length_y));
    }
  }

  parallel_for(height, options.threads, [&](std::size_t row) {
    for (std::size_t col = 0; col < width; ++col) {
      const Vec3 element =
          element_position(lis, cfg.room.height, static_cast<int>(col), static_cast<int>(row));
      cplx sum{0.0, 0.0};
      for (const auto& e : cfg.emitters) {
        sum += los_field(e, element, wavelength);
        for (const auto& src : sources) sum += virtual_source_field(e, src, element, wavelength);
      }
      for (const auto& img : images) {
        sum += options.wall_reflection * los_field(img, element, wavelength);
      }
      field(col, row) = sum;
    }
  });
  return field;
}

double antenna_scale(double wavelength) {
  return std::sqrt(wavelength * wavelength / (4.0 * kPi * kFreeSpaceImpedance));
}

namespace {

double field_energy(const ComplexGrid& field) {
  double energy = 0.0;
  for (const cplx& v : field) energy += std::norm(v);
  return energy;
}

}  // namespace

double calibrate_noise_variance(const ComplexGrid& field, double snr_db, double wavelength) {
  const double energy = field_energy(field);
  if (field.empty() || !(energy > 0.0)) {
    throw std::domain_error("calibrate_noise_variance: all-zero field, SNR undefined");
  }
  const double snr_linear = std::pow(10.0, snr_db / 10.0);
  const auto m = static_cast<double>(field.size());
  return wavelength * wavelength * energy /
         (4.0 * kPi * kFreeSpaceImpedance * m * snr_linear);
}

double average_snr_db(const ComplexGrid& field, double sigma2, double wavelength) {
  const auto m = static_cast<double>(field.size());
  const double snr = wavelength * wavelength * field_energy(field) /
                     (4.0 * kPi * kFreeSpaceImpedance * m * sigma2);
  return 10.0 * std::log10(snr);
}

ComplexGrid element_signal(const ComplexGrid& field, const NoiseSpec& noise, double wavelength,
                           Rng& rng) {
  const double scale = antenna_scale(wavelength);
  ComplexGrid out(field.width(), field.height());
  for (std::size_t i = 0; i < field.size(); ++i) out[i] = scale * field[i];
  if (noise.noiseless) return out;
  if (noise.averaging_count < 1) {
    throw std::invalid_argument("element_signal: averaging_count must be >= 1");
  }

  const double sigma2 = calibrate_noise_variance(field, noise.snr_db, wavelength);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5 * sigma2));
  const int draws = noise.averaging_count;
  std::vector<cplx> noise_sum(field.size(), cplx{0.0, 0.0});
  for (int s = 0; s < draws; ++s) {
    for (auto& acc : noise_sum) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      acc += cplx{re, im};
    }
  }
  const double inv = 1.0 / draws;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += noise_sum[i] * inv;
  return out;
}

ComplexGrid element_signal(const ComplexGrid& field, const NoiseSpec& noise, double wavelength) {
  Rng rng(noise.rng_seed);
  return element_signal(field, noise, wavelength, rng);
}

NoiseSpec noise_spec(const ScenarioConfig& cfg) {
  return {cfg.snr_db, cfg.averaging_count, cfg.rng_seed, cfg.noiseless};
}

}  // namespace lisense
