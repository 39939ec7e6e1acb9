#include "lisense/scene.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lisense {

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void center_array(LisArrayConfig& lis, const RoomGeometry& room) {
  lis.origin_x = 0.5 * (room.length_x - lis.footprint_x());
  lis.origin_y = 0.5 * (room.length_y - lis.footprint_y());
}

double half_wavelength(double carrier_frequency) {
  return 0.5 * kSpeedOfLight / carrier_frequency;
}

Vec3 element_position(const LisArrayConfig& lis, double ceiling_height, int col, int row) {
  return {lis.origin_x + col * lis.spacing, lis.origin_y + row * lis.spacing, ceiling_height};
}

WorldXY pixel_to_world(Pixel pixel, const LisArrayConfig& lis) {
  if (pixel.col < 0 || pixel.col >= lis.elements_x || pixel.row < 0 ||
      pixel.row >= lis.elements_y) {
    throw std::domain_error("pixel_to_world: pixel (" + std::to_string(pixel.col) + ", " +
                            std::to_string(pixel.row) + ") outside the array lattice");
  }
  return pixel_to_world(static_cast<double>(pixel.col), static_cast<double>(pixel.row), lis);
}

WorldXY pixel_to_world(double col, double row, const LisArrayConfig& lis) {
  return {lis.origin_x + col * lis.spacing, lis.origin_y + row * lis.spacing};
}

Pixel world_to_pixel(WorldXY world, const LisArrayConfig& lis) {
  auto nearest = [&](double w, double origin, int count) {
    const long idx = std::lround((w - origin) / lis.spacing);
    return static_cast<int>(std::clamp<long>(idx, 0, count - 1));
  };
  return {nearest(world.x, lis.origin_x, lis.elements_x),
          nearest(world.y, lis.origin_y, lis.elements_y)};
}

double default_design_depth(const RoomGeometry& room) { return room.height - kEmitterHeight; }

namespace {

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

// Tolerance for floating-point footprint checks (array sized exactly to the room).
constexpr double kFitSlack = 1e-9;

}  // namespace

std::vector<std::string> validate_config(const ScenarioConfig& cfg) {
  std::vector<std::string> out;
  const RoomGeometry& room = cfg.room;
  const LisArrayConfig& lis = cfg.lis;

  if (!finite_positive(room.length_x)) out.emplace_back("room.length_x must be > 0");
  if (!finite_positive(room.length_y)) out.emplace_back("room.length_y must be > 0");
  if (!finite_positive(room.height)) out.emplace_back("room.height must be > 0");

  if (lis.elements_x < 1) out.emplace_back("lis.elements_x must be >= 1");
  if (lis.elements_y < 1) out.emplace_back("lis.elements_y must be >= 1");
  if (!finite_positive(lis.spacing)) out.emplace_back("lis.spacing must be > 0");
  if (!finite_positive(lis.carrier_frequency)) {
    out.emplace_back("lis.carrier_frequency must be > 0");
  }
  if (lis.elements_x >= 1 && finite_positive(lis.spacing)) {
    if (lis.footprint_x() > room.length_x + kFitSlack) {
      out.emplace_back("lis footprint exceeds room along x");
    } else if (lis.origin_x < -kFitSlack ||
               lis.origin_x + lis.footprint_x() > room.length_x + kFitSlack) {
      out.emplace_back("lis origin places array outside room along x");
    }
  }
  if (lis.elements_y >= 1 && finite_positive(lis.spacing)) {
    if (lis.footprint_y() > room.length_y + kFitSlack) {
      out.emplace_back("lis footprint exceeds room along y");
    } else if (lis.origin_y < -kFitSlack ||
               lis.origin_y + lis.footprint_y() > room.length_y + kFitSlack) {
      out.emplace_back("lis origin places array outside room along y");
    }
  }

  for (std::size_t i = 0; i < cfg.emitters.size(); ++i) {
    const Emitter& e = cfg.emitters[i];
    const std::string tag = "emitter[" + std::to_string(i) + "]";
    const Vec3& p = e.position;
    if (!(p.x >= 0.0 && p.x <= room.length_x && p.y >= 0.0 && p.y <= room.length_y)) {
      out.emplace_back(tag + " outside room footprint");
    }
    if (!std::isfinite(p.z)) {
      out.emplace_back(tag + " height not finite");
    } else if (p.z == room.height) {
      out.emplace_back(tag + " emitter on LIS plane");
    } else if (!(p.z > 0.0 && p.z < room.height)) {
      out.emplace_back(tag + " height outside (0, room.height)");
    }
    if (!std::isfinite(e.tx_power_dbm)) out.emplace_back(tag + " tx_power not finite");
    if (!std::isfinite(e.symbol_phase)) out.emplace_back(tag + " symbol_phase not finite");
  }

  for (std::size_t i = 0; i < cfg.scatterers.size(); ++i) {
    const Scatterer& s = cfg.scatterers[i];
    const std::string tag = "scatterer[" + std::to_string(i) + "]";
    if (!finite_positive(s.radius)) out.emplace_back(tag + " radius must be > 0");
    if (!finite_positive(s.height) || s.height >= room.height) {
      out.emplace_back(tag + " height must be in (0, room.height)");
    }
    if (!(s.center.x - s.radius >= 0.0 && s.center.x + s.radius <= room.length_x &&
          s.center.y - s.radius >= 0.0 && s.center.y + s.radius <= room.length_y)) {
      out.emplace_back(tag + " footprint outside room");
    }
    if (!(s.reflection_coeff > 0.0 && s.reflection_coeff <= 1.0)) {
      out.emplace_back(tag + " reflection_coeff must be in (0, 1]");
    }
  }

  for (std::size_t i = 0; i < cfg.humans.size(); ++i) {
    const Human& h = cfg.humans[i];
    const std::string tag = "human[" + std::to_string(i) + "]";
    if (!finite_positive(h.extent_x) || !finite_positive(h.extent_y)) {
      out.emplace_back(tag + " extents must be > 0");
    }
    if (!finite_positive(h.height) || h.height >= room.height) {
      out.emplace_back(tag + " height must be in (0, room.height)");
    }
    const double hx = 0.5 * h.extent_x;
    const double hy = 0.5 * h.extent_y;
    if (!(h.center.x - hx >= 0.0 && h.center.x + hx <= room.length_x &&
          h.center.y - hy >= 0.0 && h.center.y + hy <= room.length_y)) {
      out.emplace_back(tag + " footprint outside room");
    }
    if (!(h.reflection_coeff > 0.0 && h.reflection_coeff < kScattererReflection)) {
      out.emplace_back(tag + " reflection_coeff must be in (0, scatterer default)");
    }
  }

  if (!std::isfinite(cfg.snr_db)) out.emplace_back("snr_db must be finite");
  if (cfg.averaging_count < 1) out.emplace_back("S must be >= 1 (averaging_count)");
  return out;
}

ScenarioConfig full_scale_scenario() {
  ScenarioConfig cfg;
  cfg.room = {10.34, 10.34, 8.0};
  cfg.lis.carrier_frequency = 3.5e9;
  cfg.lis.spacing = half_wavelength(cfg.lis.carrier_frequency);
  cfg.lis.elements_x = 241;
  cfg.lis.elements_y = 241;
  center_array(cfg.lis, cfg.room);
  cfg.emitters.push_back({{5.5, 4.2, kEmitterHeight}, 20.0, 0.0});
  cfg.scatterers.push_back({{2.6, 3.0}});
  cfg.scatterers.push_back({{7.4, 2.8}});
  cfg.scatterers.push_back({{4.8, 7.6}});
  cfg.snr_db = 0.0;
  cfg.averaging_count = 1;
  cfg.rng_seed = 1;
  return cfg;
}

ScenarioConfig desk_scale_scenario() {
  ScenarioConfig cfg;
  cfg.lis.carrier_frequency = 3.5e9;
  cfg.lis.spacing = half_wavelength(cfg.lis.carrier_frequency);
  cfg.lis.elements_x = 129;
  cfg.lis.elements_y = 129;
  cfg.room = {5.6, 5.6, 4.0};
  center_array(cfg.lis, cfg.room);
  cfg.emitters.push_back({{2.9, 2.3, kEmitterHeight}, 20.0, 0.0});
  cfg.scatterers.push_back({{1.4, 1.5}});
  cfg.scatterers.push_back({{4.2, 1.6}});
  cfg.scatterers.push_back({{2.6, 4.2}});
  cfg.snr_db = 0.0;
  cfg.averaging_count = 1;
  cfg.rng_seed = 1;
  return cfg;
}

}  // namespace lisense
