#pragma once

#include <string>
#include <vector>

#include "lisense/grid.hpp"

namespace lisense {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;
/// Free-space impedance, ohms.
inline constexpr double kFreeSpaceImpedance = 120.0 * kPi;

/// Default amplitude reflection coefficients standing in for material constants.
inline constexpr double kScattererReflection = 0.7;
inline constexpr double kHumanReflection = 0.35;
/// Nominal transmitter height above the floor, meters.
inline constexpr double kEmitterHeight = 1.8;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double distance(const Vec3& a, const Vec3& b);

struct WorldXY {
  double x = 0.0;
  double y = 0.0;
};

struct RoomGeometry {
  double length_x = 0.0;
  double length_y = 0.0;
  double height = 0.0;
};

/// Planar array on the ceiling (z = room height). Element (col, row) sits at
/// origin + (col, row) * spacing.
struct LisArrayConfig {
  int elements_x = 1;
  int elements_y = 1;
  double spacing = 0.0;
  double carrier_frequency = 0.0;
  double origin_x = 0.0;
  double origin_y = 0.0;

  double wavelength() const { return kSpeedOfLight / carrier_frequency; }
  std::size_t element_count() const {
    return static_cast<std::size_t>(elements_x) * static_cast<std::size_t>(elements_y);
  }
  double footprint_x() const { return (elements_x - 1) * spacing; }
  double footprint_y() const { return (elements_y - 1) * spacing; }
};

struct Emitter {
  Vec3 position;
  double tx_power_dbm = 20.0;
  double symbol_phase = 0.0;
};

/// Metallic cylinder standing on the floor.
struct Scatterer {
  WorldXY center;
  double radius = 0.5;
  double height = 2.0;
  double reflection_coeff = kScattererReflection;
};

/// Axis-aligned box standing on the floor.
struct Human {
  WorldXY center;
  double extent_x = 0.3;
  double extent_y = 0.5;
  double height = 1.7;
  double reflection_coeff = kHumanReflection;
};

struct ScenarioConfig {
  RoomGeometry room;
  LisArrayConfig lis;
  std::vector<Emitter> emitters;
  std::vector<Scatterer> scatterers;
  std::vector<Human> humans;
  double snr_db = 0.0;
  int averaging_count = 1;
  std::uint64_t rng_seed = 0;
  /// Skip noise injection entirely (infinite SNR).
  bool noiseless = false;
};

/// Places the array so that its footprint is centered in the room.
void center_array(LisArrayConfig& lis, const RoomGeometry& room);

/// Half-wavelength spacing at the array's carrier frequency.
double half_wavelength(double carrier_frequency);

/// World position of element (col, row) on the ceiling plane.
Vec3 element_position(const LisArrayConfig& lis, double ceiling_height, int col, int row);

/// Pixel -> world mapping c = origin + c_p * spacing. Throws std::domain_error
/// for pixels outside the lattice.
WorldXY pixel_to_world(Pixel pixel, const LisArrayConfig& lis);

/// Same affine map for fractional pixel coordinates (component centroids).
WorldXY pixel_to_world(double col, double row, const LisArrayConfig& lis);

/// Nearest lattice pixel, clamped to the array.
Pixel world_to_pixel(WorldXY world, const LisArrayConfig& lis);

/// Checks every scene invariant. Returns human-readable violations in a fixed
/// order; an empty list means the configuration is valid.
std::vector<std::string> validate_config(const ScenarioConfig& cfg);

/// Matched-filter design depth implied by the room: ceiling height minus the
/// nominal transmitter height.
double default_design_depth(const RoomGeometry& room);

/// Full-size room scenario: 10.34 x 10.34 x 8 m room, 3.5 GHz, 20 dBm
/// transmitter at 1.8 m and three metallic cylinders. The array keeps
/// half-wavelength spacing and uses 241 x 241 elements so that it fits the room.
ScenarioConfig full_scale_scenario();

/// Reduced 129 x 129 array in a room sized to its footprint.
ScenarioConfig desk_scale_scenario();

}  // namespace lisense
