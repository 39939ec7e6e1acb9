#pragma once

#include <cstdint>

#include "lisense/channel.hpp"
#include "lisense/radiomap.hpp"
#include "lisense/scene.hpp"

namespace lisense {

/// Array front end: channel synthesis, noise and matched filtering for snapshots
/// that share one room and array geometry.
class LisSensor {
 public:
  LisSensor(const ScenarioConfig& geometry, FilterKernel kernel, ChannelOptions channel = {});

  /// Kernel with the default size and the room's default design depth.
  static FilterKernel default_kernel(const ScenarioConfig& geometry);

  /// Antenna outputs for the snapshot's emitters and objects; noise settings come
  /// from the snapshot, the noise stream from `noise_seed`.
  ComplexGrid receive(const ScenarioConfig& snapshot, std::uint64_t noise_seed) const;

  RadioMap capture(const ScenarioConfig& snapshot, std::uint64_t noise_seed) const;

  const FilterKernel& kernel() const { return kernel_; }
  const LisArrayConfig& lis() const { return lis_; }

 private:
  LisArrayConfig lis_;
  FilterKernel kernel_;
  ChannelOptions channel_;
  MatchedFilter filter_;
};

}  // namespace lisense
