#include "lisense/sensor.hpp"

#include <stdexcept>

namespace lisense {

LisSensor::LisSensor(const ScenarioConfig& geometry, FilterKernel kernel, ChannelOptions channel)
    : lis_(geometry.lis),
      kernel_(std::move(kernel)),
      channel_(channel),
      filter_(kernel_, static_cast<std::size_t>(lis_.elements_x),
              static_cast<std::size_t>(lis_.elements_y)) {}

FilterKernel LisSensor::default_kernel(const ScenarioConfig& geometry) {
  const LisArrayConfig& lis = geometry.lis;
  return design_filter(lis.carrier_frequency, default_design_depth(geometry.room),
                       default_kernel_size(lis.elements_x, lis.elements_y), lis.spacing);
}

ComplexGrid LisSensor::receive(const ScenarioConfig& snapshot, std::uint64_t noise_seed) const {
  if (snapshot.lis.elements_x != lis_.elements_x || snapshot.lis.elements_y != lis_.elements_y) {
    throw std::invalid_argument("LisSensor: snapshot array differs from the sensor array");
  }
  const ComplexGrid field = superpose(snapshot, channel_);
  NoiseSpec noise = noise_spec(snapshot);
  noise.rng_seed = noise_seed;
  if (snapshot.emitters.empty()) noise.noiseless = true;
  return element_signal(field, noise, lis_.wavelength());
}

RadioMap LisSensor::capture(const ScenarioConfig& snapshot, std::uint64_t noise_seed) const {
  return apply_filter(receive(snapshot, noise_seed), filter_, lis_);
}

}  // namespace lisense
