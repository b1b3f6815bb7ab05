#pragma once

#include "puprobe/field.hpp"

#include <array>
#include <span>

namespace puprobe {

struct IntensityResult {
  Vec3 active = Vec3::Zero();    // W/m^2
  Vec3 reactive = Vec3::Zero();  // W/m^2
  double frequency = 0.0;
};

/// active = Re(p conj(v)) / 2, reactive = Im(p conj(v)) / 2 for peak phasors.
IntensityResult phasor_intensity(Phasor pressure, const PhasorVec3& velocity,
                                 double frequency = 0.0);

/// Mean of p(t) * v_i(t) over the block.
Vec3 block_intensity(std::span<const double> pressure,
                     const std::array<std::span<const double>, 3>& velocity,
                     double sample_rate);

inline constexpr double kReferenceIntensity = 1e-12;  // W/m^2

double intensity_level_db(double intensity);

}  // namespace puprobe
