#include "puprobe/intensity.hpp"

#include "puprobe/error.hpp"

#include <cmath>

namespace puprobe {

IntensityResult phasor_intensity(Phasor pressure, const PhasorVec3& velocity,
                                 double frequency) {
  IntensityResult r;
  r.frequency = frequency;
  for (int i = 0; i < 3; ++i) {
    const Phasor s = pressure * std::conj(velocity(i));
    r.active(i) = 0.5 * s.real();
    r.reactive(i) = 0.5 * s.imag();
  }
  return r;
}

Vec3 block_intensity(std::span<const double> pressure,
                     const std::array<std::span<const double>, 3>& velocity,
                     double sample_rate) {
  if (!(sample_rate > 0.0)) {
    throw Error(ErrorKind::Domain, "sample_rate must be > 0");
  }
  for (const auto& v : velocity) {
    if (v.size() != pressure.size()) {
      throw Error(ErrorKind::Shape, "pressure and velocity blocks differ in length");
    }
  }
  if (pressure.size() < 2) {
    throw Error(ErrorKind::Shape, "intensity block needs at least two samples");
  }
  Vec3 out = Vec3::Zero();
  for (int axis = 0; axis < 3; ++axis) {
    double acc = 0.0;
    for (std::size_t k = 0; k < pressure.size(); ++k) {
      acc += pressure[k] * velocity[axis][k];
    }
    out(axis) = acc / static_cast<double>(pressure.size());
  }
  return out;
}

double intensity_level_db(double intensity) {
  if (!(intensity > 0.0) || !std::isfinite(intensity)) {
    throw Error(ErrorKind::Domain, "intensity level needs a positive intensity");
  }
  return 10.0 * std::log10(intensity / kReferenceIntensity);
}

}  // namespace puprobe
