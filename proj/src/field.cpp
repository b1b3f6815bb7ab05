#include "puprobe/field.hpp"

#include "puprobe/error.hpp"

#include <cmath>
#include <string>

namespace puprobe {
namespace {

constexpr double kUnitNormTolerance = 1e-12;

void require_unit(const Vec3& v, const char* name) {
  if (!v.allFinite() || std::abs(v.norm() - 1.0) > kUnitNormTolerance) {
    throw Error(ErrorKind::InvalidModel,
                std::string(name) + " must be a unit vector");
  }
}

void require_amplitude_and_frequency(double amplitude, double frequency) {
  if (!std::isfinite(amplitude) || amplitude < 0.0) {
    throw Error(ErrorKind::InvalidModel, "amplitude must be >= 0");
  }
  if (!std::isfinite(frequency) || frequency <= 0.0) {
    throw Error(ErrorKind::InvalidModel, "frequency must be > 0");
  }
}

}  // namespace

std::optional<double> phase_of(Phasor p) {
  if (std::abs(p) == 0.0) return std::nullopt;
  return std::arg(p);
}

void Medium::validate() const {
  if (!(density > 0.0) || !std::isfinite(density)) {
    throw Error(ErrorKind::InvalidModel, "medium density must be > 0");
  }
  if (!(sound_speed > 0.0) || !std::isfinite(sound_speed)) {
    throw Error(ErrorKind::InvalidModel, "medium sound_speed must be > 0");
  }
}

void validate(const PlaneWave& model) {
  require_unit(model.direction, "plane wave direction");
  require_amplitude_and_frequency(model.pressure_amplitude, model.frequency);
}

void validate(const StandingWaveTube& model) {
  require_unit(model.axis, "tube axis");
  if (!std::isfinite(model.rigid_end_position)) {
    throw Error(ErrorKind::InvalidModel, "rigid_end_position must be finite");
  }
  require_amplitude_and_frequency(model.pressure_amplitude_at_antinode,
                                  model.frequency);
}

void validate(const Monopole& model) {
  if (!model.source_position.allFinite()) {
    throw Error(ErrorKind::InvalidModel, "source_position must be finite");
  }
  require_amplitude_and_frequency(model.pressure_amplitude_at_1m,
                                  model.frequency);
}

void validate(const FieldModel& model) {
  std::visit([](const auto& m) { validate(m); }, model);
}

double frequency_of(const FieldModel& model) {
  return std::visit([](const auto& m) { return m.frequency; }, model);
}

FieldSample sample_plane_wave(const PlaneWave& model, const Medium& medium,
                              const Vec3& position) {
  validate(model);
  medium.validate();
  const double k = medium.wavenumber(model.frequency);
  const Phasor p =
      model.pressure_amplitude * std::exp(Phasor(0.0, -k * model.direction.dot(position)));
  FieldSample s;
  s.frequency = model.frequency;
  s.pressure = p;
  const Phasor v = p / medium.characteristic_impedance();
  s.velocity = model.direction.cast<Phasor>() * v;
  return s;
}

FieldSample sample_standing_wave(const StandingWaveTube& model,
                                 const Medium& medium, const Vec3& position) {
  validate(model);
  medium.validate();
  const double k = medium.wavenumber(model.frequency);
  const double x = model.axis.dot(position) - model.rigid_end_position;
  const double a = model.pressure_amplitude_at_antinode;
  FieldSample s;
  s.frequency = model.frequency;
  // Pressure real, velocity purely imaginary: exact quadrature.
  s.pressure = Phasor(a * std::cos(k * x), 0.0);
  const Phasor v_axis(0.0, a / medium.characteristic_impedance() * std::sin(k * x));
  s.velocity = model.axis.cast<Phasor>() * v_axis;
  return s;
}

FieldSample sample_monopole(const Monopole& model, const Medium& medium,
                            const Vec3& position) {
  validate(model);
  medium.validate();
  const Vec3 offset = position - model.source_position;
  const double r = offset.norm();
  if (r == 0.0) {
    throw Error(ErrorKind::SingularPoint,
                "monopole sampled at its source position");
  }
  const double k = medium.wavenumber(model.frequency);
  const Phasor p = (model.pressure_amplitude_at_1m / r) * std::exp(Phasor(0.0, -k * r));
  const Phasor v_r =
      p / medium.characteristic_impedance() * Phasor(1.0, -1.0 / (k * r));
  FieldSample s;
  s.frequency = model.frequency;
  s.pressure = p;
  s.velocity = (offset / r).cast<Phasor>() * v_r;
  return s;
}

FieldSample sample_field(const FieldModel& model, const Medium& medium,
                         const Vec3& position) {
  return std::visit(
      [&](const auto& m) -> FieldSample {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PlaneWave>) {
          return sample_plane_wave(m, medium, position);
        } else if constexpr (std::is_same_v<T, StandingWaveTube>) {
          return sample_standing_wave(m, medium, position);
        } else {
          return sample_monopole(m, medium, position);
        }
      },
      model);
}

FieldModel with_amplitude(FieldModel model, double amplitude) {
  std::visit(
      [&](auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PlaneWave>) {
          m.pressure_amplitude = amplitude;
        } else if constexpr (std::is_same_v<T, StandingWaveTube>) {
          m.pressure_amplitude_at_antinode = amplitude;
        } else {
          m.pressure_amplitude_at_1m = amplitude;
        }
      },
      model);
  return model;
}

}  // namespace puprobe
