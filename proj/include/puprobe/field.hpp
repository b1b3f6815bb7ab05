#pragma once

// Analytic single-frequency acoustic fields.
//
// Phasors use the exp(+j*omega*t) convention and store peak amplitude.

#include <Eigen/Core>

#include <complex>
#include <optional>
#include <variant>

namespace puprobe {

using Phasor = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using PhasorVec3 = Eigen::Matrix<std::complex<double>, 3, 1>;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Phase in radians, or nullopt for a zero phasor.
std::optional<double> phase_of(Phasor p);

struct Medium {
  double density = 1.21;     // kg/m^3
  double sound_speed = 343;  // m/s

  double characteristic_impedance() const { return density * sound_speed; }
  double wavenumber(double frequency) const {
    return 2.0 * kPi * frequency / sound_speed;
  }
  void validate() const;
};

struct FieldSample {
  Phasor pressure;
  PhasorVec3 velocity = PhasorVec3::Zero();
  double frequency = 0.0;
};

struct PlaneWave {
  Vec3 direction = Vec3::UnitX();
  double pressure_amplitude = 1.0;
  double frequency = 1000.0;
};

/// Lossless rigidly terminated duct. The coordinate along `axis` relative to
/// `rigid_end_position` is the distance from the wall.
struct StandingWaveTube {
  Vec3 axis = Vec3::UnitX();
  double rigid_end_position = 0.0;
  double pressure_amplitude_at_antinode = 1.0;
  double frequency = 700.0;
};

struct Monopole {
  Vec3 source_position = Vec3::Zero();
  double pressure_amplitude_at_1m = 1.0;
  double frequency = 1000.0;
};

using FieldModel = std::variant<PlaneWave, StandingWaveTube, Monopole>;

void validate(const PlaneWave& model);
void validate(const StandingWaveTube& model);
void validate(const Monopole& model);
void validate(const FieldModel& model);

double frequency_of(const FieldModel& model);

FieldSample sample_plane_wave(const PlaneWave& model, const Medium& medium,
                              const Vec3& position);
FieldSample sample_standing_wave(const StandingWaveTube& model,
                                 const Medium& medium, const Vec3& position);
FieldSample sample_monopole(const Monopole& model, const Medium& medium,
                            const Vec3& position);

/// Dispatches on the model alternative.
FieldSample sample_field(const FieldModel& model, const Medium& medium,
                         const Vec3& position);

/// Scales the model's amplitude parameter; used by callers that need a
/// silent or rescaled copy of a configured field.
FieldModel with_amplitude(FieldModel model, double amplitude);

}  // namespace puprobe
