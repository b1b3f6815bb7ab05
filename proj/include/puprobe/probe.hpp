#pragma once

// Probe model: four-wire chip geometry, velocity channels with a two-corner
// sensitivity roll-off, the back-chamber pressure channel, and multichannel
// time-series synthesis.

#include "puprobe/field.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace puprobe {

using Mat3 = Eigen::Matrix3d;
using AxesMatrix = Eigen::Matrix<double, 4, 3>;

/// Cross-section geometry of one four-wire chip. Lengths in metres.
struct WireQuad {
  double side_spacing = 250e-6;
  double diagonal_spacing = 350e-6;
  double wire_length = 1.5e-3;
  double wire_width = 2e-6;
  double wire_height = 300e-9;

  void validate() const;
};

enum class WireMode { TwoWire, FourWire };

/// Frequency response and noise of one heated-wire sensor, independent of
/// where it points.
struct ChannelResponse {
  double s0 = 10e-3;            // V/(m/s) at low frequency
  double corner_f1 = 1000.0;    // Hz
  double corner_f2 = 10000.0;   // Hz
  double noise_density = 1e-8;  // V/sqrt(Hz)
  WireMode wire_mode = WireMode::FourWire;
  double four_wire_gain = 1.5;

  double effective_s0() const {
    return wire_mode == WireMode::FourWire ? s0 * four_wire_gain : s0;
  }
  void validate() const;
};

struct VelocityChannel {
  Vec3 sensitivity_axis = Vec3::UnitX();
  ChannelResponse response;

  void validate() const;
};

/// One chip holding two diagonal wire pairs. The chip-local frame has the
/// cross-section in its first two axes and the wire length along the third;
/// `orientation` maps local coordinates to the probe frame.
struct ChipAssembly {
  WireQuad quad;
  std::array<ChannelResponse, 2> channels;
  std::array<double, 2> nominal_axis_angles_deg{45.0, 135.0};
  double axis_offset_deg = 15.0;
  Mat3 orientation = Mat3::Identity();

  /// Unit axis of channel `index` (0 or 1) in the probe frame.
  Vec3 channel_axis(int index) const;
  /// Same, with the offset removed (the axis calibration aims for).
  Vec3 nominal_channel_axis(int index) const;
  Vec3 length_axis() const { return orientation.col(2); }
  /// Direction in the probe frame of incidence angle `theta_deg` measured in
  /// the cross-section plane from local axis 1.
  Vec3 in_plane_direction(double theta_deg) const;

  void validate() const;
};

struct BackChamber {
  double cavity_volume = 2e-9;          // m^3
  double acoustic_resistance = 5e11;    // Pa*s/m^3

  double compliance(const Medium& medium) const;
  void validate() const;
};

struct PressureChannel {
  BackChamber back_chamber;
  ChannelResponse inner_channel;
};

struct ProbeConfig {
  std::array<ChipAssembly, 2> chips;
  PressureChannel pressure_channel;
  Medium medium;

  /// Defaults: chip A cross-section in the xy-plane, chip B in the xz-plane.
  static ProbeConfig make_default();
  void validate() const;
};

/// Rotation for a chip whose cross-section lies in a named probe plane
/// ("xy", "xz" or "yz"). Throws on an unknown name.
Mat3 plane_orientation(const std::string& plane);

double sensitivity_magnitude(const ChannelResponse& ch, double frequency);

Phasor velocity_channel_output(const VelocityChannel& ch,
                               const FieldSample& sample);

/// Volume-velocity admittance of the back chamber, Y = jwC / (1 + jwRC).
Phasor back_chamber_admittance(const BackChamber& bc, double frequency,
                               const Medium& medium);

/// Complex transfer from external pressure (Pa) to output voltage.
Phasor pressure_channel_transfer(const PressureChannel& pc, double frequency,
                                 const Medium& medium);

Phasor pressure_channel_output(const PressureChannel& pc, Phasor pressure,
                               double frequency, const Medium& medium);

double selfnoise_density(const ChannelResponse& ch, double frequency);

/// The four velocity channels in probe-frame order: chip A ch1, ch2, chip B
/// ch1, ch2.
std::array<VelocityChannel, 4> velocity_channels(const ProbeConfig& cfg);

/// Rows are the probe-frame sensitivity axes; throws DegenerateGeometry when
/// the rows do not span 3D.
AxesMatrix probe_axes_matrix(const ProbeConfig& cfg);

/// True when the rows span 3D (smallest singular value above 1e-9 of the
/// largest).
bool spans_three_dimensions(const AxesMatrix& axes);

/// Axes with every chip offset removed.
AxesMatrix nominal_axes_matrix(const ProbeConfig& cfg);

inline constexpr int kVelocityChannels = 4;
inline constexpr int kPressureChannelIndex = 4;
inline constexpr int kChannelCount = 5;

struct TimeSeries {
  double sample_rate = 0.0;
  /// channels[0..3] velocity, channels[4] pressure; volts.
  std::array<std::vector<double>, kChannelCount> channels;

  std::size_t length() const { return channels[0].size(); }
};

/// Phasor output (V) of every channel for a field sampled at `position`.
std::array<Phasor, kChannelCount> channel_phasors(const ProbeConfig& cfg,
                                                  const FieldModel& field,
                                                  const Vec3& position);

TimeSeries synthesize_timeseries(const ProbeConfig& cfg,
                                 const FieldModel& field, double sample_rate,
                                 double duration, std::uint64_t seed,
                                 const Vec3& position = Vec3::Zero());

}  // namespace puprobe
