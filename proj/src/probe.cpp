#include "puprobe/probe.hpp"

#include "puprobe/error.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <random>

namespace puprobe {
namespace {

constexpr double kAxisTolerance = 1e-12;
constexpr double kOrthogonalityTolerance = 1e-9;
constexpr double kRankTolerance = 1e-9;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorKind::InvalidModel, std::string(name) + " must be > 0");
  }
}

void require_rank3(const AxesMatrix& axes) {
  if (!spans_three_dimensions(axes)) {
    throw Error(ErrorKind::DegenerateGeometry,
                "velocity axes do not span three dimensions");
  }
}

}  // namespace

void WireQuad::validate() const {
  require_positive(side_spacing, "side_spacing");
  require_positive(diagonal_spacing, "diagonal_spacing");
  require_positive(wire_length, "wire_length");
  require_positive(wire_width, "wire_width");
  require_positive(wire_height, "wire_height");
  const double square_diagonal = side_spacing * std::sqrt(2.0);
  if (std::abs(diagonal_spacing - square_diagonal) / diagonal_spacing >= 0.05) {
    throw Error(ErrorKind::InvalidModel,
                "diagonal_spacing inconsistent with a square of side_spacing");
  }
}

void ChannelResponse::validate() const {
  require_positive(s0, "s0");
  require_positive(corner_f1, "corner_f1");
  if (!(corner_f2 >= corner_f1) || !std::isfinite(corner_f2)) {
    throw Error(ErrorKind::InvalidModel, "corner_f2 must be >= corner_f1");
  }
  if (!(noise_density >= 0.0) || !std::isfinite(noise_density)) {
    throw Error(ErrorKind::InvalidModel, "noise_density must be >= 0");
  }
  if (!(four_wire_gain >= 1.0) || !std::isfinite(four_wire_gain)) {
    throw Error(ErrorKind::InvalidModel, "four_wire_gain must be >= 1");
  }
}

void VelocityChannel::validate() const {
  if (!sensitivity_axis.allFinite() ||
      std::abs(sensitivity_axis.norm() - 1.0) > kAxisTolerance) {
    throw Error(ErrorKind::InvalidModel, "sensitivity_axis must be a unit vector");
  }
  response.validate();
}

Vec3 ChipAssembly::channel_axis(int index) const {
  const double angle =
      deg_to_rad(nominal_axis_angles_deg.at(index) + axis_offset_deg);
  return orientation * Vec3(std::cos(angle), std::sin(angle), 0.0);
}

Vec3 ChipAssembly::nominal_channel_axis(int index) const {
  const double angle = deg_to_rad(nominal_axis_angles_deg.at(index));
  return orientation * Vec3(std::cos(angle), std::sin(angle), 0.0);
}

Vec3 ChipAssembly::in_plane_direction(double theta_deg) const {
  const double angle = deg_to_rad(theta_deg);
  return orientation * Vec3(std::cos(angle), std::sin(angle), 0.0);
}

void ChipAssembly::validate() const {
  quad.validate();
  for (const auto& ch : channels) ch.validate();
  if (!std::isfinite(axis_offset_deg) ||
      !std::isfinite(nominal_axis_angles_deg[0]) ||
      !std::isfinite(nominal_axis_angles_deg[1])) {
    throw Error(ErrorKind::InvalidModel, "chip angles must be finite");
  }
  if (!orientation.allFinite() ||
      !(orientation.transpose() * orientation).isIdentity(1e-9) ||
      std::abs(orientation.determinant() - 1.0) > 1e-9) {
    throw Error(ErrorKind::InvalidModel,
                "chip orientation must be a proper rotation");
  }
  if (std::abs(channel_axis(0).dot(channel_axis(1))) > kOrthogonalityTolerance) {
    throw Error(ErrorKind::InvalidModel, "chip channel axes must be orthogonal");
  }
}

double BackChamber::compliance(const Medium& medium) const {
  return cavity_volume /
         (medium.density * medium.sound_speed * medium.sound_speed);
}

void BackChamber::validate() const {
  require_positive(cavity_volume, "cavity_volume");
  require_positive(acoustic_resistance, "acoustic_resistance");
}

Mat3 plane_orientation(const std::string& plane) {
  Mat3 r;
  if (plane == "xy") {
    r = Mat3::Identity();
  } else if (plane == "xz") {
    r.col(0) = Vec3::UnitX();
    r.col(1) = Vec3::UnitZ();
    r.col(2) = -Vec3::UnitY();
  } else if (plane == "yz") {
    r.col(0) = Vec3::UnitY();
    r.col(1) = Vec3::UnitZ();
    r.col(2) = Vec3::UnitX();
  } else {
    throw Error(ErrorKind::InvalidModel, "unknown chip plane '" + plane + "'");
  }
  return r;
}

ProbeConfig ProbeConfig::make_default() {
  ProbeConfig cfg;
  cfg.chips[0].orientation = plane_orientation("xy");
  cfg.chips[1].orientation = plane_orientation("xz");
  // with the unit effective area the internal velocity is ~1e-10 m/s per Pa,
  // far below any electrical floor; noise here must be opted into explicitly
  cfg.pressure_channel.inner_channel.noise_density = 0.0;
  return cfg;
}

void ProbeConfig::validate() const {
  medium.validate();
  for (const auto& chip : chips) chip.validate();
  pressure_channel.back_chamber.validate();
  pressure_channel.inner_channel.validate();
  require_rank3(probe_axes_matrix(*this));
}

bool spans_three_dimensions(const AxesMatrix& axes) {
  const Eigen::MatrixXd dynamic = axes;
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(dynamic).singularValues();
  return sv(2) > kRankTolerance * sv(0);
}

double sensitivity_magnitude(const ChannelResponse& ch, double frequency) {
  if (!(frequency > 0.0) || !std::isfinite(frequency)) {
    throw Error(ErrorKind::Domain, "frequency must be > 0");
  }
  const double r1 = frequency / ch.corner_f1;
  const double r2 = frequency / ch.corner_f2;
  return ch.effective_s0() / std::sqrt((1.0 + r1 * r1) * (1.0 + r2 * r2));
}

Phasor velocity_channel_output(const VelocityChannel& ch,
                               const FieldSample& sample) {
  const Phasor projected = ch.sensitivity_axis.cast<Phasor>().dot(sample.velocity);
  return sensitivity_magnitude(ch.response, sample.frequency) * projected;
}

Phasor back_chamber_admittance(const BackChamber& bc, double frequency,
                               const Medium& medium) {
  if (!(frequency > 0.0) || !std::isfinite(frequency)) {
    throw Error(ErrorKind::Domain, "frequency must be > 0");
  }
  const double omega = 2.0 * kPi * frequency;
  const double c = bc.compliance(medium);
  return Phasor(0.0, omega * c) /
         Phasor(1.0, omega * bc.acoustic_resistance * c);
}

Phasor pressure_channel_transfer(const PressureChannel& pc, double frequency,
                                 const Medium& medium) {
  // Effective area normalised to 1 m^2: internal velocity = p * Y.
  return sensitivity_magnitude(pc.inner_channel, frequency) *
         back_chamber_admittance(pc.back_chamber, frequency, medium);
}

Phasor pressure_channel_output(const PressureChannel& pc, Phasor pressure,
                               double frequency, const Medium& medium) {
  return pressure_channel_transfer(pc, frequency, medium) * pressure;
}

double selfnoise_density(const ChannelResponse& ch, double frequency) {
  const double s = sensitivity_magnitude(ch, frequency);
  if (!(s > 0.0)) {
    throw Error(ErrorKind::Domain, "zero sensitivity");
  }
  return ch.noise_density / s;
}

std::array<VelocityChannel, 4> velocity_channels(const ProbeConfig& cfg) {
  std::array<VelocityChannel, 4> out;
  for (int chip = 0; chip < 2; ++chip) {
    for (int i = 0; i < 2; ++i) {
      out[2 * chip + i].sensitivity_axis = cfg.chips[chip].channel_axis(i);
      out[2 * chip + i].response = cfg.chips[chip].channels[i];
    }
  }
  return out;
}

AxesMatrix probe_axes_matrix(const ProbeConfig& cfg) {
  AxesMatrix axes;
  for (int chip = 0; chip < 2; ++chip) {
    for (int i = 0; i < 2; ++i) {
      axes.row(2 * chip + i) = cfg.chips[chip].channel_axis(i).transpose();
    }
  }
  require_rank3(axes);
  return axes;
}

AxesMatrix nominal_axes_matrix(const ProbeConfig& cfg) {
  AxesMatrix axes;
  for (int chip = 0; chip < 2; ++chip) {
    for (int i = 0; i < 2; ++i) {
      axes.row(2 * chip + i) = cfg.chips[chip].nominal_channel_axis(i).transpose();
    }
  }
  require_rank3(axes);
  return axes;
}

std::array<Phasor, kChannelCount> channel_phasors(const ProbeConfig& cfg,
                                                  const FieldModel& field,
                                                  const Vec3& position) {
  const FieldSample sample = sample_field(field, cfg.medium, position);
  std::array<Phasor, kChannelCount> out;
  const auto channels = velocity_channels(cfg);
  for (int i = 0; i < kVelocityChannels; ++i) {
    out[i] = velocity_channel_output(channels[i], sample);
  }
  out[kPressureChannelIndex] = pressure_channel_output(
      cfg.pressure_channel, sample.pressure, sample.frequency, cfg.medium);
  return out;
}

TimeSeries synthesize_timeseries(const ProbeConfig& cfg,
                                 const FieldModel& field, double sample_rate,
                                 double duration, std::uint64_t seed,
                                 const Vec3& position) {
  const double frequency = frequency_of(field);
  if (!(sample_rate > 2.0 * frequency) || !std::isfinite(sample_rate)) {
    throw Error(ErrorKind::Sampling,
                "sample_rate must exceed twice the field frequency");
  }
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw Error(ErrorKind::Sampling, "duration must be > 0");
  }
  const auto n = static_cast<std::size_t>(std::llround(duration * sample_rate));
  if (n == 0) {
    throw Error(ErrorKind::Sampling, "duration shorter than one sample");
  }

  const auto phasors = channel_phasors(cfg, field, position);
  std::array<double, kChannelCount> noise_density{};
  for (int i = 0; i < 2; ++i) {
    noise_density[i] = cfg.chips[0].channels[i].noise_density;
    noise_density[2 + i] = cfg.chips[1].channels[i].noise_density;
  }
  noise_density[kPressureChannelIndex] =
      cfg.pressure_channel.inner_channel.noise_density;

  // cos/sin of the carrier are shared by all channels.
  std::vector<double> carrier_cos(n), carrier_sin(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double cycles =
        std::fmod(frequency * static_cast<double>(k), sample_rate) / sample_rate;
    carrier_cos[k] = std::cos(2.0 * kPi * cycles);
    carrier_sin[k] = std::sin(2.0 * kPi * cycles);
  }

  TimeSeries ts;
  ts.sample_rate = sample_rate;
  for (int c = 0; c < kChannelCount; ++c) {
    auto& out = ts.channels[c];
    out.resize(n);
    const double re = phasors[c].real();
    const double im = phasors[c].imag();
    for (std::size_t k = 0; k < n; ++k) {
      out[k] = re * carrier_cos[k] - im * carrier_sin[k];
    }
    const double sigma = noise_density[c] * std::sqrt(sample_rate / 2.0);
    if (sigma > 0.0) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed),
                        static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(c)};
      std::mt19937_64 rng(seq);
      std::normal_distribution<double> gauss(0.0, sigma);
      for (auto& x : out) x += gauss(rng);
    }
  }
  return ts;
}

}  // namespace puprobe
