#include "puprobe/bench/experiments.hpp"

#include "puprobe/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace puprobe::bench {
namespace {

constexpr double kArgmaxTieTolerance = 1e-12;

std::vector<double> normalized(const std::vector<double>& mags) {
  const double peak = *std::max_element(mags.begin(), mags.end());
  if (!(peak > 0.0)) {
    throw Error(ErrorKind::NoSignal, "polar scan channel has no signal");
  }
  std::vector<double> out(mags.size());
  std::transform(mags.begin(), mags.end(), out.begin(),
                 [peak](double m) { return m / peak; });
  return out;
}

std::vector<double> magnitudes(const std::vector<Phasor>& phasors) {
  std::vector<double> out(phasors.size());
  std::transform(phasors.begin(), phasors.end(), out.begin(),
                 [](Phasor p) { return std::abs(p); });
  return out;
}

PolarScan make_scan(double frequency, const std::vector<double>& angles,
                    const std::vector<Phasor>& a, const std::vector<Phasor>& b) {
  PolarScan scan;
  scan.frequency = frequency;
  scan.angles_deg = angles;
  scan.magnitudes = {normalized(magnitudes(a)), normalized(magnitudes(b))};
  return scan;
}

double nearest_distance(const std::vector<std::size_t>& from,
                        const std::vector<std::size_t>& to) {
  double worst = 0.0;
  for (std::size_t i : from) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j : to) {
      best = std::min(best, std::abs(static_cast<double>(i) - static_cast<double>(j)));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
struct PlanDestroy {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using PlanPtr = std::unique_ptr<fftw_plan_s, PlanDestroy>;

}  // namespace

double grid_argmax_deg(const std::vector<double>& angles_deg,
                       const std::vector<double>& magnitudes) {
  if (angles_deg.empty() || angles_deg.size() != magnitudes.size()) {
    throw Error(ErrorKind::Shape, "argmax needs matching non-empty grids");
  }
  const double peak = *std::max_element(magnitudes.begin(), magnitudes.end());
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    if (magnitudes[i] >= peak * (1.0 - kArgmaxTieTolerance)) return angles_deg[i];
  }
  return angles_deg.front();
}

std::array<Phasor, 2> turntable_outputs(const ProbeConfig& cfg, int chip,
                                        double theta_deg, double frequency,
                                        double amplitude) {
  const ChipAssembly& c = cfg.chips.at(chip);
  PlaneWave wave;
  wave.direction = c.in_plane_direction(theta_deg);
  wave.pressure_amplitude = amplitude;
  wave.frequency = frequency;
  const FieldSample sample = sample_plane_wave(wave, cfg.medium, Vec3::Zero());
  std::array<Phasor, 2> out;
  for (int i = 0; i < 2; ++i) {
    VelocityChannel ch{c.channel_axis(i), c.channels[i]};
    out[i] = velocity_channel_output(ch, sample);
  }
  return out;
}

PolarScanReport run_polar_scan(const ProbeConfig& cfg,
                               const PolarScanExperiment& exp) {
  PolarScanReport report;
  report.chip = (exp.channel - 1) / 2;
  const ChipAssembly& chip = cfg.chips.at(report.chip);
  const auto angles = angle_grid(exp.step_deg);

  std::vector<Phasor> ch1(angles.size()), ch2(angles.size());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const auto out = turntable_outputs(cfg, report.chip, angles[i],
                                       exp.frequency, exp.amplitude);
    ch1[i] = out[0];
    ch2[i] = out[1];
  }
  report.uncorrected = make_scan(exp.frequency, angles, ch1, ch2);
  for (int c = 0; c < 2; ++c) {
    report.argmax_deg[c] = grid_argmax_deg(angles, report.uncorrected.magnitudes[c]);
  }
  if (exp.correction.mode == CorrectionMode::None) return report;

  ChipCalibration cal;
  if (exp.correction.mode == CorrectionMode::Auto) {
    std::array<AxisOffsetEstimate, 2> est;
    for (int c = 0; c < 2; ++c) {
      est[c] = estimate_axis_offset(report.uncorrected, c,
                                    chip.nominal_axis_angles_deg[c]);
    }
    report.estimates = est;
    cal.offset_deg = 0.5 * (est[0].offset_deg + est[1].offset_deg);
  } else {
    cal.offset_deg = exp.correction.fixed_offset_deg;
  }
  cal.matrix = correction_matrix(cal.offset_deg, true);
  report.calibration = cal;

  const auto mixed = apply_mixing<Phasor>(cal.matrix, ch1, ch2);
  report.corrected = make_scan(exp.frequency, angles, mixed.first, mixed.second);
  std::array<double, 2> corrected_argmax;
  double residual = 0.0;
  for (int c = 0; c < 2; ++c) {
    corrected_argmax[c] = grid_argmax_deg(angles, report.corrected->magnitudes[c]);
    const auto check = estimate_axis_offset(*report.corrected, c,
                                            chip.nominal_axis_angles_deg[c]);
    if (std::abs(check.offset_deg) > std::abs(residual)) residual = check.offset_deg;
  }
  report.corrected_argmax_deg = corrected_argmax;
  report.residual_offset_deg = residual;
  return report;
}

ChipCalibration auto_calibrate_chip(const ProbeConfig& cfg, int chip,
                                    double frequency, double step_deg) {
  PolarScanExperiment exp;
  exp.frequency = frequency;
  exp.step_deg = step_deg;
  exp.channel = 2 * chip + 1;
  exp.correction.mode = CorrectionMode::Auto;
  return *run_polar_scan(cfg, exp).calibration;
}

PressurePolarReport run_pressure_polar(const ProbeConfig& cfg,
                                       const PressurePolarExperiment& exp) {
  const auto angles = angle_grid(exp.step_deg);
  std::vector<double> mags(angles.size());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    PlaneWave wave;
    wave.direction = cfg.chips[0].in_plane_direction(angles[i]);
    wave.pressure_amplitude = exp.amplitude;
    wave.frequency = exp.frequency;
    const FieldSample sample = sample_plane_wave(wave, cfg.medium, Vec3::Zero());
    mags[i] = std::abs(pressure_channel_output(cfg.pressure_channel, sample.pressure,
                                               exp.frequency, cfg.medium));
  }
  PressurePolarReport report;
  report.scan.frequency = exp.frequency;
  report.scan.angles_deg = angles;
  report.scan.magnitudes = {normalized(mags)};
  const auto [lo, hi] = std::minmax_element(mags.begin(), mags.end());
  report.max_min_ratio_db = 20.0 * std::log10(*hi / *lo);
  return report;
}

std::vector<std::size_t> local_extrema(const std::vector<double>& values,
                                       bool maxima) {
  std::vector<std::size_t> out;
  const std::size_t n = values.size();
  if (n < 2) return out;
  // Sign flip turns minimum search into maximum search.
  auto v = [&](std::size_t i) { return maxima ? values[i] : -values[i]; };
  for (std::size_t i = 0; i < n; ++i) {
    const bool has_left = i > 0;
    const bool has_right = i + 1 < n;
    const bool ge_left = !has_left || v(i) >= v(i - 1);
    const bool ge_right = !has_right || v(i) >= v(i + 1);
    const bool strict = (has_left && v(i) > v(i - 1)) || (has_right && v(i) > v(i + 1));
    if (ge_left && ge_right && strict) out.push_back(i);
  }
  return out;
}

TubeSweepReport run_tube_sweep(const ProbeConfig& cfg,
                               const TubeSweepExperiment& exp) {
  TubeSweepReport report;
  report.mode = exp.mode;
  const std::size_t n = static_cast<std::size_t>(exp.points);
  const double lo = exp.mode == SweepMode::Position ? exp.x_min : exp.f_min;
  const double hi = exp.mode == SweepMode::Position ? exp.x_max : exp.f_max;
  const auto channels = velocity_channels(cfg);
  const VelocityChannel& vch = channels.at(exp.velocity_channel - 1);

  double p_max = 0.0, v_max = 0.0, active_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double value = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    const double x = exp.mode == SweepMode::Position ? value : exp.position;
    StandingWaveTube tube;
    tube.axis = exp.axis;
    tube.rigid_end_position = exp.rigid_end_position;
    tube.pressure_amplitude_at_antinode = exp.amplitude;
    tube.frequency = exp.mode == SweepMode::Position ? exp.frequency : value;
    const Vec3 point = (exp.rigid_end_position + x) * exp.axis;
    const FieldSample sample = sample_standing_wave(tube, cfg.medium, point);

    report.sweep_values.push_back(value);
    report.pressure_mag.push_back(std::abs(pressure_channel_output(
        cfg.pressure_channel, sample.pressure, sample.frequency, cfg.medium)));
    report.velocity_mag.push_back(std::abs(velocity_channel_output(vch, sample)));
    const IntensityResult intensity =
        phasor_intensity(sample.pressure, sample.velocity, sample.frequency);
    const double axial = intensity.active.dot(exp.axis);
    report.axial_active.push_back(axial);

    p_max = std::max(p_max, std::abs(sample.pressure));
    v_max = std::max(v_max, sample.velocity.norm());
    active_max = std::max(active_max, std::abs(axial));
  }
  report.max_active_ratio = p_max * v_max > 0.0 ? active_max / (p_max * v_max) : 0.0;

  report.pressure_maxima = local_extrema(report.pressure_mag, true);
  report.pressure_minima = local_extrema(report.pressure_mag, false);
  report.velocity_maxima = local_extrema(report.velocity_mag, true);
  report.velocity_minima = local_extrema(report.velocity_mag, false);
  report.max_alignment_steps =
      std::max(nearest_distance(report.pressure_maxima, report.velocity_minima),
               nearest_distance(report.velocity_minima, report.pressure_maxima));
  report.max_inverse_alignment_steps =
      std::max(nearest_distance(report.velocity_maxima, report.pressure_minima),
               nearest_distance(report.pressure_minima, report.velocity_maxima));
  return report;
}

std::vector<double> log_frequency_grid(double f_min, double f_max,
                                       int points_per_decade) {
  if (!(f_min > 0.0) || !(f_max > f_min) || points_per_decade < 1) {
    throw Error(ErrorKind::Domain, "invalid log-frequency grid bounds");
  }
  const double decades = std::log10(f_max / f_min);
  const auto n = static_cast<std::size_t>(
                     std::ceil(points_per_decade * decades - 1e-9)) + 1;
  std::vector<double> grid(std::max<std::size_t>(n, 2));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(grid.size() - 1);
    grid[i] = f_min * std::pow(f_max / f_min, t);
  }
  grid.front() = f_min;
  grid.back() = f_max;
  return grid;
}

SelfnoiseTable run_selfnoise_compare(const ProbeConfig& cfg,
                                     const SelfnoiseExperiment& exp) {
  const auto channels = velocity_channels(cfg);
  ChannelResponse two = channels.at(exp.channel - 1).response;
  ChannelResponse four = two;
  two.wire_mode = WireMode::TwoWire;
  four.wire_mode = WireMode::FourWire;

  SelfnoiseTable table;
  table.frequency = log_frequency_grid(exp.f_min, exp.f_max, exp.points_per_decade);
  for (double f : table.frequency) {
    const double a = selfnoise_density(two, f);
    const double b = selfnoise_density(four, f);
    table.two_wire.push_back(a);
    table.four_wire.push_back(b);
    table.ratio_db.push_back(20.0 * std::log10(a / b));
  }
  return table;
}

ProbeConfig with_channel_snr(const ProbeConfig& cfg, const FieldModel& field,
                             const Vec3& position, double sample_rate,
                             double snr_db) {
  const auto phasors = channel_phasors(cfg, field, position);
  const double noise_bandwidth = std::sqrt(sample_rate / 2.0);
  auto density = [&](Phasor p) {
    return std::abs(p) / std::sqrt(2.0) / std::pow(10.0, snr_db / 20.0) / noise_bandwidth;
  };
  ProbeConfig out = cfg;
  for (int chip = 0; chip < 2; ++chip) {
    for (int i = 0; i < 2; ++i) {
      out.chips[chip].channels[i].noise_density = density(phasors[2 * chip + i]);
    }
  }
  out.pressure_channel.inner_channel.noise_density =
      density(phasors[kPressureChannelIndex]);
  return out;
}

std::vector<double> apply_complex_gain(std::span<const double> signal,
                                       Phasor gain) {
  const std::size_t n = signal.size();
  if (n == 0) return {};
  const std::size_t bins = n / 2 + 1;
  std::vector<double> buffer(signal.begin(), signal.end());
  std::unique_ptr<fftw_complex, FftwFree> spectrum(fftw_alloc_complex(bins));
  const int len = static_cast<int>(n);

  PlanPtr forward(fftw_plan_dft_r2c_1d(len, buffer.data(), spectrum.get(), FFTW_ESTIMATE));
  fftw_execute(forward.get());

  auto* s = spectrum.get();
  s[0][0] = s[0][1] = 0.0;
  for (std::size_t k = 1; k < bins; ++k) {
    // The Nyquist bin of an even-length signal must stay real.
    const Phasor g = (n % 2 == 0 && k == n / 2) ? Phasor(gain.real(), 0.0) : gain;
    const Phasor v = Phasor(s[k][0], s[k][1]) * g;
    s[k][0] = v.real();
    s[k][1] = v.imag();
  }

  std::vector<double> out(n);
  PlanPtr inverse(fftw_plan_dft_c2r_1d(len, spectrum.get(), out.data(), FFTW_ESTIMATE));
  fftw_execute(inverse.get());
  for (auto& x : out) x /= static_cast<double>(n);
  return out;
}

IntensityReport run_intensity(const ProbeConfig& cfg,
                              const IntensityExperiment& exp,
                              const CalibrationProfile& profile) {
  const double f = frequency_of(exp.field);
  const ProbeConfig probe =
      exp.snr_db ? with_channel_snr(cfg, exp.field, exp.position, exp.sample_rate, *exp.snr_db)
                 : cfg;
  const TimeSeries ts = synthesize_timeseries(probe, exp.field, exp.sample_rate,
                                              exp.duration, exp.seed, exp.position);
  const std::size_t n = ts.length();

  IntensityReport report;
  report.frequency = f;
  report.seed = exp.seed;
  report.samples = n;

  const auto channels = velocity_channels(probe);
  Eigen::Matrix4Xd readings(4, static_cast<Eigen::Index>(n));
  for (int chip = 0; chip < 2; ++chip) {
    report.calibration[chip] = profile.chips[chip]
                                   ? *profile.chips[chip]
                                   : auto_calibrate_chip(probe, chip, f);
    std::array<std::vector<double>, 2> calibrated;
    for (int i = 0; i < 2; ++i) {
      const int c = 2 * chip + i;
      const double s = sensitivity_magnitude(channels[c].response, f);
      calibrated[i].resize(n);
      std::transform(ts.channels[c].begin(), ts.channels[c].end(),
                     calibrated[i].begin(), [s](double x) { return x / s; });
    }
    const auto mixed = apply_mixing<double>(report.calibration[chip].matrix,
                                            calibrated[0], calibrated[1]);
    for (std::size_t k = 0; k < n; ++k) {
      readings(2 * chip, static_cast<Eigen::Index>(k)) = mixed.first[k];
      readings(2 * chip + 1, static_cast<Eigen::Index>(k)) = mixed.second[k];
    }
  }
  const Eigen::Matrix3Xd velocity = solve_velocity_samples(nominal_axes_matrix(probe), readings);
  std::array<std::vector<double>, 3> v;
  for (int axis = 0; axis < 3; ++axis) {
    v[axis].resize(n);
    for (std::size_t k = 0; k < n; ++k) v[axis][k] = velocity(axis, static_cast<Eigen::Index>(k));
  }

  const Phasor transfer = pressure_channel_transfer(probe.pressure_channel, f, probe.medium);
  const auto pressure = apply_complex_gain(ts.channels[kPressureChannelIndex], 1.0 / transfer);

  report.active = block_intensity(pressure, {v[0], v[1], v[2]}, exp.sample_rate);
  report.magnitude = report.active.norm();
  if (report.magnitude > 0.0) report.level_db = intensity_level_db(report.magnitude);

  const FieldSample truth = sample_field(exp.field, probe.medium, exp.position);
  report.reference = phasor_intensity(truth.pressure, truth.velocity, f);
  return report;
}

}  // namespace puprobe::bench
