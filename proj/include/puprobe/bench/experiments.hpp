#pragma once

// Virtual measurements: turntable polar scans of a chip's velocity pair and of
// the pressure channel, standing-wave tube sweeps, the two-wire/four-wire
// selfnoise comparison, and an end-to-end intensity run on synthesized
// signals.

#include "puprobe/bench/config.hpp"
#include "puprobe/calib.hpp"
#include "puprobe/intensity.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace puprobe::bench {

/// Lowest grid angle whose magnitude is within 1e-12 (relative) of the peak.
double grid_argmax_deg(const std::vector<double>& angles_deg,
                       const std::vector<double>& magnitudes);

/// Output phasors of chip `chip` (0 or 1) for a plane wave arriving from
/// in-plane angle `theta_deg` about the chip's wire axis.
std::array<Phasor, 2> turntable_outputs(const ProbeConfig& cfg, int chip,
                                        double theta_deg, double frequency,
                                        double amplitude);

struct PolarScanReport {
  int chip = 0;  // 0-based
  PolarScan uncorrected;
  std::array<double, 2> argmax_deg{};
  std::optional<PolarScan> corrected;
  std::optional<std::array<double, 2>> corrected_argmax_deg;
  /// Auto mode: fits of both uncorrected channels against 45/135-style nominals.
  std::optional<std::array<AxisOffsetEstimate, 2>> estimates;
  std::optional<ChipCalibration> calibration;
  /// Re-estimated offset of the corrected scan (largest of both channels).
  std::optional<double> residual_offset_deg;
};

PolarScanReport run_polar_scan(const ProbeConfig& cfg,
                               const PolarScanExperiment& exp);

/// Calibrates one chip by a virtual polar scan at `frequency`.
ChipCalibration auto_calibrate_chip(const ProbeConfig& cfg, int chip,
                                    double frequency, double step_deg = 3.75);

struct PressurePolarReport {
  PolarScan scan;  // one channel: pressure
  double max_min_ratio_db = 0.0;
};

PressurePolarReport run_pressure_polar(const ProbeConfig& cfg,
                                       const PressurePolarExperiment& exp);

struct TubeSweepReport {
  SweepMode mode = SweepMode::Position;
  std::vector<double> sweep_values;
  std::vector<double> pressure_mag;   // V
  std::vector<double> velocity_mag;   // V
  std::vector<double> axial_active;   // W/m^2, from the field phasors
  std::vector<std::size_t> pressure_maxima, pressure_minima;
  std::vector<std::size_t> velocity_maxima, velocity_minima;
  /// Largest grid distance between a pressure maximum and the nearest
  /// velocity minimum, and vice versa.
  double max_alignment_steps = 0.0;
  /// Same for velocity maxima against pressure minima.
  double max_inverse_alignment_steps = 0.0;
  /// max |axial active| / (max|p| * max|v|) over the sweep.
  double max_active_ratio = 0.0;
};

TubeSweepReport run_tube_sweep(const ProbeConfig& cfg,
                               const TubeSweepExperiment& exp);

/// Indices of local maxima (or minima) of a sampled curve; endpoints count.
std::vector<std::size_t> local_extrema(const std::vector<double>& values,
                                       bool maxima);

struct SelfnoiseTable {
  std::vector<double> frequency;
  std::vector<double> two_wire;   // (m/s)/sqrt(Hz)
  std::vector<double> four_wire;  // (m/s)/sqrt(Hz)
  std::vector<double> ratio_db;   // 20 log10(two_wire / four_wire)
};

std::vector<double> log_frequency_grid(double f_min, double f_max,
                                       int points_per_decade);

SelfnoiseTable run_selfnoise_compare(const ProbeConfig& cfg,
                                     const SelfnoiseExperiment& exp);

struct IntensityReport {
  double frequency = 0.0;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  Vec3 active = Vec3::Zero();  // block estimate, W/m^2
  double magnitude = 0.0;
  std::optional<double> level_db;
  IntensityResult reference;   // phasor ground truth at the probe position
  std::array<ChipCalibration, 2> calibration;
};

/// Sets every channel's noise density so its own signal RMS over the
/// synthesized band sits `snr_db` above the noise RMS.
ProbeConfig with_channel_snr(const ProbeConfig& cfg, const FieldModel& field,
                             const Vec3& position, double sample_rate,
                             double snr_db);

IntensityReport run_intensity(const ProbeConfig& cfg,
                              const IntensityExperiment& exp,
                              const CalibrationProfile& profile = {});

/// Applies one complex gain to every positive-frequency bin of a real signal
/// (a constant phase shift plus scaling); DC is removed.
std::vector<double> apply_complex_gain(std::span<const double> signal,
                                       Phasor gain);

}  // namespace puprobe::bench
