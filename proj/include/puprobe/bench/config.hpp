#pragma once

// Experiment configuration: a JSON document holding the probe description,
// one experiment block and an optional calibration profile. Parsing is
// strict: unknown keys are rejected and every validation failure names the
// offending field by its dotted path.

#include "puprobe/calib.hpp"
#include "puprobe/field.hpp"
#include "puprobe/probe.hpp"

#include "json.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>

namespace puprobe::bench {

enum class CorrectionMode { None, Auto, Fixed };

struct Correction {
  CorrectionMode mode = CorrectionMode::None;
  double fixed_offset_deg = 0.0;  // used when mode == Fixed
};

struct PolarScanExperiment {
  double frequency = 600.0;
  double step_deg = 3.75;
  int channel = 1;  // 1-based velocity channel; selects its chip
  Correction correction;
  double amplitude = 1.0;
};

struct PressurePolarExperiment {
  double frequency = 700.0;
  double step_deg = 3.75;
  double amplitude = 1.0;
};

enum class SweepMode { Frequency, Position };

struct TubeSweepExperiment {
  SweepMode mode = SweepMode::Position;
  // Position sweep: distance from the rigid end at a fixed frequency.
  double x_min = 0.0;
  double x_max = 0.5;
  double frequency = 700.0;
  // Frequency sweep: fixed distance from the rigid end.
  double f_min = 100.0;
  double f_max = 2000.0;
  double position = 0.1;

  int points = 501;
  Vec3 axis = Vec3::UnitX();
  double rigid_end_position = 0.0;
  double amplitude = 1.0;
  int velocity_channel = 1;
};

struct SelfnoiseExperiment {
  double f_min = 20.0;
  double f_max = 10000.0;
  int points_per_decade = 20;
  int channel = 1;
};

struct IntensityExperiment {
  FieldModel field = PlaneWave{};
  double sample_rate = 48000.0;
  double duration = 1.0;
  std::uint64_t seed = 0;
  std::optional<double> snr_db;
  Vec3 position = Vec3::Zero();
};

using Experiment = std::variant<PolarScanExperiment, PressurePolarExperiment,
                                TubeSweepExperiment, SelfnoiseExperiment,
                                IntensityExperiment>;

/// Stable experiment name as used in the config "type" key.
std::string experiment_type(const Experiment& e);

struct ChipCalibration {
  double offset_deg = 0.0;
  MixingMatrix matrix;
};

struct CalibrationProfile {
  std::array<std::optional<ChipCalibration>, 2> chips;
};

struct ExperimentConfig {
  ProbeConfig probe = ProbeConfig::make_default();
  Experiment experiment = PolarScanExperiment{};
  bool experiment_given = false;
  CalibrationProfile profile;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Experiment block with defaults for a given type name; throws Config for an
/// unknown name.
Experiment default_experiment(const std::string& type);

nlohmann::json profile_to_json(const CalibrationProfile& profile);

}  // namespace puprobe::bench
