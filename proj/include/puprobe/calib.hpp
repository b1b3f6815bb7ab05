#pragma once

// Directivity correction by mixing a chip's two orthogonal channels, offset
// estimation from magnitude polar scans, and the 4-channel to 3D velocity
// least-squares reconstruction.

#include "puprobe/error.hpp"
#include "puprobe/field.hpp"
#include "puprobe/probe.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace puprobe {

struct MixingMatrix {
  double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;

  double determinant() const { return m11 * m22 - m12 * m21; }
  MixingMatrix operator*(const MixingMatrix& rhs) const;
  std::array<double, 4> row_major() const { return {m11, m12, m21, m22}; }
};

struct PolarScan {
  double frequency = 0.0;
  std::vector<double> angles_deg;
  /// magnitudes[channel][angle index]
  std::vector<std::vector<double>> magnitudes;

  std::size_t size() const { return angles_deg.size(); }
  /// Uniform step; throws if the grid is empty, non-uniform or out of range.
  double step_deg() const;
  /// Also requires the grid to close a full turn and magnitudes to be valid.
  void validate() const;
};

/// Uniform angle grid [0, 360) with `step_deg` spacing.
std::vector<double> angle_grid(double step_deg);

struct AxisOffsetEstimate {
  double offset_deg = 0.0;  // wrapped to (-90, 90]
  double axis_deg = 0.0;    // fitted lobe direction, [0, 180)
  double amplitude = 0.0;
  double residual = 0.0;    // RMS fit error / amplitude
};

struct OffsetFitOptions {
  double max_residual = 0.05;
};

/// Wraps an angle to (-90, 90].
double wrap_half_turn(double deg);

AxisOffsetEstimate estimate_axis_offset(const PolarScan& scan,
                                        std::size_t channel,
                                        double nominal_axis_deg,
                                        const OffsetFitOptions& options = {});

/// Normalised: rotation [[cos, -sin], [sin, cos]]. Unnormalised: the same
/// divided by cos(offset), i.e. row 1 = (1, -tan).
MixingMatrix correction_matrix(double offset_deg, bool normalize = true);

template <typename T>
std::pair<std::vector<T>, std::vector<T>> apply_mixing(const MixingMatrix& m,
                                                       std::span<const T> ch1,
                                                       std::span<const T> ch2) {
  if (ch1.size() != ch2.size()) {
    throw Error(ErrorKind::Shape, "mixing inputs differ in length");
  }
  std::pair<std::vector<T>, std::vector<T>> out;
  out.first.resize(ch1.size());
  out.second.resize(ch1.size());
  for (std::size_t i = 0; i < ch1.size(); ++i) {
    out.first[i] = m.m11 * ch1[i] + m.m12 * ch2[i];
    out.second[i] = m.m21 * ch1[i] + m.m22 * ch2[i];
  }
  return out;
}

inline std::pair<Phasor, Phasor> apply_mixing(const MixingMatrix& m, Phasor ch1,
                                              Phasor ch2) {
  return {m.m11 * ch1 + m.m12 * ch2, m.m21 * ch1 + m.m22 * ch2};
}

using VelocityReadings = Eigen::Matrix<std::complex<double>, 4, 1>;

/// Least-squares v with axes * v ~= readings, real and imaginary parts solved
/// independently.
PhasorVec3 solve_velocity(const AxesMatrix& axes, const VelocityReadings& readings);

/// Real-valued variant for time samples: one column per sample.
Eigen::Matrix3Xd solve_velocity_samples(const AxesMatrix& axes,
                                const Eigen::Matrix4Xd& readings);

}  // namespace puprobe
