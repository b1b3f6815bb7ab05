#include "puprobe/calib.hpp"

#include <Eigen/QR>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace puprobe {
namespace {

constexpr double kGridTolerance = 1e-9;
constexpr double kCoarseStepDeg = 0.25;

// Profiled least-squares cost of fitting g*|cos(theta - a)|, with the best
// scale g eliminated in closed form.
struct LobeFit {
  std::span<const double> angles_deg;
  std::span<const double> magnitudes;

  struct Terms {
    double cross = 0.0;  // sum m*c
    double basis = 0.0;  // sum c^2
    double signal = 0.0; // sum m^2
  };

  Terms terms(double axis_deg) const {
    Terms t;
    for (std::size_t i = 0; i < angles_deg.size(); ++i) {
      const double c = std::abs(std::cos(deg_to_rad(angles_deg[i] - axis_deg)));
      t.cross += magnitudes[i] * c;
      t.basis += c * c;
      t.signal += magnitudes[i] * magnitudes[i];
    }
    return t;
  }

  double cost(double axis_deg) const {
    const Terms t = terms(axis_deg);
    return t.signal - t.cross * t.cross / t.basis;
  }
};

}  // namespace

MixingMatrix MixingMatrix::operator*(const MixingMatrix& rhs) const {
  return {m11 * rhs.m11 + m12 * rhs.m21, m11 * rhs.m12 + m12 * rhs.m22,
          m21 * rhs.m11 + m22 * rhs.m21, m21 * rhs.m12 + m22 * rhs.m22};
}

double PolarScan::step_deg() const {
  if (angles_deg.size() < 2) {
    throw Error(ErrorKind::Shape, "polar scan needs at least two angles");
  }
  const double step = angles_deg[1] - angles_deg[0];
  if (!(step > 0.0)) {
    throw Error(ErrorKind::Shape, "polar scan angles must ascend");
  }
  for (std::size_t i = 1; i < angles_deg.size(); ++i) {
    if (std::abs(angles_deg[i] - angles_deg[i - 1] - step) > kGridTolerance) {
      throw Error(ErrorKind::Shape, "polar scan angle step is not uniform");
    }
  }
  if (angles_deg.front() < 0.0 || angles_deg.back() >= 360.0) {
    throw Error(ErrorKind::Shape, "polar scan angles must lie in [0, 360)");
  }
  return step;
}

void PolarScan::validate() const {
  const double step = step_deg();
  if (std::abs(step * static_cast<double>(size()) - 360.0) > kGridTolerance) {
    throw Error(ErrorKind::Shape, "polar scan does not cover a full turn");
  }
  for (const auto& channel : magnitudes) {
    if (channel.size() != size()) {
      throw Error(ErrorKind::Shape, "magnitude list length differs from angles");
    }
    for (double m : channel) {
      if (!(m >= 0.0) || !std::isfinite(m)) {
        throw Error(ErrorKind::Shape, "magnitudes must be finite and >= 0");
      }
    }
  }
}

std::vector<double> angle_grid(double step_deg) {
  if (!(step_deg > 0.0) || !std::isfinite(step_deg)) {
    throw Error(ErrorKind::Domain, "angle step must be > 0");
  }
  const double count = std::round(360.0 / step_deg);
  if (count < 2 || std::abs(count * step_deg - 360.0) > kGridTolerance) {
    throw Error(ErrorKind::Domain, "angle step must divide 360");
  }
  std::vector<double> angles(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < angles.size(); ++i) {
    angles[i] = static_cast<double>(i) * step_deg;
  }
  return angles;
}

double wrap_half_turn(double deg) {
  double r = std::fmod(deg, 180.0);
  if (r <= -90.0) r += 180.0;
  if (r > 90.0) r -= 180.0;
  return r;
}

AxisOffsetEstimate estimate_axis_offset(const PolarScan& scan,
                                        std::size_t channel,
                                        double nominal_axis_deg,
                                        const OffsetFitOptions& options) {
  scan.validate();
  if (channel >= scan.magnitudes.size()) {
    throw Error(ErrorKind::Shape, "polar scan has no such channel");
  }
  const auto& mags = scan.magnitudes[channel];
  // Strict comparison keeps the lowest angle on ties.
  std::size_t peak = 0;
  for (std::size_t i = 1; i < mags.size(); ++i) {
    if (mags[i] > mags[peak]) peak = i;
  }
  if (mags[peak] == 0.0) {
    throw Error(ErrorKind::NoSignal, "polar scan channel is all zero");
  }

  const LobeFit fit{scan.angles_deg, mags};
  const double start = scan.angles_deg[peak];

  // Coarse scan over one full lobe period centred on the peak sample, then
  // Brent refinement around the best coarse point.
  double best = start;
  double best_cost = fit.cost(start);
  const int half_span = static_cast<int>(std::round(90.0 / kCoarseStepDeg));
  for (int i = -half_span; i < half_span; ++i) {
    const double a = start + i * kCoarseStepDeg;
    const double c = fit.cost(a);
    if (c < best_cost) {
      best_cost = c;
      best = a;
    }
  }
  const auto [axis, cost] = boost::math::tools::brent_find_minima(
      [&](double a) { return fit.cost(a); }, best - kCoarseStepDeg,
      best + kCoarseStepDeg, 40);
  const double refined = cost < best_cost ? axis : best;

  const auto t = fit.terms(refined);
  AxisOffsetEstimate est;
  est.amplitude = t.cross / t.basis;
  if (!(est.amplitude > 0.0)) {
    throw Error(ErrorKind::NoSignal, "fitted lobe amplitude is zero");
  }
  const double sse = std::max(0.0, t.signal - t.cross * t.cross / t.basis);
  est.residual =
      std::sqrt(sse / static_cast<double>(mags.size())) / est.amplitude;
  double lobe = std::fmod(refined, 180.0);
  if (lobe < 0.0) lobe += 180.0;
  est.axis_deg = lobe;
  est.offset_deg = wrap_half_turn(refined - nominal_axis_deg);
  if (est.residual > options.max_residual) {
    throw Error(ErrorKind::BadFit, "cosine-lobe fit residual " +
                                       std::to_string(est.residual) +
                                       " exceeds threshold");
  }
  return est;
}

MixingMatrix correction_matrix(double offset_deg, bool normalize) {
  if (!std::isfinite(offset_deg)) {
    throw Error(ErrorKind::Domain, "offset must be finite");
  }
  const double d = deg_to_rad(offset_deg);
  const double c = std::cos(d);
  const double s = std::sin(d);
  if (normalize) return {c, -s, s, c};
  if (std::abs(c) < 1e-12) {
    throw Error(ErrorKind::SingularMixing,
                "unnormalised correction is singular at +/-90 degrees");
  }
  const double t = s / c;
  return {1.0, -t, t, 1.0};
}

Eigen::Matrix3Xd solve_velocity_samples(const AxesMatrix& axes,
                                const Eigen::Matrix4Xd& readings) {
  if (!spans_three_dimensions(axes)) {
    throw Error(ErrorKind::DegenerateGeometry, "axes matrix is rank deficient");
  }
  return axes.colPivHouseholderQr().solve(readings);
}

PhasorVec3 solve_velocity(const AxesMatrix& axes,
                          const VelocityReadings& readings) {
  Eigen::Matrix<double, 4, 2> parts;
  parts.col(0) = readings.real();
  parts.col(1) = readings.imag();
  const Eigen::Matrix3Xd v = solve_velocity_samples(axes, Eigen::Matrix4Xd(parts));
  PhasorVec3 out;
  for (int i = 0; i < 3; ++i) out(i) = Phasor(v(i, 0), v(i, 1));
  return out;
}

}  // namespace puprobe
