#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "puprobe/error.hpp"
#include "puprobe/probe.hpp"

#include <cmath>
#include <Eigen/Geometry>

#include <random>

using namespace puprobe;

namespace {

ProbeConfig zero_offset_probe() {
  ProbeConfig cfg = ProbeConfig::make_default();
  for (auto& chip : cfg.chips) chip.axis_offset_deg = 0.0;
  return cfg;
}

ChannelResponse response(WireMode mode, double gain = 2.0) {
  ChannelResponse r;
  r.s0 = 10e-3;
  r.wire_mode = mode;
  r.four_wire_gain = gain;
  return r;
}

oracle::Rows4 rows_of(const AxesMatrix& m) {
  oracle::Rows4 rows{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 3; ++c) rows[r][c] = m(r, c);
  return rows;
}

}  // namespace

TEST_CASE("sensitivity plateau, corner and four-wire gain") {
  ChannelResponse r = response(WireMode::TwoWire);
  r.corner_f1 = 500.0;
  r.corner_f2 = 500.0 * 1000.0;
  CHECK(sensitivity_magnitude(r, r.corner_f1 / 1000.0) == doctest::Approx(10e-3).epsilon(1e-3));
  CHECK(sensitivity_magnitude(r, r.corner_f1) == doctest::Approx(10e-3 / std::sqrt(2.0)).epsilon(1e-3));

  const ChannelResponse two = response(WireMode::TwoWire, 2.0);
  const ChannelResponse four = response(WireMode::FourWire, 2.0);
  for (double f : {10.0, 700.0, 9000.0}) {
    CHECK(sensitivity_magnitude(four, f) == 2.0 * sensitivity_magnitude(two, f));
  }
  CHECK_THROWS_AS(sensitivity_magnitude(two, 0.0), Error);
  CHECK_THROWS_AS(sensitivity_magnitude(two, -5.0), Error);
}

TEST_CASE("sensitivity is strictly decreasing") {
  const ChannelResponse r;
  double prev = sensitivity_magnitude(r, 1.0);
  for (double f = 2.0; f < 50000.0; f *= 1.1) {
    const double s = sensitivity_magnitude(r, f);
    CHECK(s < prev);
    prev = s;
  }
}

TEST_CASE("velocity channel output follows the projection") {
  VelocityChannel ch{Vec3::UnitX(), response(WireMode::TwoWire)};
  ch.response.corner_f1 = 1e9;  // flat at the test frequency
  ch.response.corner_f2 = 1e9;
  FieldSample s;
  s.frequency = 100.0;
  s.velocity = PhasorVec3(1e-3, 0.0, 0.0);
  CHECK(std::abs(velocity_channel_output(ch, s)) == doctest::Approx(1e-5).epsilon(1e-9));

  s.velocity = PhasorVec3(0.0, 1e-3, 0.0);
  CHECK(std::abs(velocity_channel_output(ch, s)) == 0.0);

  const double a = deg_to_rad(60.0);
  s.velocity = PhasorVec3(1e-3 * std::cos(a), 1e-3 * std::sin(a), 0.0);
  CHECK(std::abs(velocity_channel_output(ch, s)) == doctest::Approx(0.5e-5).epsilon(1e-12));
}

TEST_CASE("directivity is a pure cosine law") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 axis = Vec3(g(rng), g(rng), g(rng)).normalized();
    const Vec3 d = Vec3(g(rng), g(rng), g(rng)).normalized();
    VelocityChannel ch{axis, ChannelResponse{}};
    FieldSample on, off;
    on.frequency = off.frequency = 800.0;
    on.velocity = axis.cast<Phasor>() * Phasor(0.3, -0.4);
    off.velocity = d.cast<Phasor>() * Phasor(0.3, -0.4);
    const double expected = std::abs(velocity_channel_output(ch, on)) * std::abs(d.dot(axis));
    CHECK(std::abs(std::abs(velocity_channel_output(ch, off)) - expected) <= 1e-12 * std::abs(velocity_channel_output(ch, on)));
  }
}

TEST_CASE("back chamber limits") {
  const Medium air;
  PressureChannel pc;
  const double rc = pc.back_chamber.acoustic_resistance * pc.back_chamber.compliance(air);
  const Phasor p(0.6, -0.8);  // |p| = 1
  auto internal_velocity = [&](double omega_rc) {
    const double f = omega_rc / (2.0 * kPi * rc);
    return pressure_channel_output(pc, p, f, air) / sensitivity_magnitude(pc.inner_channel, f);
  };
  const double r = pc.back_chamber.acoustic_resistance;
  CHECK(std::abs(internal_velocity(1000.0)) == doctest::Approx(1.0 / r).epsilon(2e-3));
  CHECK(std::abs(std::abs(internal_velocity(1.0)) * r * std::sqrt(2.0) - 1.0) < 1e-9);
  CHECK(pressure_channel_output(pc, Phasor(0.0, 0.0), 300.0, air) == Phasor(0.0, 0.0));
  CHECK_THROWS_AS(pressure_channel_output(pc, p, 0.0, air), Error);
}

TEST_CASE("selfnoise examples") {
  ChannelResponse r = response(WireMode::TwoWire);
  r.noise_density = 10e-9;
  r.corner_f1 = r.corner_f2 = 1e12;
  CHECK(selfnoise_density(r, 1.0) == doctest::Approx(1e-6).epsilon(1e-9));
  r.noise_density = 0.0;
  CHECK(selfnoise_density(r, 1.0) == 0.0);

  ChannelResponse two = response(WireMode::TwoWire, 2.0);
  ChannelResponse four = response(WireMode::FourWire, 2.0);
  for (double f : {20.0, 1000.0, 10000.0}) {
    CHECK(selfnoise_density(four, f) == doctest::Approx(0.5 * selfnoise_density(two, f)).epsilon(1e-15));
  }
}

TEST_CASE("selfnoise is increasing and four-wire dominates") {
  for (double gain : {1.0, 1.2, 1.5, 3.0}) {
    ChannelResponse two = response(WireMode::TwoWire, gain);
    ChannelResponse four = response(WireMode::FourWire, gain);
    double prev = 0.0;
    for (double f = 10.0; f < 20000.0; f *= 1.07) {
      const double a = selfnoise_density(two, f);
      const double b = selfnoise_density(four, f);
      CHECK(a > prev);
      prev = a;
      if (gain == 1.0) {
        CHECK(a == b);
      } else {
        CHECK(b < a);
      }
    }
  }
}

TEST_CASE("default axes with zero offsets") {
  const AxesMatrix axes = probe_axes_matrix(zero_offset_probe());
  const double h = 1.0 / std::sqrt(2.0);
  AxesMatrix expected;
  expected << h, h, 0, -h, h, 0, h, 0, h, -h, 0, h;
  CHECK((axes - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(oracle::spans_3d(rows_of(axes)));
}

TEST_CASE("coplanar chips are degenerate") {
  ProbeConfig cfg = ProbeConfig::make_default();
  cfg.chips[1] = cfg.chips[0];
  CHECK_FALSE(oracle::spans_3d(rows_of([&] {
    AxesMatrix m;
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < 2; ++i) m.row(2 * c + i) = cfg.chips[c].channel_axis(i);
    return m;
  }())));
  try {
    probe_axes_matrix(cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateGeometry);
  }
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("axis offset rotates a chip's rows within its plane") {
  const AxesMatrix base = probe_axes_matrix(zero_offset_probe());
  ProbeConfig cfg = zero_offset_probe();
  cfg.chips[0].axis_offset_deg = 15.0;
  const AxesMatrix shifted = probe_axes_matrix(cfg);
  for (int r = 0; r < 2; ++r) {
    CHECK(shifted.row(r).norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(shifted(r, 2) == 0.0);
    CHECK(rad_to_deg(std::acos(shifted.row(r).dot(base.row(r)))) == doctest::Approx(15.0).epsilon(1e-9));
    // counter-clockwise about +z
    CHECK(base.row(r).cross(shifted.row(r)).z() > 0.0);
  }
  CHECK((shifted.bottomRows(2) - base.bottomRows(2)).norm() == 0.0);
}

TEST_CASE("chip axes stay orthogonal and in-plane sweeps keep constant power") {
  const ProbeConfig cfg = ProbeConfig::make_default();
  for (const auto& chip : cfg.chips) {
    CHECK(std::abs(chip.channel_axis(0).dot(chip.channel_axis(1))) < 1e-9);
    double reference = -1.0;
    for (double theta = 0.0; theta < 360.0; theta += 1.0) {
      FieldSample s;
      s.frequency = 600.0;
      s.velocity = chip.in_plane_direction(theta).cast<Phasor>();
      const double a = std::abs(velocity_channel_output({chip.channel_axis(0), chip.channels[0]}, s));
      const double b = std::abs(velocity_channel_output({chip.channel_axis(1), chip.channels[1]}, s));
      const double power = a * a + b * b;
      if (reference < 0) reference = power;
      CHECK(std::abs(power / reference - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("pressure channel ignores chip orientation") {
  ProbeConfig a = ProbeConfig::make_default();
  ProbeConfig b = a;
  b.chips[0].orientation = plane_orientation("yz");
  b.chips[1].orientation = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  for (double f : {50.0, 700.0, 4000.0}) {
    CHECK(pressure_channel_output(a.pressure_channel, Phasor(1.0, 0.5), f, a.medium) ==
          pressure_channel_output(b.pressure_channel, Phasor(1.0, 0.5), f, b.medium));
  }
}

TEST_CASE("wire quad geometry") {
  WireQuad q;
  CHECK_NOTHROW(q.validate());
  q.diagonal_spacing = 300e-6;
  CHECK_THROWS_AS(q.validate(), Error);
  q = WireQuad{};
  q.wire_height = 0.0;
  CHECK_THROWS_AS(q.validate(), Error);
}

TEST_CASE("synthesized sinusoid RMS") {
  ProbeConfig cfg = ProbeConfig::make_default();
  for (auto& chip : cfg.chips)
    for (auto& ch : chip.channels) ch.noise_density = 0.0;
  cfg.pressure_channel.inner_channel.noise_density = 0.0;
  const Vec3 axis = cfg.chips[0].channel_axis(0);
  const FieldModel wave = PlaneWave{axis, 1.0, 600.0};
  const auto ts = synthesize_timeseries(cfg, wave, 48000.0, 0.5, 1);
  const auto phasors = channel_phasors(cfg, wave, Vec3::Zero());
  CHECK(ts.length() == 24000);
  for (int c = 0; c < kChannelCount; ++c) {
    const double expected = std::abs(phasors[c]) / std::sqrt(2.0);
    if (expected == 0.0) continue;
    CHECK(std::abs(oracle::rms(ts.channels[c]) / expected - 1.0) < 1e-6);
  }
}

TEST_CASE("synthesized white noise RMS") {
  ProbeConfig cfg = ProbeConfig::make_default();
  const FieldModel silent = PlaneWave{Vec3::UnitX(), 0.0, 600.0};
  const auto ts = synthesize_timeseries(cfg, silent, 10000.0, 10.0, 42);
  // 1e-8 * sqrt(5000)
  for (int c = 0; c < kVelocityChannels; ++c) {
    CHECK(oracle::rms(ts.channels[c]) == doctest::Approx(7.0710678118654757e-7).epsilon(0.05));
  }
}

TEST_CASE("synthesis is deterministic per seed") {
  const ProbeConfig cfg = ProbeConfig::make_default();
  const FieldModel wave = PlaneWave{Vec3(0, 0.6, 0.8), 1.0, 900.0};
  const auto a = synthesize_timeseries(cfg, wave, 8000.0, 0.25, 99);
  const auto b = synthesize_timeseries(cfg, wave, 8000.0, 0.25, 99);
  const auto c = synthesize_timeseries(cfg, wave, 8000.0, 0.25, 100);
  for (int ch = 0; ch < kChannelCount; ++ch) CHECK(a.channels[ch] == b.channels[ch]);
  CHECK(a.channels[0] != c.channels[0]);
  // channels carry independent noise
  CHECK(a.channels[0] != a.channels[1]);
}

TEST_CASE("synthesis enforces Nyquist") {
  const ProbeConfig cfg = ProbeConfig::make_default();
  try {
    synthesize_timeseries(cfg, PlaneWave{Vec3::UnitX(), 1.0, 5000.0}, 10000.0, 1.0, 0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Sampling);
  }
  CHECK_THROWS_AS(synthesize_timeseries(cfg, PlaneWave{}, 48000.0, 0.0, 0), Error);
}
