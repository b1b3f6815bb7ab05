#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include <Eigen/Geometry>

#include "puprobe/error.hpp"
#include "puprobe/field.hpp"
#include "puprobe/intensity.hpp"

#include <cmath>
#include <random>

using namespace puprobe;

namespace {

const Medium kAir{1.21, 343.0};

struct Block {
  std::vector<double> p;
  std::array<std::vector<double>, 3> v;

  std::array<std::span<const double>, 3> views() const { return {v[0], v[1], v[2]}; }
};

// Samples Re(P e^{jwt}) and Re(V_i e^{jwt}) over whole periods.
Block sampled(Phasor p, const PhasorVec3& v, double f, double fs, int periods) {
  const auto n = static_cast<std::size_t>(std::llround(periods * fs / f));
  Block b;
  b.p.resize(n);
  for (auto& axis : b.v) axis.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Phasor carrier = std::exp(Phasor(0.0, 2.0 * kPi * f * static_cast<double>(k) / fs));
    b.p[k] = (p * carrier).real();
    for (int i = 0; i < 3; ++i) b.v[i][k] = (v(i) * carrier).real();
  }
  return b;
}

}  // namespace

TEST_CASE("plane wave phasor intensity") {
  const auto s = sample_plane_wave(PlaneWave{Vec3::UnitX(), 1.0, 600.0}, kAir, Vec3(0.2, 0.1, 0));
  const auto r = phasor_intensity(s.pressure, s.velocity, s.frequency);
  // 1 / (2 * 415.03)
  CHECK(r.active.norm() == doctest::Approx(1.2047321880346e-3).epsilon(1e-12));
  CHECK(r.reactive.norm() < 1e-18);
  CHECK(r.frequency == 600.0);
}

TEST_CASE("standing wave is purely reactive") {
  StandingWaveTube tube{Vec3::UnitX(), 0.0, 1.0, 700.0};
  for (double x = 0.01; x < 0.49; x += 0.0137) {
    const auto s = sample_standing_wave(tube, kAir, Vec3(x, 0, 0));
    const auto r = phasor_intensity(s.pressure, s.velocity);
    CHECK(r.active.norm() <= 1e-12 * r.reactive.norm());
    CHECK(r.reactive.norm() > 0.0);
  }
}

TEST_CASE("zero velocity gives zero intensity") {
  const auto r = phasor_intensity(Phasor(3.0, 1.0), PhasorVec3::Zero());
  CHECK(r.active.norm() == 0.0);
  CHECK(r.reactive.norm() == 0.0);
}

TEST_CASE("plane wave intensity points along propagation") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (int i = 0; i < 100; ++i) {
    const Vec3 d = Vec3(g(rng), g(rng), g(rng)).normalized();
    const double amp = 0.1 + std::abs(g(rng));
    const auto s = sample_plane_wave(PlaneWave{d, amp, 1000.0}, kAir, Vec3(g(rng), g(rng), g(rng)));
    const auto r = phasor_intensity(s.pressure, s.velocity);
    const double angle = std::atan2(r.active.cross(d).norm(), r.active.dot(d));
    CHECK(angle < 1e-9);
    const double expected = amp * amp / (2.0 * kAir.characteristic_impedance());
    CHECK(std::abs(r.active.norm() / expected - 1.0) < 1e-12);
  }
}

TEST_CASE("block estimate of in-phase sinusoids") {
  const double rc = kAir.characteristic_impedance();
  for (int periods = 1; periods <= 12; ++periods) {
    const Block b = sampled(1.0, PhasorVec3(1.0 / rc, 0.0, 0.0), 600.0, 48000.0, periods);
    const Vec3 est = block_intensity(b.p, b.views(), 48000.0);
    CHECK(std::abs(est(0) / (0.5 / rc) - 1.0) < 1e-9);
    CHECK(std::abs(est(0) - oracle::mean_product(b.p, b.v[0])) < 1e-18);
  }
}

TEST_CASE("block estimate of quadrature sinusoids vanishes") {
  const Block b = sampled(1.0, PhasorVec3(Phasor(0.0, -1.0), 0.0, 0.0), 600.0, 48000.0, 7);
  const Vec3 est = block_intensity(b.p, b.views(), 48000.0);
  CHECK(std::abs(est(0)) < 1e-9 * 0.5);
}

TEST_CASE("block estimate matches the phasor form for arbitrary phases") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int i = 0; i < 20; ++i) {
    const Phasor p(g(rng), g(rng));
    const PhasorVec3 v(Phasor(g(rng), g(rng)), Phasor(g(rng), g(rng)), Phasor(g(rng), g(rng)));
    const Block b = sampled(p, v, 750.0, 48000.0, 3);
    const Vec3 est = block_intensity(b.p, b.views(), 48000.0);
    const auto exact = phasor_intensity(p, v);
    CHECK((est - exact.active).norm() < 1e-9 * std::abs(p) * v.norm());
  }
}

TEST_CASE("block estimate edge cases") {
  const std::vector<double> zeros(100, 0.0);
  CHECK(block_intensity(zeros, {zeros, zeros, zeros}, 1000.0).norm() == 0.0);
  const std::vector<double> shorter(99, 0.0);
  try {
    block_intensity(zeros, {zeros, shorter, zeros}, 1000.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Shape);
  }
  const std::vector<double> one(1, 1.0);
  CHECK_THROWS_AS(block_intensity(one, {one, one, one}, 1000.0), Error);
}

TEST_CASE("block estimate under 20 dB SNR noise") {
  const double rc = kAir.characteristic_impedance();
  const double fs = 48000.0;
  const Block clean = sampled(1.0, PhasorVec3(1.0 / rc, 0.0, 0.0), 1000.0, fs, 1000);
  const double noiseless = block_intensity(clean.p, clean.views(), fs).norm();
  const double p_sigma = 0.1 * oracle::rms(clean.p);
  const double v_sigma = 0.1 * oracle::rms(clean.v[0]);
  int within = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Block noisy = clean;
    for (double& x : noisy.p) x += p_sigma * g(rng);
    for (auto& axis : noisy.v)
      for (double& x : axis) x += v_sigma * g(rng);
    const double est = block_intensity(noisy.p, noisy.views(), fs).norm();
    if (std::abs(est / noiseless - 1.0) < 0.05) ++within;
  }
  CHECK(within >= 95);
}

TEST_CASE("intensity scales linearly with pressure") {
  const Phasor p(0.3, -0.2);
  const PhasorVec3 v(Phasor(1e-3, 2e-4), Phasor(-5e-4, 0.0), Phasor(2e-3, -1e-3));
  const auto base = phasor_intensity(p, v);
  for (double a : {0.5, 2.0, 10.0}) {
    const auto scaled = phasor_intensity(a * p, v);
    CHECK((scaled.active - a * base.active).norm() < 1e-15);
    CHECK((scaled.reactive - a * base.reactive).norm() < 1e-15);
    Eigen::Index i0, i1;
    base.active.cwiseAbs().maxCoeff(&i0);
    phasor_intensity(a * p, a * v).active.cwiseAbs().maxCoeff(&i1);
    CHECK(i0 == i1);
  }
}

TEST_CASE("intensity level") {
  CHECK(intensity_level_db(1e-12) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(intensity_level_db(1.0) == doctest::Approx(120.0).epsilon(1e-12));
  CHECK(intensity_level_db(1.2048e-3) == doctest::Approx(90.81).epsilon(1e-4));
  CHECK_THROWS_AS(intensity_level_db(0.0), Error);
  CHECK_THROWS_AS(intensity_level_db(-1.0), Error);
}
