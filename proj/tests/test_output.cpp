#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "puprobe/bench/output.hpp"
#include "puprobe/error.hpp"

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using namespace puprobe;
using namespace puprobe::bench;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / "puprobe_output_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("number format") {
  CHECK(format_number(60.0) == "6.00000000e+01");
  CHECK(format_number(-1.2047321880346e-3) == "-1.20473219e-03");
  CHECK(format_number(0.0) == "0.00000000e+00");
}

TEST_CASE("polar csv layout") {
  PolarScanExperiment exp;
  auto report = run_polar_scan(ProbeConfig::make_default(), exp);
  auto rows = lines(polar_csv(report));
  CHECK(rows.size() == 97);
  CHECK(rows[0] == "angle_deg,ch1,ch2");
  const std::regex number(R"(-?\d\.\d{8}e[+-]\d{2})");
  std::istringstream cells(rows[17]);
  int count = 0;
  for (std::string cell; std::getline(cells, cell, ',');) {
    CHECK(std::regex_match(cell, number));
    ++count;
  }
  CHECK(count == 3);
  CHECK(rows[17].rfind("6.00000000e+01,1.00000000e+00,", 0) == 0);

  exp.correction.mode = CorrectionMode::Auto;
  report = run_polar_scan(ProbeConfig::make_default(), exp);
  rows = lines(polar_csv(report));
  CHECK(rows[0] == "angle_deg,ch1,ch2,ch1_corrected,ch2_corrected");
  CHECK(rows.size() == 97);
}

TEST_CASE("tube and selfnoise csv headers") {
  const auto tube = run_tube_sweep(ProbeConfig::make_default(), TubeSweepExperiment{});
  auto rows = lines(tube_csv(tube));
  CHECK(rows[0] == "sweep_value,pressure_mag,velocity_mag");
  CHECK(rows.size() == 502);
  const auto noise = run_selfnoise_compare(ProbeConfig::make_default(), SelfnoiseExperiment{});
  rows = lines(selfnoise_csv(noise));
  CHECK(rows[0] == "freq_hz,selfnoise_2wire,selfnoise_4wire,ratio_db");
  CHECK(rows.size() == noise.frequency.size() + 1);
}

TEST_CASE("csv emission is byte stable") {
  const auto dir = scratch();
  PolarScanExperiment exp;
  exp.correction.mode = CorrectionMode::Auto;
  emit_csv(run_polar_scan(ProbeConfig::make_default(), exp), dir / "a.csv");
  emit_csv(run_polar_scan(ProbeConfig::make_default(), exp), dir / "b.csv");
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK(slurp(dir / "a.csv").find('\r') == std::string::npos);
}

TEST_CASE("empty scans are rejected before touching the filesystem") {
  const auto path = scratch() / "empty.csv";
  fs::remove(path);
  PolarScanReport empty;
  CHECK_THROWS_AS(emit_csv(empty, path), Error);
  CHECK_THROWS_AS(emit_polar_svg(PolarScan{}, scratch() / "empty.svg"), Error);
  CHECK_FALSE(fs::exists(path));
  CHECK_FALSE(fs::exists(scratch() / "empty.svg"));
}

TEST_CASE("io failures carry the path") {
  const auto bad = scratch() / "missing_dir" / "x.csv";
  try {
    emit_csv(run_selfnoise_compare(ProbeConfig::make_default(), SelfnoiseExperiment{}), bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
    CHECK(std::string(e.what()).find(bad.string()) != std::string::npos);
  }
}

TEST_CASE("polar svg structure") {
  const auto report = run_polar_scan(ProbeConfig::make_default(), PolarScanExperiment{});
  const std::string svg = polar_svg(report.uncorrected);
  CHECK(svg.rfind("<svg", 0) == 0);
  std::size_t spokes = 0, traces = 0;
  for (std::size_t pos = 0; (pos = svg.find("class=\"grid\"", pos)) != std::string::npos; ++pos) ++spokes;
  for (std::size_t pos = 0; (pos = svg.find("<polyline", pos)) != std::string::npos; ++pos) ++traces;
  CHECK(spokes == 24);
  CHECK(traces == 2);
  // normalised radius: no vertex beyond the outer ring
  const std::regex pt(R"((-?[0-9.e+-]+),(-?[0-9.e+-]+))");
  const auto start = svg.find("points=\"");
  const auto stop = svg.find('"', start + 8);
  const std::string pts = svg.substr(start + 8, stop - start - 8);
  for (auto it = std::sregex_iterator(pts.begin(), pts.end(), pt); it != std::sregex_iterator(); ++it) {
    const double x = std::stod((*it)[1]) - 200.0;
    const double y = std::stod((*it)[2]) - 200.0;
    CHECK(std::hypot(x, y) <= 170.0 + 1e-6);
  }
}

TEST_CASE("report json carries a reusable profile") {
  PolarScanExperiment exp;
  exp.channel = 3;
  exp.correction.mode = CorrectionMode::Auto;
  const auto j = report_json(run_polar_scan(ProbeConfig::make_default(), exp));
  CHECK(j["chip"] == 2);
  CHECK(j["profile"]["chips"][0]["chip"] == 2);
  CHECK(j["profile"]["chips"][0]["matrix"].size() == 4);
  const auto cfg = parse_config(nlohmann::json{{"profile", j["profile"]}});
  CHECK(cfg.profile.chips[1].has_value());
}
