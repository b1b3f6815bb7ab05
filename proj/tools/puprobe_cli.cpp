// Command-line front end: runs one virtual experiment and writes its CSV,
// SVG and JSON report into the output directory.
//
// Exit codes: 0 success, 1 validation (CLI or config) error, 2 runtime error.

#include "puprobe/bench/config.hpp"
#include "puprobe/bench/experiments.hpp"
#include "puprobe/bench/output.hpp"
#include "puprobe/error.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace puprobe;
using namespace puprobe::bench;

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::string format = "both";
};

bool wants_csv(const Options& o) { return o.format != "svg"; }
bool wants_svg(const Options& o) { return o.format != "csv"; }

std::uint64_t parse_env_seed(const char* text) {
  std::size_t used = 0;
  const std::string s(text);
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used, 10);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || s.front() == '-') {
    throw Error(ErrorKind::Config, "PUPROBE_SEED: expected an unsigned integer");
  }
  return v;
}

void finish(const Options& opt, const std::string& stem, const nlohmann::json& report) {
  write_file(fs::path(opt.out) / (stem + "_report.json"), report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";
}

void run(const std::string& command, const Options& opt) {
  static const std::map<std::string, std::string> kTypes = {
      {"polar", "polar_scan"},        {"pressure-polar", "pressure_polar"},
      {"tube", "tube_sweep"},         {"selfnoise", "selfnoise_compare"},
      {"intensity", "intensity"}};
  const std::string type = kTypes.at(command);

  ExperimentConfig cfg;
  if (!opt.config.empty()) cfg = load_config(opt.config);
  if (!cfg.experiment_given) {
    cfg.experiment = default_experiment(type);
  } else if (experiment_type(cfg.experiment) != type) {
    throw Error(ErrorKind::Config, "experiment.type: config selects '" +
                                       experiment_type(cfg.experiment) +
                                       "' but subcommand '" + command + "' needs '" +
                                       type + "'");
  }
  std::optional<std::uint64_t> seed = opt.seed;
  if (!seed) {
    if (const char* env = std::getenv("PUPROBE_SEED")) seed = parse_env_seed(env);
  }

  std::error_code ec;
  fs::create_directories(opt.out, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + opt.out);
  const fs::path out(opt.out);

  if (auto* e = std::get_if<PolarScanExperiment>(&cfg.experiment)) {
    const auto report = run_polar_scan(cfg.probe, *e);
    if (wants_csv(opt)) emit_csv(report, out / "polar.csv");
    if (wants_svg(opt)) {
      PolarScan combined = report.uncorrected;
      std::vector<std::string> labels{"ch1", "ch2"};
      if (report.corrected) {
        for (const auto& m : report.corrected->magnitudes) combined.magnitudes.push_back(m);
        labels.insert(labels.end(), {"ch1 corrected", "ch2 corrected"});
      }
      emit_polar_svg(combined, out / "polar.svg", labels);
    }
    const auto json = report_json(report);
    if (json.contains("profile")) {
      write_file(out / "profile.json", nlohmann::json{{"profile", json["profile"]}}.dump(2) + "\n");
    }
    finish(opt, "polar", json);
  } else if (auto* e = std::get_if<PressurePolarExperiment>(&cfg.experiment)) {
    const auto report = run_pressure_polar(cfg.probe, *e);
    if (wants_csv(opt)) emit_csv(report, out / "pressure_polar.csv");
    if (wants_svg(opt)) emit_polar_svg(report.scan, out / "pressure_polar.svg", {"pressure"});
    finish(opt, "pressure_polar", report_json(report));
  } else if (auto* e = std::get_if<TubeSweepExperiment>(&cfg.experiment)) {
    const auto report = run_tube_sweep(cfg.probe, *e);
    if (wants_csv(opt)) emit_csv(report, out / "tube.csv");
    finish(opt, "tube", report_json(report));
  } else if (auto* e = std::get_if<SelfnoiseExperiment>(&cfg.experiment)) {
    const auto table = run_selfnoise_compare(cfg.probe, *e);
    if (wants_csv(opt)) emit_csv(table, out / "selfnoise.csv");
    finish(opt, "selfnoise", report_json(table));
  } else if (auto* e = std::get_if<IntensityExperiment>(&cfg.experiment)) {
    if (seed) e->seed = *seed;
    const auto report = run_intensity(cfg.probe, *e, cfg.profile);
    finish(opt, "intensity", report_json(report));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual measurements for a 3D p-u sound intensity probe"};
  app.require_subcommand(1);
  Options opt;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"polar", "velocity-pair polar scan with optional directivity correction"},
      {"pressure-polar", "pressure-channel polar scan"},
      {"tube", "standing-wave tube sweep"},
      {"selfnoise", "two-wire vs four-wire selfnoise comparison"},
      {"intensity", "end-to-end intensity estimate from synthesized signals"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "experiment config file (JSON)");
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--seed", opt.seed, "noise seed (overrides PUPROBE_SEED)");
    sub->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"csv", "svg", "both"}))
        ->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    run(app.get_subcommands().front()->get_name(), opt);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return e.kind() == ErrorKind::Config ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
