#pragma once

#include "puprobe/bench/experiments.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace puprobe::bench {

/// Scientific notation, 9 significant digits, '.' separator.
std::string format_number(double value);

std::string polar_csv(const PolarScanReport& report);
std::string pressure_polar_csv(const PressurePolarReport& report);
std::string tube_csv(const TubeSweepReport& report);
std::string selfnoise_csv(const SelfnoiseTable& table);

/// Polar plot: 15-degree spokes, one closed polyline per channel, radius
/// normalized to the scan's largest magnitude.
std::string polar_svg(const PolarScan& scan,
                      const std::vector<std::string>& labels = {});

void emit_csv(const PolarScanReport& report, const std::filesystem::path& path);
void emit_csv(const PressurePolarReport& report, const std::filesystem::path& path);
void emit_csv(const TubeSweepReport& report, const std::filesystem::path& path);
void emit_csv(const SelfnoiseTable& table, const std::filesystem::path& path);
void emit_polar_svg(const PolarScan& scan, const std::filesystem::path& path,
                    const std::vector<std::string>& labels = {});

nlohmann::json report_json(const PolarScanReport& report);
nlohmann::json report_json(const PressurePolarReport& report);
nlohmann::json report_json(const TubeSweepReport& report);
nlohmann::json report_json(const SelfnoiseTable& table);
nlohmann::json report_json(const IntensityReport& report);

/// Writes `contents` to `path`, surfacing failures with the path.
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace puprobe::bench
