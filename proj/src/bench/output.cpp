#include "puprobe/bench/output.hpp"

#include "puprobe/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace puprobe::bench {
namespace {

using nlohmann::json;

void require_scan(const PolarScan& scan) {
  if (scan.angles_deg.empty() || scan.magnitudes.empty()) {
    throw Error(ErrorKind::Shape, "cannot emit an empty polar scan");
  }
  for (const auto& m : scan.magnitudes) {
    if (m.size() != scan.angles_deg.size()) {
      throw Error(ErrorKind::Shape, "polar scan channels differ in length");
    }
  }
}

void append_row(std::string& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    out += format_number(v);
    first = false;
  }
  out += '\n';
}

json indices(const std::vector<std::size_t>& idx, const std::vector<double>& values) {
  json out = json::array();
  for (std::size_t i : idx) out.push_back(values[i]);
  return out;
}

json vec_json(const Vec3& v) { return {v(0), v(1), v(2)}; }

json matrix_json(const MixingMatrix& m) {
  const auto r = m.row_major();
  return {r[0], r[1], r[2], r[3]};
}

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

}  // namespace

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8e", value);
  return buf;
}

std::string polar_csv(const PolarScanReport& report) {
  require_scan(report.uncorrected);
  const auto& u = report.uncorrected;
  std::string out = report.corrected ? "angle_deg,ch1,ch2,ch1_corrected,ch2_corrected\n"
                                     : "angle_deg,ch1,ch2\n";
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (report.corrected) {
      append_row(out, {u.angles_deg[i], u.magnitudes[0][i], u.magnitudes[1][i],
                       report.corrected->magnitudes[0][i],
                       report.corrected->magnitudes[1][i]});
    } else {
      append_row(out, {u.angles_deg[i], u.magnitudes[0][i], u.magnitudes[1][i]});
    }
  }
  return out;
}

std::string pressure_polar_csv(const PressurePolarReport& report) {
  require_scan(report.scan);
  std::string out = "angle_deg,pressure\n";
  for (std::size_t i = 0; i < report.scan.size(); ++i) {
    append_row(out, {report.scan.angles_deg[i], report.scan.magnitudes[0][i]});
  }
  return out;
}

std::string tube_csv(const TubeSweepReport& report) {
  if (report.sweep_values.empty()) {
    throw Error(ErrorKind::Shape, "cannot emit an empty tube sweep");
  }
  std::string out = "sweep_value,pressure_mag,velocity_mag\n";
  for (std::size_t i = 0; i < report.sweep_values.size(); ++i) {
    append_row(out, {report.sweep_values[i], report.pressure_mag[i], report.velocity_mag[i]});
  }
  return out;
}

std::string selfnoise_csv(const SelfnoiseTable& table) {
  if (table.frequency.empty()) {
    throw Error(ErrorKind::Shape, "cannot emit an empty selfnoise table");
  }
  std::string out = "freq_hz,selfnoise_2wire,selfnoise_4wire,ratio_db\n";
  for (std::size_t i = 0; i < table.frequency.size(); ++i) {
    append_row(out, {table.frequency[i], table.two_wire[i], table.four_wire[i],
                     table.ratio_db[i]});
  }
  return out;
}

std::string polar_svg(const PolarScan& scan, const std::vector<std::string>& labels) {
  require_scan(scan);
  constexpr double kSize = 400.0;
  constexpr double kCenter = kSize / 2.0;
  constexpr double kRadius = 170.0;
  double peak = 0.0;
  for (const auto& m : scan.magnitudes) peak = std::max(peak, *std::max_element(m.begin(), m.end()));
  if (!(peak > 0.0)) peak = 1.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\""
      << kSize << "\" viewBox=\"0 0 " << kSize << ' ' << kSize << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int ring = 1; ring <= 4; ++ring) {
    svg << "<circle cx=\"" << kCenter << "\" cy=\"" << kCenter << "\" r=\""
        << format_number(kRadius * ring / 4.0)
        << "\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n";
  }
  for (int deg = 0; deg < 360; deg += 15) {
    const double a = deg_to_rad(deg);
    svg << "<line class=\"grid\" x1=\"" << kCenter << "\" y1=\"" << kCenter << "\" x2=\""
        << format_number(kCenter + kRadius * std::cos(a)) << "\" y2=\""
        << format_number(kCenter - kRadius * std::sin(a))
        << "\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n";
  }
  for (std::size_t c = 0; c < scan.magnitudes.size(); ++c) {
    svg << "<polyline class=\"channel\" fill=\"none\" stroke=\"" << kPalette[c % 4]
        << "\" stroke-width=\"1.5\" points=\"";
    // Repeat the first point so the trace closes.
    for (std::size_t i = 0; i <= scan.size(); ++i) {
      const std::size_t j = i % scan.size();
      const double r = kRadius * scan.magnitudes[c][j] / peak;
      const double a = deg_to_rad(scan.angles_deg[j]);
      svg << (i ? " " : "") << format_number(kCenter + r * std::cos(a)) << ','
          << format_number(kCenter - r * std::sin(a));
    }
    svg << "\"/>\n";
    const std::string label = c < labels.size() ? labels[c] : "ch" + std::to_string(c + 1);
    svg << "<text x=\"8\" y=\"" << 16 + 14 * c << "\" font-size=\"12\" fill=\""
        << kPalette[c % 4] << "\">" << label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out << contents;
  out.close();
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

void emit_csv(const PolarScanReport& report, const std::filesystem::path& path) {
  write_file(path, polar_csv(report));
}
void emit_csv(const PressurePolarReport& report, const std::filesystem::path& path) {
  write_file(path, pressure_polar_csv(report));
}
void emit_csv(const TubeSweepReport& report, const std::filesystem::path& path) {
  write_file(path, tube_csv(report));
}
void emit_csv(const SelfnoiseTable& table, const std::filesystem::path& path) {
  write_file(path, selfnoise_csv(table));
}
void emit_polar_svg(const PolarScan& scan, const std::filesystem::path& path,
                    const std::vector<std::string>& labels) {
  write_file(path, polar_svg(scan, labels));
}

json report_json(const PolarScanReport& r) {
  json out = {{"experiment", "polar_scan"},
              {"frequency_hz", r.uncorrected.frequency},
              {"chip", r.chip + 1},
              {"points", r.uncorrected.size()},
              {"argmax_deg", r.argmax_deg}};
  if (r.estimates) {
    json est = json::array();
    for (const auto& e : *r.estimates) {
      est.push_back({{"offset_deg", e.offset_deg},
                     {"axis_deg", e.axis_deg},
                     {"residual", e.residual}});
    }
    out["estimates"] = est;
  }
  if (r.calibration) {
    out["correction"] = {{"offset_deg", r.calibration->offset_deg},
                         {"matrix", matrix_json(r.calibration->matrix)}};
    CalibrationProfile profile;
    profile.chips[r.chip] = r.calibration;
    out["profile"] = profile_to_json(profile);
  }
  if (r.corrected_argmax_deg) out["corrected_argmax_deg"] = *r.corrected_argmax_deg;
  if (r.residual_offset_deg) out["residual_offset_deg"] = *r.residual_offset_deg;
  return out;
}

json report_json(const PressurePolarReport& r) {
  return {{"experiment", "pressure_polar"},
          {"frequency_hz", r.scan.frequency},
          {"points", r.scan.size()},
          {"max_min_ratio_db", r.max_min_ratio_db}};
}

json report_json(const TubeSweepReport& r) {
  auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"experiment", "tube_sweep"},
          {"mode", r.mode == SweepMode::Position ? "position" : "frequency"},
          {"points", r.sweep_values.size()},
          {"pressure_maxima", indices(r.pressure_maxima, r.sweep_values)},
          {"pressure_minima", indices(r.pressure_minima, r.sweep_values)},
          {"velocity_maxima", indices(r.velocity_maxima, r.sweep_values)},
          {"velocity_minima", indices(r.velocity_minima, r.sweep_values)},
          {"max_alignment_steps", finite_or_null(r.max_alignment_steps)},
          {"max_inverse_alignment_steps", finite_or_null(r.max_inverse_alignment_steps)},
          {"max_active_ratio", r.max_active_ratio}};
}

json report_json(const SelfnoiseTable& t) {
  const auto [lo, hi] = std::minmax_element(t.ratio_db.begin(), t.ratio_db.end());
  return {{"experiment", "selfnoise_compare"},
          {"points", t.frequency.size()},
          {"ratio_db_min", *lo},
          {"ratio_db_max", *hi}};
}

json report_json(const IntensityReport& r) {
  json cal = json::array();
  for (int i = 0; i < 2; ++i) {
    cal.push_back({{"chip", i + 1},
                   {"offset_deg", r.calibration[i].offset_deg},
                   {"matrix", matrix_json(r.calibration[i].matrix)}});
  }
  return {{"experiment", "intensity"},
          {"frequency_hz", r.frequency},
          {"seed", r.seed},
          {"samples", r.samples},
          {"active_w_m2", vec_json(r.active)},
          {"magnitude_w_m2", r.magnitude},
          {"level_db", r.level_db ? json(*r.level_db) : json(nullptr)},
          {"reference_active_w_m2", vec_json(r.reference.active)},
          {"reference_reactive_w_m2", vec_json(r.reference.reactive)},
          {"calibration", cal}};
}

}  // namespace puprobe::bench
