#include "puprobe/bench/config.hpp"

#include "puprobe/error.hpp"

#include <Eigen/LU>

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace puprobe::bench {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw Error(ErrorKind::Config, path + ": " + message);
}

// Object view that records which keys were read so leftovers can be rejected.
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(display_path(), "expected an object");
  }

  std::string field_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number()) fail(field_path(key), "expected a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) fail(field_path(key), "must be finite");
    return d;
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key, 0.0);
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) fail(field_path(key), "expected an integer");
    return v->get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number_unsigned()) {
      fail(field_path(key), "expected a non-negative integer");
    }
    return v->get<std::uint64_t>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_string()) fail(field_path(key), "expected a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::size_t count) {
    const json* v = get(key);
    if (!v->is_array() || v->size() != count) {
      fail(field_path(key),
           "expected an array of " + std::to_string(count) + " numbers");
    }
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) fail(field_path(key), "expected numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  Vec3 vec3(const std::string& key, const Vec3& fallback) {
    if (!has(key)) return fallback;
    const auto v = numbers(key, 3);
    return {v[0], v[1], v[2]};
  }

  std::optional<Reader> child(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    return Reader(*v, field_path(key));
  }

  void finish() const {
    std::vector<std::string> unknown;
    for (const auto& [key, _] : obj_.items()) {
      if (!seen_.count(key)) unknown.push_back(key);
    }
    if (!unknown.empty()) {
      std::string list;
      for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + field_path(k);
      fail(display_path(), "unknown key(s): " + list);
    }
  }

  std::string display_path() const { return path_.empty() ? "<root>" : path_; }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

// Runs a model validator and re-labels its failure with the config path.
template <typename F>
void validated(const std::string& path, F&& check) {
  try {
    check();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    fail(path, e.what());
  }
}

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) fail(path, message);
}

void require_positive(double value, const std::string& path) {
  require(value > 0.0, path, "must be > 0");
}

void require_divides_turn(double step, const std::string& path) {
  require_positive(step, path);
  const double count = std::round(360.0 / step);
  require(count >= 2 && std::abs(count * step - 360.0) <= 1e-9, path,
          "must divide 360 evenly");
}

void require_channel(int channel, const std::string& path) {
  require(channel >= 1 && channel <= kVelocityChannels, path,
          "must be a velocity channel index 1..4");
}

int narrow_int(std::int64_t v, const std::string& path) {
  require(v >= std::numeric_limits<int>::min() && v <= std::numeric_limits<int>::max(),
          path, "out of range");
  return static_cast<int>(v);
}

ChannelResponse read_response(Reader& r, ChannelResponse base) {
  base.s0 = r.number("s0", base.s0);
  base.corner_f1 = r.number("corner_f1", base.corner_f1);
  base.corner_f2 = r.number("corner_f2", base.corner_f2);
  base.noise_density = r.number("noise_density", base.noise_density);
  const std::string mode =
      r.string("wire_mode", base.wire_mode == WireMode::FourWire ? "four_wire" : "two_wire");
  if (mode == "four_wire") {
    base.wire_mode = WireMode::FourWire;
  } else if (mode == "two_wire") {
    base.wire_mode = WireMode::TwoWire;
  } else {
    fail(r.field_path("wire_mode"), "expected \"two_wire\" or \"four_wire\"");
  }
  base.four_wire_gain = r.number("four_wire_gain", base.four_wire_gain);
  r.finish();
  validated(r.display_path(), [&] { base.validate(); });
  return base;
}

Mat3 read_orientation(Reader& r, const Mat3& fallback) {
  const json* v = r.get("orientation");
  if (!v) return fallback;
  const std::string path = r.field_path("orientation");
  Mat3 m;
  if (v->is_string()) {
    validated(path, [&] { m = plane_orientation(v->get<std::string>()); });
    return m;
  }
  const auto values = r.numbers("orientation", 9);
  for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = values[i];
  require((m.transpose() * m).isIdentity(1e-9) && std::abs(m.determinant() - 1.0) <= 1e-9,
          path, "must be a proper rotation matrix (row-major)");
  return m;
}

ChipAssembly read_chip(Reader& r, ChipAssembly chip, const ChannelResponse& defaults) {
  chip.orientation = read_orientation(r, chip.orientation);
  chip.axis_offset_deg = r.number("axis_offset_deg", chip.axis_offset_deg);
  if (r.has("nominal_axis_angles_deg")) {
    const auto a = r.numbers("nominal_axis_angles_deg", 2);
    chip.nominal_axis_angles_deg = {a[0], a[1]};
  }
  if (auto q = r.child("quad")) {
    chip.quad.side_spacing = q->number("side_spacing", chip.quad.side_spacing);
    chip.quad.diagonal_spacing = q->number("diagonal_spacing", chip.quad.diagonal_spacing);
    chip.quad.wire_length = q->number("wire_length", chip.quad.wire_length);
    chip.quad.wire_width = q->number("wire_width", chip.quad.wire_width);
    chip.quad.wire_height = q->number("wire_height", chip.quad.wire_height);
    q->finish();
  }
  chip.channels = {defaults, defaults};
  if (const json* channels = r.get("channels")) {
    const std::string path = r.field_path("channels");
    require(channels->is_array() && channels->size() == 2, path,
            "expected an array of exactly 2 channels");
    for (int i = 0; i < 2; ++i) {
      Reader cr((*channels)[i], path + "[" + std::to_string(i) + "]");
      chip.channels[i] = read_response(cr, defaults);
    }
  }
  r.finish();
  validated(r.display_path(), [&] { chip.validate(); });
  return chip;
}

ProbeConfig read_probe(Reader& r) {
  ProbeConfig cfg = ProbeConfig::make_default();
  if (auto m = r.child("medium")) {
    cfg.medium.density = m->number("density", cfg.medium.density);
    cfg.medium.sound_speed = m->number("sound_speed", cfg.medium.sound_speed);
    m->finish();
    validated(m->display_path(), [&] { cfg.medium.validate(); });
  }
  ChannelResponse defaults;
  if (auto d = r.child("channel_defaults")) defaults = read_response(*d, defaults);
  for (auto& chip : cfg.chips) chip.channels = {defaults, defaults};

  if (const json* chips = r.get("chips")) {
    const std::string path = r.field_path("chips");
    require(chips->is_array() && chips->size() == 2, path,
            "expected an array of exactly 2 chips");
    for (int i = 0; i < 2; ++i) {
      Reader cr((*chips)[i], path + "[" + std::to_string(i) + "]");
      cfg.chips[i] = read_chip(cr, cfg.chips[i], defaults);
    }
  }
  if (auto pc = r.child("pressure_channel")) {
    if (auto bc = pc->child("back_chamber")) {
      auto& b = cfg.pressure_channel.back_chamber;
      b.cavity_volume = bc->number("cavity_volume", b.cavity_volume);
      b.acoustic_resistance = bc->number("acoustic_resistance", b.acoustic_resistance);
      bc->finish();
      validated(bc->display_path(), [&] { b.validate(); });
    }
    if (auto inner = pc->child("inner_channel")) {
      cfg.pressure_channel.inner_channel =
          read_response(*inner, cfg.pressure_channel.inner_channel);
    }
    pc->finish();
  }
  r.finish();
  validated(r.display_path(), [&] { cfg.validate(); });
  return cfg;
}

Correction read_correction(Reader& r) {
  const json* v = r.get("correction");
  Correction c;
  if (!v) return c;
  const std::string path = r.field_path("correction");
  if (v->is_number()) {
    c.mode = CorrectionMode::Fixed;
    c.fixed_offset_deg = v->get<double>();
    require(std::isfinite(c.fixed_offset_deg), path, "must be finite");
  } else if (v->is_string() && v->get<std::string>() == "none") {
    c.mode = CorrectionMode::None;
  } else if (v->is_string() && v->get<std::string>() == "auto") {
    c.mode = CorrectionMode::Auto;
  } else {
    fail(path, "expected \"none\", \"auto\" or a fixed offset in degrees");
  }
  return c;
}

FieldModel read_field(Reader& r) {
  const std::string type = r.string("type", "plane_wave");
  FieldModel model;
  if (type == "plane_wave") {
    PlaneWave m;
    m.direction = r.vec3("direction", m.direction);
    m.pressure_amplitude = r.number("pressure_amplitude", m.pressure_amplitude);
    m.frequency = r.number("frequency", m.frequency);
    model = m;
  } else if (type == "standing_wave_tube") {
    StandingWaveTube m;
    m.axis = r.vec3("axis", m.axis);
    m.rigid_end_position = r.number("rigid_end_position", m.rigid_end_position);
    m.pressure_amplitude_at_antinode =
        r.number("pressure_amplitude_at_antinode", m.pressure_amplitude_at_antinode);
    m.frequency = r.number("frequency", m.frequency);
    model = m;
  } else if (type == "monopole") {
    Monopole m;
    m.source_position = r.vec3("source_position", m.source_position);
    m.pressure_amplitude_at_1m = r.number("pressure_amplitude_at_1m", m.pressure_amplitude_at_1m);
    m.frequency = r.number("frequency", m.frequency);
    model = m;
  } else {
    fail(r.field_path("type"),
         "expected \"plane_wave\", \"standing_wave_tube\" or \"monopole\"");
  }
  r.finish();
  validated(r.display_path(), [&] { validate(model); });
  return model;
}

Experiment read_experiment(Reader& r) {
  const json* type_value = r.get("type");
  require(type_value && type_value->is_string(), r.field_path("type"),
          "experiment type is required");
  const std::string type = type_value->get<std::string>();
  Experiment experiment = default_experiment(type);

  std::visit(
      [&](auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, PolarScanExperiment>) {
          e.frequency = r.number("frequency", e.frequency);
          require_positive(e.frequency, r.field_path("frequency"));
          e.step_deg = r.number("step_deg", e.step_deg);
          require_divides_turn(e.step_deg, r.field_path("step_deg"));
          e.channel = narrow_int(r.integer("channel", e.channel), r.field_path("channel"));
          require_channel(e.channel, r.field_path("channel"));
          e.correction = read_correction(r);
          e.amplitude = r.number("amplitude", e.amplitude);
          require(e.amplitude >= 0.0, r.field_path("amplitude"), "must be >= 0");
        } else if constexpr (std::is_same_v<T, PressurePolarExperiment>) {
          e.frequency = r.number("frequency", e.frequency);
          require_positive(e.frequency, r.field_path("frequency"));
          e.step_deg = r.number("step_deg", e.step_deg);
          require_divides_turn(e.step_deg, r.field_path("step_deg"));
          e.amplitude = r.number("amplitude", e.amplitude);
          require(e.amplitude >= 0.0, r.field_path("amplitude"), "must be >= 0");
        } else if constexpr (std::is_same_v<T, TubeSweepExperiment>) {
          const std::string mode = r.string("mode", "position");
          if (mode == "position") {
            e.mode = SweepMode::Position;
            e.x_min = r.number("x_min", e.x_min);
            e.x_max = r.number("x_max", e.x_max);
            e.frequency = r.number("frequency", e.frequency);
            require(e.x_max > e.x_min, r.field_path("x_max"), "must exceed x_min");
            require_positive(e.frequency, r.field_path("frequency"));
          } else if (mode == "frequency") {
            e.mode = SweepMode::Frequency;
            e.f_min = r.number("f_min", e.f_min);
            e.f_max = r.number("f_max", e.f_max);
            e.position = r.number("position", e.position);
            require_positive(e.f_min, r.field_path("f_min"));
            require(e.f_max > e.f_min, r.field_path("f_max"), "must exceed f_min");
          } else {
            fail(r.field_path("mode"), "expected \"position\" or \"frequency\"");
          }
          e.points = narrow_int(r.integer("points", e.points), r.field_path("points"));
          require(e.points >= 2, r.field_path("points"), "must be >= 2");
          e.axis = r.vec3("axis", e.axis);
          require(std::abs(e.axis.norm() - 1.0) <= 1e-12, r.field_path("axis"),
                  "must be a unit vector");
          e.rigid_end_position = r.number("rigid_end_position", e.rigid_end_position);
          e.amplitude = r.number("amplitude", e.amplitude);
          require(e.amplitude >= 0.0, r.field_path("amplitude"), "must be >= 0");
          e.velocity_channel = narrow_int(r.integer("velocity_channel", e.velocity_channel),
                                          r.field_path("velocity_channel"));
          require_channel(e.velocity_channel, r.field_path("velocity_channel"));
        } else if constexpr (std::is_same_v<T, SelfnoiseExperiment>) {
          e.f_min = r.number("f_min", e.f_min);
          e.f_max = r.number("f_max", e.f_max);
          require_positive(e.f_min, r.field_path("f_min"));
          require(e.f_max > e.f_min, r.field_path("f_max"), "must exceed f_min");
          e.points_per_decade = narrow_int(r.integer("points_per_decade", e.points_per_decade),
                                           r.field_path("points_per_decade"));
          require(e.points_per_decade >= 1, r.field_path("points_per_decade"), "must be >= 1");
          e.channel = narrow_int(r.integer("channel", e.channel), r.field_path("channel"));
          require_channel(e.channel, r.field_path("channel"));
        } else {
          if (auto f = r.child("field")) e.field = read_field(*f);
          e.sample_rate = r.number("sample_rate", e.sample_rate);
          require_positive(e.sample_rate, r.field_path("sample_rate"));
          require(e.sample_rate > 2.0 * frequency_of(e.field), r.field_path("sample_rate"),
                  "must exceed twice the field frequency");
          e.duration = r.number("duration", e.duration);
          require_positive(e.duration, r.field_path("duration"));
          e.seed = r.unsigned_integer("seed", e.seed);
          e.snr_db = r.optional_number("snr_db");
          e.position = r.vec3("position", e.position);
        }
      },
      experiment);
  r.finish();
  return experiment;
}

CalibrationProfile read_profile(Reader& r) {
  CalibrationProfile profile;
  if (const json* chips = r.get("chips")) {
    const std::string path = r.field_path("chips");
    require(chips->is_array(), path, "expected an array");
    for (std::size_t i = 0; i < chips->size(); ++i) {
      Reader cr((*chips)[i], path + "[" + std::to_string(i) + "]");
      const auto chip = cr.integer("chip", 0);
      require(chip == 1 || chip == 2, cr.field_path("chip"), "must be 1 or 2");
      ChipCalibration cal;
      cal.offset_deg = cr.number("offset_deg", 0.0);
      if (cr.has("matrix")) {
        const auto m = cr.numbers("matrix", 4);
        cal.matrix = {m[0], m[1], m[2], m[3]};
      } else {
        cal.matrix = correction_matrix(cal.offset_deg, true);
      }
      require(std::abs(cal.matrix.determinant()) > 1e-12, cr.field_path("matrix"),
              "mixing matrix must be invertible");
      cr.finish();
      require(!profile.chips[chip - 1], cr.field_path("chip"), "duplicate chip entry");
      profile.chips[chip - 1] = cal;
    }
  }
  r.finish();
  return profile;
}

}  // namespace

std::string experiment_type(const Experiment& e) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, PolarScanExperiment>) return "polar_scan";
        else if constexpr (std::is_same_v<T, PressurePolarExperiment>) return "pressure_polar";
        else if constexpr (std::is_same_v<T, TubeSweepExperiment>) return "tube_sweep";
        else if constexpr (std::is_same_v<T, SelfnoiseExperiment>) return "selfnoise_compare";
        else return "intensity";
      },
      e);
}

Experiment default_experiment(const std::string& type) {
  if (type == "polar_scan") return PolarScanExperiment{};
  if (type == "pressure_polar") return PressurePolarExperiment{};
  if (type == "tube_sweep") return TubeSweepExperiment{};
  if (type == "selfnoise_compare") return SelfnoiseExperiment{};
  if (type == "intensity") return IntensityExperiment{};
  fail("experiment.type", "unknown experiment type '" + type + "'");
}

ExperimentConfig parse_config(const json& doc) {
  Reader root(doc, "");
  ExperimentConfig cfg;
  if (auto p = root.child("probe")) cfg.probe = read_probe(*p);
  if (auto e = root.child("experiment")) {
    cfg.experiment = read_experiment(*e);
    cfg.experiment_given = true;
  }
  if (auto pr = root.child("profile")) cfg.profile = read_profile(*pr);
  root.finish();
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string("parse error: ") + e.what());
  }
  return parse_config(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Config, "cannot open config file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

nlohmann::json profile_to_json(const CalibrationProfile& profile) {
  json chips = json::array();
  for (int i = 0; i < 2; ++i) {
    if (!profile.chips[i]) continue;
    const auto m = profile.chips[i]->matrix.row_major();
    chips.push_back({{"chip", i + 1},
                     {"offset_deg", profile.chips[i]->offset_deg},
                     {"matrix", {m[0], m[1], m[2], m[3]}}});
  }
  return {{"chips", chips}};
}

}  // namespace puprobe::bench
