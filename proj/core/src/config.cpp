#include "hivekit/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "hivekit/error.hpp"

namespace hivekit {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string format_reals(const std::vector<double>& vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ", ";
    out += format_real(vs[i]);
  }
  return out;
}

std::string format_vec2(const Vec2& v) { return format_real(v.x) + ", " + format_real(v.y); }

// One `key = value` line, remembered with its line number for error messages.
struct Entry {
  std::string value;
  std::size_t line = 0;
  bool used = false;
};

class Section {
 public:
  Section(std::string name, std::size_t line) : name_(std::move(name)), line_(line) {}

  void add(std::string key, std::string value, std::size_t line) {
    if (entries_.count(key)) throw ConfigSyntaxError(line, "duplicate key '" + key + "'");
    entries_.emplace(std::move(key), Entry{std::move(value), line});
  }

  const Entry* get(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  const Entry& require(const std::string& key) {
    if (const auto* e = get(key)) return *e;
    throw ValidationError("[" + name_ + "] missing required key '" + key + "'");
  }

  void reject_unused() const {
    for (const auto& [key, entry] : entries_) {
      if (!entry.used) throw ConfigSyntaxError(entry.line, "unknown key '" + key + "' in [" + name_ + "]");
    }
  }

  const std::string& name() const { return name_; }
  std::size_t line() const { return line_; }

 private:
  std::string name_;
  std::size_t line_;
  std::map<std::string, Entry> entries_;
};

double to_real(const Entry& e, std::string_view text) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw ConfigSyntaxError(e.line, "expected a real number, got '" + std::string(text) + "'");
  }
  if (!std::isfinite(v)) throw ConfigSyntaxError(e.line, "non-finite number");
  return v;
}

double real(const Entry& e) { return to_real(e, e.value); }

std::vector<double> reals(const Entry& e) {
  std::vector<double> out;
  if (trim(e.value).empty()) return out;
  for (auto part : split_commas(e.value)) out.push_back(to_real(e, part));
  return out;
}

Vec2 vec2(const Entry& e) {
  auto v = reals(e);
  if (v.size() != 2) throw ConfigSyntaxError(e.line, "expected 2 comma-separated reals");
  return {v[0], v[1]};
}

template <typename Int>
Int integer(const Entry& e) {
  Int v{};
  const auto* first = e.value.data();
  const auto* last = e.value.data() + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || e.value.empty()) {
    throw ConfigSyntaxError(e.line, "expected a non-negative integer, got '" + e.value + "'");
  }
  return v;
}

bool boolean(const Entry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  throw ConfigSyntaxError(e.line, "expected true or false, got '" + e.value + "'");
}

template <typename F>
auto enum_value(const Entry& e, F&& parse) {
  try {
    return parse(e.value);
  } catch (const ValidationError& err) {
    throw ConfigSyntaxError(e.line, err.what());
  }
}

void parse_env_section(Section& s, EnvConfig& cfg) {
  cfg.env_id = s.require("id").value;
  if (const auto* e = s.get("backend")) cfg.backend = enum_value(*e, parse_backend);
  if (const auto* e = s.get("hardware_endpoint")) cfg.hardware_endpoint = e->value;
  if (const auto* e = s.get("control_mode")) cfg.control_mode = enum_value(*e, parse_control_mode);
  cfg.horizon = integer<std::uint32_t>(s.require("horizon"));
  if (const auto* e = s.get("seed")) cfg.seed = integer<std::uint64_t>(*e);
  if (const auto* e = s.get("frame_skip")) cfg.frame_skip = integer<std::uint32_t>(*e);
  if (const auto* e = s.get("dt")) cfg.dt = real(*e);
}

void parse_robot_section(Section& s, EnvConfig& cfg) {
  auto& r = cfg.robot;
  if (const auto* e = s.get("kind")) r.kind = enum_value(*e, parse_robot_kind);
  r.link_lengths = reals(s.require("link_lengths"));
  const auto& limits_entry = s.require("joint_limits");
  const auto limits = reals(limits_entry);
  if (limits.size() % 2 != 0) throw ConfigSyntaxError(limits_entry.line, "joint_limits needs lo, hi pairs");
  r.joint_limits.clear();
  for (std::size_t i = 0; i < limits.size(); i += 2) r.joint_limits.push_back({limits[i], limits[i + 1]});
  if (const auto* e = s.get("torque_limits")) {
    r.torque_limits = reals(*e);
  } else {
    r.torque_limits.assign(r.link_lengths.size(), 10.0);
  }
  if (const auto* e = s.get("gripper_radius")) r.gripper_radius = real(*e);
  if (const auto* e = s.get("initial_joint_pos")) r.initial_joint_pos = reals(*e);
  if (r.initial_joint_pos.empty()) r.initial_joint_pos.assign(r.link_lengths.size(), 0.0);
}

SensorSpec parse_sensor_section(Section& s, std::string name) {
  SensorSpec spec;
  spec.name = std::move(name);
  spec.kind = enum_value(s.require("kind"), parse_sensor_kind);
  if (const auto* e = s.get("noise_sigma")) spec.noise_sigma = real(*e);
  if (const auto* e = s.get("delay_steps")) spec.delay_steps = integer<std::uint32_t>(*e);
  if (const auto* e = s.get("resolution")) {
    const auto v = reals(*e);
    if (v.size() != 2 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1]) || v[0] < 0 || v[1] < 0) {
      throw ConfigSyntaxError(e->line, "resolution must be 'width, height' integers");
    }
    spec.camera_resolution = CameraResolution{static_cast<std::uint32_t>(v[0]), static_cast<std::uint32_t>(v[1])};
  }
  return spec;
}

void parse_task_section(Section& s, EnvConfig& cfg) {
  auto& t = cfg.task;
  t.kind = enum_value(s.require("kind"), parse_task_kind);
  if (const auto* e = s.get("target")) {
    const auto v = reals(*e);
    if (v.size() == 1) {
      t.target = {v[0], 0.0};
    } else if (v.size() == 2) {
      t.target = {v[0], v[1]};
    } else {
      throw ConfigSyntaxError(e->line, "target takes 1 or 2 reals");
    }
  }
  t.success_radius = real(s.require("success_radius"));
  if (const auto* e = s.get("goal_randomize")) t.goal_randomize = boolean(*e);
  t.goal_min = t.target;
  t.goal_max = t.target;
  if (const auto* e = s.get("goal_min")) t.goal_min = vec2(*e);
  if (const auto* e = s.get("goal_max")) t.goal_max = vec2(*e);
  if (const auto* e = s.get("bin_center")) t.bin_center = vec2(*e);
  if (const auto* e = s.get("bin_radius")) t.bin_radius = real(*e);
  if (const auto* e = s.get("object_count")) t.object_count = integer<std::uint32_t>(*e);
  if (const auto* e = s.get("object_radius")) t.object_radius = real(*e);
  if (const auto* e = s.get("object_mass")) t.object_mass = real(*e);
  if (const auto* e = s.get("success_latch_steps")) t.success_latch_steps = integer<std::uint32_t>(*e);
}

void parse_randomization_section(Section& s, EnvConfig& cfg) {
  auto& r = cfg.randomization;
  if (const auto* e = s.get("object_position_min")) r.object_position_min = vec2(*e);
  if (const auto* e = s.get("object_position_max")) r.object_position_max = vec2(*e);
  if (const auto* e = s.get("object_mass_min")) r.object_mass_min = real(*e);
  if (const auto* e = s.get("object_mass_max")) r.object_mass_max = real(*e);
  if (const auto* e = s.get("scene_palette_randomize")) r.scene_palette_randomize = boolean(*e);
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

void check(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

bool is_valid_env_id(std::string_view id) {
  static const std::regex pattern("[A-Za-z0-9_]+-v[0-9]+");
  return std::regex_match(id.begin(), id.end(), pattern);
}

std::string visual_variant_id(std::string_view env_id) {
  const auto dash = env_id.rfind("-v");
  if (dash == std::string_view::npos) return std::string(env_id) + "_v2d";
  return std::string(env_id.substr(0, dash)) + "_v2d" + std::string(env_id.substr(dash));
}

void validate_env_config(const EnvConfig& cfg) {
  check(is_valid_env_id(cfg.env_id), "env_id '" + cfg.env_id + "' must match [A-Za-z0-9_]+-v[0-9]+");
  check(cfg.horizon >= 1, "horizon must be >= 1");
  check(cfg.frame_skip >= 1, "frame_skip must be >= 1");
  check(std::isfinite(cfg.dt) && cfg.dt > 0.0, "dt must be > 0");
  if (cfg.backend == Backend::Hardware) {
    check(cfg.hardware_endpoint.has_value(), "hardware_endpoint required for backend = hardware");
  }
  if (cfg.hardware_endpoint) {
    const auto colon = cfg.hardware_endpoint->rfind(':');
    check(colon != std::string::npos && colon > 0 && colon + 1 < cfg.hardware_endpoint->size(),
          "hardware_endpoint must be host:port");
  }

  const auto& r = cfg.robot;
  const auto n = r.link_lengths.size();
  check(n >= 1, "robot needs at least one link");
  check(r.joint_limits.size() == n, "robot link count must equal joint count");
  check(r.torque_limits.size() == n, "torque_limits must have one entry per joint");
  for (std::size_t i = 0; i < n; ++i) {
    check(r.link_lengths[i] > 0.0, "link_lengths must be positive");
    check(r.joint_limits[i].lo < r.joint_limits[i].hi, "joint limit lo must be < hi");
    check(r.torque_limits[i] > 0.0, "torque_limits must be positive");
  }
  check(r.gripper_radius >= 0.0, "gripper_radius must be >= 0");
  check(r.initial_joint_pos.size() == n, "initial_joint_pos must have one entry per joint");
  for (std::size_t i = 0; i < n; ++i) {
    check(r.initial_joint_pos[i] >= r.joint_limits[i].lo && r.initial_joint_pos[i] <= r.joint_limits[i].hi,
          "initial_joint_pos outside joint limits");
  }
  if (r.kind == RobotKind::Pendulum) check(n == 1, "pendulum robot has exactly one joint");

  std::set<std::string> names;
  for (const auto& s : cfg.sensors) {
    check(is_identifier(s.name), "sensor name '" + s.name + "' must be [A-Za-z0-9_]+");
    check(names.insert(s.name).second, "duplicate sensor name '" + s.name + "'");
    check(s.noise_sigma >= 0.0 && std::isfinite(s.noise_sigma), "noise_sigma must be >= 0");
    if (s.kind == SensorKind::GridCamera) {
      check(s.camera_resolution.has_value(), "camera_resolution required for grid_camera sensor '" + s.name + "'");
      check(s.camera_resolution->width >= 1 && s.camera_resolution->height >= 1,
            "camera_resolution must be at least 1x1");
    } else {
      check(!s.camera_resolution.has_value(), "camera_resolution only allowed for grid_camera sensors");
    }
  }

  const auto& t = cfg.task;
  check(t.success_radius > 0.0, "success_radius must be > 0");
  check(t.goal_min.x <= t.goal_max.x && t.goal_min.y <= t.goal_max.y, "goal range must be nonempty");
  check(t.object_radius > 0.0, "object_radius must be > 0");
  check(t.object_mass > 0.0, "object_mass must be > 0");
  check(t.success_latch_steps >= 1, "success_latch_steps must be >= 1");
  if (t.kind == TaskKind::PickPlace) {
    check(t.bin_center.has_value() && t.bin_radius.has_value(), "pick_place task requires bin_center and bin_radius");
    check(*t.bin_radius > 0.0, "bin_radius must be > 0");
  }
  if (t.kind == TaskKind::Push || t.kind == TaskKind::PickPlace) {
    check(t.object_count >= 1, "push and pick_place tasks need object_count >= 1");
  }
  check((t.kind == TaskKind::PendulumSwingup) == (r.kind == RobotKind::Pendulum),
        "pendulum_swingup task requires a pendulum robot and vice versa");
  check(t.object_count <= 255, "object_count must be <= 255");

  const auto& z = cfg.randomization;
  check(z.object_position_min.x <= z.object_position_max.x && z.object_position_min.y <= z.object_position_max.y,
        "object_position range must be nonempty");
  check(z.object_mass_min <= z.object_mass_max, "object_mass range must be nonempty");
  check(z.object_mass_min > 0.0, "object_mass_min must be > 0");
}

EnvConfig parse_env_config(std::string_view text) {
  std::vector<Section> sections;
  std::set<std::string> seen;
  std::istringstream lines{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(lines, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigSyntaxError(line_no, "unterminated section header");
      std::string name(trim(line.substr(1, line.size() - 2)));
      const bool known = name == "env" || name == "robot" || name == "task" || name == "randomization" ||
                         (name.rfind("sensors.", 0) == 0 && name.size() > 8);
      if (!known) throw ConfigSyntaxError(line_no, "unknown section [" + name + "]");
      if (!seen.insert(name).second) throw ConfigSyntaxError(line_no, "duplicate section [" + name + "]");
      sections.emplace_back(std::move(name), line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigSyntaxError(line_no, "expected 'key = value'");
    if (sections.empty()) throw ConfigSyntaxError(line_no, "key outside of any section");
    std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigSyntaxError(line_no, "empty key");
    sections.back().add(std::move(key), std::string(trim(line.substr(eq + 1))), line_no);
  }

  auto find = [&](const std::string& name) -> Section* {
    for (auto& s : sections) {
      if (s.name() == name) return &s;
    }
    return nullptr;
  };

  EnvConfig cfg;
  auto* env = find("env");
  if (!env) throw ValidationError("missing [env] section");
  parse_env_section(*env, cfg);
  auto* robot = find("robot");
  if (!robot) throw ValidationError("missing [robot] section");
  parse_robot_section(*robot, cfg);
  auto* task = find("task");
  if (!task) throw ValidationError("missing [task] section");
  parse_task_section(*task, cfg);
  if (auto* rnd = find("randomization")) parse_randomization_section(*rnd, cfg);
  for (auto& s : sections) {
    if (s.name().rfind("sensors.", 0) == 0) cfg.sensors.push_back(parse_sensor_section(s, s.name().substr(8)));
  }
  for (const auto& s : sections) s.reject_unused();

  validate_env_config(cfg);
  return cfg;
}

EnvConfig load_env_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_env_config(buf.str());
}

std::string serialize_env_config(const EnvConfig& cfg) {
  std::ostringstream out;
  out << "[env]\n";
  out << "id = " << cfg.env_id << "\n";
  out << "backend = " << to_string(cfg.backend) << "\n";
  if (cfg.hardware_endpoint) out << "hardware_endpoint = " << *cfg.hardware_endpoint << "\n";
  out << "control_mode = " << to_string(cfg.control_mode) << "\n";
  out << "horizon = " << cfg.horizon << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "frame_skip = " << cfg.frame_skip << "\n";
  out << "dt = " << format_real(cfg.dt) << "\n";

  const auto& r = cfg.robot;
  out << "\n[robot]\n";
  out << "kind = " << to_string(r.kind) << "\n";
  out << "link_lengths = " << format_reals(r.link_lengths) << "\n";
  std::vector<double> limits;
  for (const auto& l : r.joint_limits) {
    limits.push_back(l.lo);
    limits.push_back(l.hi);
  }
  out << "joint_limits = " << format_reals(limits) << "\n";
  out << "torque_limits = " << format_reals(r.torque_limits) << "\n";
  out << "gripper_radius = " << format_real(r.gripper_radius) << "\n";
  out << "initial_joint_pos = " << format_reals(r.initial_joint_pos) << "\n";

  for (const auto& s : cfg.sensors) {
    out << "\n[sensors." << s.name << "]\n";
    out << "kind = " << to_string(s.kind) << "\n";
    out << "noise_sigma = " << format_real(s.noise_sigma) << "\n";
    out << "delay_steps = " << s.delay_steps << "\n";
    if (s.camera_resolution) {
      out << "resolution = " << s.camera_resolution->width << ", " << s.camera_resolution->height << "\n";
    }
  }

  const auto& t = cfg.task;
  out << "\n[task]\n";
  out << "kind = " << to_string(t.kind) << "\n";
  out << "target = " << format_vec2(t.target) << "\n";
  out << "success_radius = " << format_real(t.success_radius) << "\n";
  out << "goal_randomize = " << (t.goal_randomize ? "true" : "false") << "\n";
  out << "goal_min = " << format_vec2(t.goal_min) << "\n";
  out << "goal_max = " << format_vec2(t.goal_max) << "\n";
  if (t.bin_center) out << "bin_center = " << format_vec2(*t.bin_center) << "\n";
  if (t.bin_radius) out << "bin_radius = " << format_real(*t.bin_radius) << "\n";
  out << "object_count = " << t.object_count << "\n";
  out << "object_radius = " << format_real(t.object_radius) << "\n";
  out << "object_mass = " << format_real(t.object_mass) << "\n";
  out << "success_latch_steps = " << t.success_latch_steps << "\n";

  const auto& z = cfg.randomization;
  out << "\n[randomization]\n";
  out << "object_position_min = " << format_vec2(z.object_position_min) << "\n";
  out << "object_position_max = " << format_vec2(z.object_position_max) << "\n";
  out << "object_mass_min = " << format_real(z.object_mass_min) << "\n";
  out << "object_mass_max = " << format_real(z.object_mass_max) << "\n";
  out << "scene_palette_randomize = " << (z.scene_palette_randomize ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace hivekit
