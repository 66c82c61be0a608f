#include "hivekit/types.hpp"

#include <algorithm>
#include <cmath>

#include "hivekit/error.hpp"

namespace hivekit {

double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::array<std::pair<std::string_view, E>, N>& table,
             std::string_view what) {
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  throw ValidationError("unknown " + std::string(what) + " '" + std::string(s) + "'");
}

template <typename E, std::size_t N>
std::string_view enum_name(E e, const std::array<std::pair<std::string_view, E>, N>& table) {
  for (const auto& [name, value] : table) {
    if (value == e) return name;
  }
  return "?";
}

constexpr std::array<std::pair<std::string_view, Backend>, 2> kBackends{{
    {"sim", Backend::Sim},
    {"hardware", Backend::Hardware},
}};
constexpr std::array<std::pair<std::string_view, ControlMode>, 3> kModes{{
    {"position", ControlMode::Position},
    {"velocity", ControlMode::Velocity},
    {"torque", ControlMode::Torque},
}};
constexpr std::array<std::pair<std::string_view, GripperAction>, 3> kGripper{{
    {"no_change", GripperAction::NoChange},
    {"grasp", GripperAction::Grasp},
    {"release", GripperAction::Release},
}};
constexpr std::array<std::pair<std::string_view, RobotKind>, 2> kRobotKinds{{
    {"planar_arm", RobotKind::PlanarArm},
    {"pendulum", RobotKind::Pendulum},
}};
constexpr std::array<std::pair<std::string_view, SensorKind>, 7> kSensorKinds{{
    {"joint_pos", SensorKind::JointPos},
    {"joint_vel", SensorKind::JointVel},
    {"end_effector_pos", SensorKind::EndEffectorPos},
    {"object_pose", SensorKind::ObjectPose},
    {"grid_camera", SensorKind::GridCamera},
    {"proprio", SensorKind::Proprio},
    {"goal_pos", SensorKind::GoalPos},
}};
constexpr std::array<std::pair<std::string_view, TaskKind>, 4> kTaskKinds{{
    {"reach", TaskKind::Reach},
    {"push", TaskKind::Push},
    {"pick_place", TaskKind::PickPlace},
    {"pendulum_swingup", TaskKind::PendulumSwingup},
}};
constexpr std::array<std::pair<std::string_view, TrajectorySource>, 4> kSources{{
    {"expert_policy", TrajectorySource::ExpertPolicy},
    {"human_teleop", TrajectorySource::HumanTeleop},
    {"scripted", TrajectorySource::Scripted},
    {"random", TrajectorySource::Random},
}};

}  // namespace

std::string_view to_string(Backend b) { return enum_name(b, kBackends); }
std::string_view to_string(ControlMode m) { return enum_name(m, kModes); }
std::string_view to_string(GripperAction g) { return enum_name(g, kGripper); }
std::string_view to_string(RobotKind k) { return enum_name(k, kRobotKinds); }
std::string_view to_string(SensorKind k) { return enum_name(k, kSensorKinds); }
std::string_view to_string(TaskKind k) { return enum_name(k, kTaskKinds); }
std::string_view to_string(TrajectorySource s) { return enum_name(s, kSources); }

Backend parse_backend(std::string_view s) { return parse_enum(s, kBackends, "backend"); }
ControlMode parse_control_mode(std::string_view s) { return parse_enum(s, kModes, "control mode"); }
RobotKind parse_robot_kind(std::string_view s) { return parse_enum(s, kRobotKinds, "robot kind"); }
SensorKind parse_sensor_kind(std::string_view s) { return parse_enum(s, kSensorKinds, "sensor kind"); }
TaskKind parse_task_kind(std::string_view s) { return parse_enum(s, kTaskKinds, "task kind"); }
TrajectorySource parse_trajectory_source(std::string_view s) {
  return parse_enum(s, kSources, "trajectory source");
}

const SensorSpec* EnvConfig::find_sensor(SensorKind kind) const {
  auto it = std::find_if(sensors.begin(), sensors.end(),
                         [kind](const SensorSpec& s) { return s.kind == kind; });
  return it == sensors.end() ? nullptr : &*it;
}

void ObsDict::set(std::string name, std::vector<double> value) {
  for (auto& entry : entries_) {
    if (entry.first == name) {
      entry.second = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(name), std::move(value));
}

const std::vector<double>* ObsDict::find(std::string_view name) const {
  for (const auto& entry : entries_) {
    if (entry.first == name) return &entry.second;
  }
  return nullptr;
}

const std::vector<double>& ObsDict::at(std::string_view name) const {
  if (const auto* v = find(name)) return *v;
  throw ValidationError("no observation named '" + std::string(name) + "'");
}

std::vector<std::string> ObsDict::keys() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& entry : entries_) out.push_back(entry.first);
  return out;
}

const InfoValue* StepResult::find_info(std::string_view key) const {
  for (const auto& [k, v] : info) {
    if (k == key) return &v;
  }
  return nullptr;
}

const std::string* Trajectory::find_metadata(std::string_view key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return &v;
  }
  return nullptr;
}

void Trajectory::set_metadata(std::string key, std::string value) {
  for (auto& [k, v] : metadata) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  metadata.emplace_back(std::move(key), std::move(value));
}

}  // namespace hivekit
