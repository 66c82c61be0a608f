#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace hivekit {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
};

double norm(const Vec2& v);
double dot(const Vec2& a, const Vec2& b);

enum class Backend { Sim, Hardware };
enum class ControlMode : std::uint8_t { Position = 0, Velocity = 1, Torque = 2 };
enum class GripperAction : std::uint8_t { NoChange = 0, Grasp = 1, Release = 2 };
enum class RobotKind { PlanarArm, Pendulum };
enum class SensorKind { JointPos, JointVel, EndEffectorPos, ObjectPose, GridCamera, Proprio, GoalPos };
enum class TaskKind { Reach, Push, PickPlace, PendulumSwingup };
enum class TrajectorySource : std::uint8_t { ExpertPolicy = 0, HumanTeleop = 1, Scripted = 2, Random = 3 };

std::string_view to_string(Backend b);
std::string_view to_string(ControlMode m);
std::string_view to_string(GripperAction g);
std::string_view to_string(RobotKind k);
std::string_view to_string(SensorKind k);
std::string_view to_string(TaskKind k);
std::string_view to_string(TrajectorySource s);

/// Parses the lower-case names used by the config format and CLI. Throws
/// ValidationError on an unknown name.
Backend parse_backend(std::string_view s);
ControlMode parse_control_mode(std::string_view s);
RobotKind parse_robot_kind(std::string_view s);
SensorKind parse_sensor_kind(std::string_view s);
TaskKind parse_task_kind(std::string_view s);
TrajectorySource parse_trajectory_source(std::string_view s);

struct JointLimit {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const JointLimit&, const JointLimit&) = default;
};

struct RobotModelSpec {
  RobotKind kind = RobotKind::PlanarArm;
  std::vector<double> link_lengths;      // meters
  std::vector<JointLimit> joint_limits;  // radians
  std::vector<double> torque_limits;     // N*m
  double gripper_radius = 0.05;          // grasp capture radius, meters
  std::vector<double> initial_joint_pos; // radians; empty means all zero

  std::size_t joint_count() const { return link_lengths.size(); }
  friend bool operator==(const RobotModelSpec&, const RobotModelSpec&) = default;
};

struct CameraResolution {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  friend bool operator==(const CameraResolution&, const CameraResolution&) = default;
};

struct SensorSpec {
  std::string name;
  SensorKind kind = SensorKind::JointPos;
  double noise_sigma = 0.0;
  std::uint32_t delay_steps = 0;
  std::optional<CameraResolution> camera_resolution;

  friend bool operator==(const SensorSpec&, const SensorSpec&) = default;
};

struct TaskSpec {
  TaskKind kind = TaskKind::Reach;
  Vec2 target;                  // meters; x holds the angle for PendulumSwingup
  double success_radius = 0.05; // meters (radians for PendulumSwingup)
  bool goal_randomize = false;
  Vec2 goal_min;
  Vec2 goal_max;
  std::optional<Vec2> bin_center;
  std::optional<double> bin_radius;
  std::uint32_t object_count = 0;
  double object_radius = 0.05;
  double object_mass = 0.2;
  std::uint32_t success_latch_steps = 5;

  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

struct RandomizationSpec {
  Vec2 object_position_min;
  Vec2 object_position_max;
  double object_mass_min = 0.2;
  double object_mass_max = 0.2;
  bool scene_palette_randomize = false;

  friend bool operator==(const RandomizationSpec&, const RandomizationSpec&) = default;
};

struct EnvConfig {
  std::string env_id;
  RobotModelSpec robot;
  Backend backend = Backend::Sim;
  std::optional<std::string> hardware_endpoint;  // host:port
  ControlMode control_mode = ControlMode::Position;
  std::vector<SensorSpec> sensors;
  TaskSpec task;
  std::uint32_t horizon = 100;
  std::uint64_t seed = 0;
  RandomizationSpec randomization;
  std::uint32_t frame_skip = 1;
  double dt = 0.01;

  const SensorSpec* find_sensor(SensorKind kind) const;
  friend bool operator==(const EnvConfig&, const EnvConfig&) = default;
};

/// Insertion-ordered name -> vector map used for observations and sensor readings.
class ObsDict {
 public:
  using Entry = std::pair<std::string, std::vector<double>>;

  void set(std::string name, std::vector<double> value);
  const std::vector<double>& at(std::string_view name) const;
  const std::vector<double>* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::vector<std::string> keys() const;
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  friend bool operator==(const ObsDict&, const ObsDict&) = default;

 private:
  std::vector<Entry> entries_;
};

using InfoValue = std::variant<bool, double, std::string>;

struct StepResult {
  ObsDict obs;
  double reward = 0.0;
  bool success = false;
  bool done = false;
  std::vector<std::pair<std::string, InfoValue>> info;

  const InfoValue* find_info(std::string_view key) const;
};

struct RobotCommand {
  ControlMode mode = ControlMode::Position;
  std::vector<double> values;
  GripperAction gripper = GripperAction::NoChange;

  friend bool operator==(const RobotCommand&, const RobotCommand&) = default;
};

struct SensorFrame {
  double timestamp = 0.0;
  ObsDict readings;

  friend bool operator==(const SensorFrame&, const SensorFrame&) = default;
};

/// Counter-based generator state: seed, stream, counter, reserved.
using RngState = std::array<std::uint64_t, 4>;

struct SimObject {
  Vec2 position;
  Vec2 velocity;
  double radius = 0.05;
  double mass = 0.2;
  std::uint8_t color_index = 0;

  friend bool operator==(const SimObject&, const SimObject&) = default;
};

struct SimState {
  double time = 0.0;
  std::vector<double> joint_pos;
  std::vector<double> joint_vel;
  std::vector<SimObject> objects;
  std::optional<std::size_t> grasped_object;
  Vec2 grasp_offset;  // disc center minus end effector while grasped
  RngState rng_state{};

  friend bool operator==(const SimState&, const SimState&) = default;
};

struct SensorSeries {
  std::string name;
  std::size_t dim = 0;
  std::vector<double> values;  // T x dim, row-major

  friend bool operator==(const SensorSeries&, const SensorSeries&) = default;
};

/// One episode. observations[t] is what the policy saw before actions[t];
/// states[t] is the simulator state after actions[t] was applied.
struct Trajectory {
  std::string env_id;
  std::uint64_t seed = 0;
  std::vector<SensorSeries> observations;
  std::size_t action_dim = 0;
  std::vector<double> actions;  // T x action_dim, row-major
  std::vector<double> rewards;
  std::vector<std::uint8_t> successes;
  SimState initial_state;
  std::vector<SimState> states;
  TrajectorySource source = TrajectorySource::Scripted;
  std::vector<std::pair<std::string, std::string>> metadata;

  std::size_t length() const { return rewards.size(); }
  std::span<const double> action(std::size_t t) const {
    return {actions.data() + t * action_dim, action_dim};
  }
  const std::string* find_metadata(std::string_view key) const;
  void set_metadata(std::string key, std::string value);

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

}  // namespace hivekit
