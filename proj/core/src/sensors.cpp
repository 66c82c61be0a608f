#include "hivekit/sensors.hpp"

#include <algorithm>

#include "hivekit/error.hpp"
#include "hivekit/sim.hpp"

namespace hivekit {

std::size_t sensor_dim(const EnvConfig& cfg, const SensorSpec& spec) {
  const auto n = cfg.robot.joint_count();
  switch (spec.kind) {
    case SensorKind::JointPos:
    case SensorKind::JointVel:
      return n;
    case SensorKind::Proprio:
      return 2 * n;
    case SensorKind::EndEffectorPos:
    case SensorKind::GoalPos:
      return 2;
    case SensorKind::ObjectPose:
      return 2 * cfg.task.object_count;
    case SensorKind::GridCamera:
      return static_cast<std::size_t>(spec.camera_resolution->width) * spec.camera_resolution->height;
  }
  return 0;
}

ObsDict raw_readings(const EnvConfig& cfg, const SimState& state, const Vec2& goal, const CameraView& view) {
  ObsDict out;
  std::optional<Kinematics> kin;
  auto kinematics = [&]() -> const Kinematics& {
    if (!kin) kin = forward_kinematics(cfg.robot, state.joint_pos);
    return *kin;
  };
  for (const auto& spec : cfg.sensors) {
    std::vector<double> v;
    switch (spec.kind) {
      case SensorKind::JointPos:
        v = state.joint_pos;
        break;
      case SensorKind::JointVel:
        v = state.joint_vel;
        break;
      case SensorKind::Proprio:
        v = state.joint_pos;
        v.insert(v.end(), state.joint_vel.begin(), state.joint_vel.end());
        break;
      case SensorKind::EndEffectorPos: {
        const Vec2 ee = kinematics().end_effector();
        v = {ee.x, ee.y};
        break;
      }
      case SensorKind::GoalPos:
        v = {goal.x, goal.y};
        break;
      case SensorKind::ObjectPose:
        for (const auto& obj : state.objects) {
          v.push_back(obj.position.x);
          v.push_back(obj.position.y);
        }
        break;
      case SensorKind::GridCamera:
        v = rasterize_scene(kinematics().points, state.objects, view, spec.camera_resolution->width,
                            spec.camera_resolution->height);
        break;
    }
    out.set(spec.name, std::move(v));
  }
  return out;
}

SensorPipeline::SensorPipeline(std::vector<SensorSpec> specs)
    : specs_(std::move(specs)), delay_lines_(specs_.size()) {}

void SensorPipeline::reset(CounterRng noise_rng) {
  rng_ = noise_rng;
  for (auto& line : delay_lines_) line.clear();
}

ObsDict SensorPipeline::process(const ObsDict& truth) {
  if (truth.size() != specs_.size()) throw ValidationError("sensor frame does not match declared sensors");
  ObsDict out;
  std::size_t i = 0;
  for (const auto& [name, value] : truth) {
    const auto& spec = specs_[i];
    auto& line = delay_lines_[i];
    ++i;
    if (name != spec.name) throw ValidationError("sensor '" + name + "' out of declaration order");
    line.push_back(value);
    while (line.size() > static_cast<std::size_t>(spec.delay_steps) + 1) line.pop_front();
    std::vector<double> reading = line.front();
    if (noise_enabled_ && spec.noise_sigma > 0.0) {
      for (auto& x : reading) x += spec.noise_sigma * rng_.normal();
      if (spec.kind == SensorKind::GridCamera) {
        for (auto& x : reading) x = std::clamp(x, 0.0, 1.0);
      }
    }
    out.set(name, std::move(reading));
  }
  return out;
}

}  // namespace hivekit
