#include "hivekit/task.hpp"

#include <cmath>
#include <numbers>

#include "hivekit/error.hpp"
#include "hivekit/sim.hpp"

namespace hivekit {

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(a, two_pi);
  if (w <= -std::numbers::pi) w += two_pi;
  if (w > std::numbers::pi) w -= two_pi;
  return w;
}

Vec2 task_goal(const TaskSpec& task) {
  if (task.kind == TaskKind::PickPlace && task.bin_center) return *task.bin_center;
  return task.target;
}

namespace {

const SimObject& first_object(const SimState& state) {
  if (state.objects.empty()) throw ValidationError("task needs at least one object in the scene");
  return state.objects.front();
}

}  // namespace

double compute_reward(const TaskSpec& task, const SimState& state, const RobotModelSpec& model,
                      std::span<const double> action) {
  switch (task.kind) {
    case TaskKind::Reach:
      return -norm(end_effector(model, state.joint_pos) - task.target);
    case TaskKind::Push:
    case TaskKind::PickPlace: {
      const Vec2 obj = first_object(state).position;
      const Vec2 ee = end_effector(model, state.joint_pos);
      return -norm(obj - task_goal(task)) - 0.5 * norm(ee - obj);
    }
    case TaskKind::PendulumSwingup: {
      const double err = wrap_angle(state.joint_pos[0] - task.target.x);
      const double qdot = state.joint_vel[0];
      const double u = action.empty() ? 0.0 : action[0];
      return -err * err - 0.01 * qdot * qdot - 0.001 * u * u;
    }
  }
  return 0.0;
}

bool compute_success(const TaskSpec& task, const SimState& state, const RobotModelSpec& model) {
  switch (task.kind) {
    case TaskKind::Reach:
      return norm(end_effector(model, state.joint_pos) - task.target) < task.success_radius;
    case TaskKind::Push:
      return norm(first_object(state).position - task.target) < task.success_radius;
    case TaskKind::PickPlace: {
      const bool held = state.grasped_object && *state.grasped_object == 0;
      return !held && norm(first_object(state).position - task_goal(task)) < task.bin_radius.value_or(0.0);
    }
    case TaskKind::PendulumSwingup: {
      const double err = wrap_angle(state.joint_pos[0] - task.target.x);
      return std::abs(err) < task.success_radius && std::abs(state.joint_vel[0]) < 1.0;
    }
  }
  return false;
}

}  // namespace hivekit
