#include "hivekit/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hivekit/error.hpp"

namespace hivekit {

namespace {

void require_dims(const RobotModelSpec& model, std::size_t n, const char* what) {
  if (n != model.joint_count()) {
    throw ValidationError(std::string(what) + " has dimension " + std::to_string(n) + ", robot has " +
                          std::to_string(model.joint_count()) + " joints");
  }
}

}  // namespace

Kinematics forward_kinematics(const RobotModelSpec& model, std::span<const double> joint_pos) {
  require_dims(model, joint_pos.size(), "joint_pos");
  Kinematics k;
  k.points.reserve(joint_pos.size() + 1);
  Vec2 frame{0.0, 0.0};
  k.points.push_back(frame);
  double angle = 0.0;
  for (std::size_t i = 0; i < joint_pos.size(); ++i) {
    angle += joint_pos[i];
    frame = {frame.x + model.link_lengths[i] * std::cos(angle), frame.y + model.link_lengths[i] * std::sin(angle)};
    k.points.push_back(frame);
  }
  return k;
}

Vec2 end_effector(const RobotModelSpec& model, std::span<const double> joint_pos) {
  return forward_kinematics(model, joint_pos).end_effector();
}

std::vector<double> planar_jacobian(const RobotModelSpec& model, std::span<const double> joint_pos) {
  require_dims(model, joint_pos.size(), "joint_pos");
  const auto n = joint_pos.size();
  std::vector<double> jac(2 * n, 0.0);
  // Column i sums the contributions of links i..n-1.
  double angle = 0.0;
  std::vector<double> sx(n), sy(n);
  for (std::size_t k = 0; k < n; ++k) {
    angle += joint_pos[k];
    sx[k] = -model.link_lengths[k] * std::sin(angle);
    sy[k] = model.link_lengths[k] * std::cos(angle);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i; k < n; ++k) {
      jac[i] += sx[k];
      jac[n + i] += sy[k];
    }
  }
  return jac;
}

double joint_inertia(const RobotModelSpec& model, std::size_t joint) {
  if (model.kind == RobotKind::Pendulum) return model.link_lengths[joint] * model.link_lengths[joint];
  return 1.0;
}

SimState canonical_state(const EnvConfig& cfg) {
  SimState s;
  s.joint_pos = cfg.robot.initial_joint_pos;
  if (s.joint_pos.empty()) s.joint_pos.assign(cfg.robot.joint_count(), 0.0);
  s.joint_vel.assign(cfg.robot.joint_count(), 0.0);
  const auto& box = cfg.randomization;
  const Vec2 center{0.5 * (box.object_position_min.x + box.object_position_max.x),
                    0.5 * (box.object_position_min.y + box.object_position_max.y)};
  for (std::uint32_t k = 0; k < cfg.task.object_count; ++k) {
    SimObject obj;
    obj.position = center;
    obj.radius = cfg.task.object_radius;
    obj.mass = cfg.task.object_mass;
    obj.color_index = static_cast<std::uint8_t>(k % physics::kPaletteSize);
    s.objects.push_back(obj);
  }
  return s;
}

SimState sim_step(const SimState& state, const RobotModelSpec& model, const RobotCommand& command, double dt) {
  require_dims(model, command.values.size(), "command");
  require_dims(model, state.joint_pos.size(), "state.joint_pos");
  for (double v : command.values) {
    if (!std::isfinite(v)) throw ValidationError("command contains a non-finite component");
  }
  if (!(dt > 0.0)) throw ValidationError("dt must be > 0");

  using namespace physics;
  SimState next = state;
  const bool pendulum = model.kind == RobotKind::Pendulum;
  const double damping = pendulum ? kPendulumDamping : 0.0;

  for (std::size_t i = 0; i < model.joint_count(); ++i) {
    const double q = state.joint_pos[i];
    const double v = state.joint_vel[i];
    const double u = command.values[i];
    double accel = 0.0;
    switch (command.mode) {
      case ControlMode::Position:
        accel = kPositionKp * (u - q) - kPositionKd * v;
        break;
      case ControlMode::Velocity:
        accel = kVelocityGain * (u - v);
        break;
      case ControlMode::Torque: {
        const double limit = model.torque_limits[i];
        accel = std::clamp(u, -limit, limit) / joint_inertia(model, i);
        break;
      }
    }
    if (pendulum) accel += -(kGravity / model.link_lengths[i]) * std::sin(q + std::numbers::pi / 2.0);

    double v_next = (v + dt * accel) / (1.0 + dt * damping);
    double q_next = q + dt * v_next;
    const auto& lim = model.joint_limits[i];
    if (q_next < lim.lo) {
      q_next = lim.lo;
      if (v_next < 0.0) v_next = 0.0;
    } else if (q_next > lim.hi) {
      q_next = lim.hi;
      if (v_next > 0.0) v_next = 0.0;
    }
    next.joint_pos[i] = q_next;
    next.joint_vel[i] = v_next;
  }

  const auto kin = forward_kinematics(model, next.joint_pos);
  const Vec2 ee = kin.end_effector();
  const auto n_links = kin.points.size() - 1;
  const Vec2 last_link = kin.points[n_links] - kin.points[n_links - 1];
  const double last_len = norm(last_link);
  const Vec2 fallback_normal = last_len > 0.0 ? last_link * (1.0 / last_len) : Vec2{1.0, 0.0};

  const double decay = std::max(0.0, 1.0 - kDiscDamping * dt);
  for (std::size_t k = 0; k < next.objects.size(); ++k) {
    auto& obj = next.objects[k];
    if (next.grasped_object && *next.grasped_object == k) {
      const Vec2 p = ee + next.grasp_offset;
      obj.velocity = (p - obj.position) * (1.0 / dt);
      obj.position = p;
      continue;
    }
    obj.velocity = obj.velocity * decay;
    obj.position = obj.position + obj.velocity * dt;
    const Vec2 d = obj.position - ee;
    const double dist = norm(d);
    if (dist < obj.radius) {
      const Vec2 normal = dist > 0.0 ? d * (1.0 / dist) : fallback_normal;
      obj.position = ee + normal * obj.radius;
    }
  }
  next.time = state.time + dt;
  return next;
}

SimState attempt_grasp(const SimState& state, const RobotModelSpec& model) {
  if (state.grasped_object) return state;
  const Vec2 ee = end_effector(model, state.joint_pos);
  std::optional<std::size_t> best;
  double best_dist = 0.0;
  for (std::size_t k = 0; k < state.objects.size(); ++k) {
    const double dist = norm(state.objects[k].position - ee);
    if (dist <= model.gripper_radius && (!best || dist < best_dist)) {
      best = k;
      best_dist = dist;
    }
  }
  if (!best) return state;
  SimState next = state;
  next.grasped_object = best;
  next.grasp_offset = state.objects[*best].position - ee;
  return next;
}

SimState release_grasp(const SimState& state) {
  SimState next = state;
  next.grasped_object.reset();
  next.grasp_offset = {};
  return next;
}

SimState randomize_scene(const SimState& state, const RandomizationSpec& spec, CounterRng& rng) {
  SimState next = state;
  for (auto& obj : next.objects) {
    const double x = rng.uniform(spec.object_position_min.x, spec.object_position_max.x);
    const double y = rng.uniform(spec.object_position_min.y, spec.object_position_max.y);
    obj.position = {x, y};
    obj.velocity = {};
  }
  for (auto& obj : next.objects) obj.mass = rng.uniform(spec.object_mass_min, spec.object_mass_max);
  if (spec.scene_palette_randomize && next.objects.size() > 1) {
    for (std::size_t i = next.objects.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.below(i + 1));
      std::swap(next.objects[i].color_index, next.objects[j].color_index);
    }
  }
  next.grasped_object.reset();
  next.grasp_offset = {};
  next.rng_state = rng.state();
  return next;
}

std::vector<double> state_vector(const SimState& state) {
  std::vector<double> v;
  v.reserve(2 + state.joint_pos.size() * 2 + state.objects.size() * 4);
  v.push_back(state.time);
  v.insert(v.end(), state.joint_pos.begin(), state.joint_pos.end());
  v.insert(v.end(), state.joint_vel.begin(), state.joint_vel.end());
  for (const auto& obj : state.objects) {
    v.push_back(obj.position.x);
    v.push_back(obj.position.y);
    v.push_back(obj.velocity.x);
    v.push_back(obj.velocity.y);
  }
  v.push_back(state.grasped_object ? static_cast<double>(*state.grasped_object) : -1.0);
  return v;
}

}  // namespace hivekit
