#pragma once

#include <span>
#include <vector>

#include "hivekit/rng.hpp"
#include "hivekit/types.hpp"

namespace hivekit {

// Planar physics backend. The arm is a chain of unit-inertia joints in the
// horizontal plane (no gravity); the pendulum is a single link carrying a
// unit point mass at its tip, under gravity, with angles measured from +x
// (hanging straight down is -pi/2).
namespace physics {
constexpr double kPositionKp = 100.0;     // 1/s^2
constexpr double kPositionKd = 20.0;      // 1/s
constexpr double kVelocityGain = 20.0;    // 1/s, first-order velocity tracking
constexpr double kDiscDamping = 2.0;      // 1/s, linear damping of free discs
constexpr double kGravity = 9.81;         // m/s^2
constexpr double kPendulumDamping = 0.2;  // 1/s, viscous joint damping (pendulum only)
constexpr int kPaletteSize = 8;
}  // namespace physics

struct Kinematics {
  std::vector<Vec2> points;  // frame_0 (origin), frame_1, ..., frame_n == end effector
  Vec2 end_effector() const { return points.back(); }
};

/// frame_k = frame_{k-1} + L_k (cos S_k, sin S_k), S_k = theta_1 + ... + theta_k.
Kinematics forward_kinematics(const RobotModelSpec& model, std::span<const double> joint_pos);
Vec2 end_effector(const RobotModelSpec& model, std::span<const double> joint_pos);

/// d(EE)/d(theta) as a 2 x n row-major matrix.
std::vector<double> planar_jacobian(const RobotModelSpec& model, std::span<const double> joint_pos);

/// Joint inertia about the joint axis (1 for arm joints, L^2 for the pendulum).
double joint_inertia(const RobotModelSpec& model, std::size_t joint);

/// Canonical episode-start state: initial joint positions at rest, task
/// objects at the center of the randomization box, color i % palette.
SimState canonical_state(const EnvConfig& cfg);

/// One fixed-dt semi-implicit Euler step. The gripper field of the command is
/// ignored here; grasp/release is applied by the robot layer.
///
///   v' = (v + dt (a_ctrl + a_grav)) / (1 + dt c),   q' = q + dt v'
///
/// a_ctrl: Position kp (target - q) - kd v; Velocity kv (target - v);
/// Torque clamp(u, +-limit) / inertia. a_grav = -(g/L) sin(q + pi/2) for the
/// pendulum and 0 for arms. Positions are clamped to the joint limits and
/// outward velocity is zeroed. Free discs are damped and advected, then any
/// disc overlapping the end effector is projected out along the contact
/// normal (quasi-static; velocity untouched). A grasped disc is placed at
/// EE + grasp_offset and takes the finite-difference velocity.
SimState sim_step(const SimState& state, const RobotModelSpec& model, const RobotCommand& command, double dt);

/// Grasps the nearest disc whose center is within gripper_radius of the end
/// effector (ties: lowest index). No-op when something is already held.
SimState attempt_grasp(const SimState& state, const RobotModelSpec& model);
SimState release_grasp(const SimState& state);

/// Draws, in order: positions (x then y) for each object by index, masses by
/// index, then a Fisher-Yates shuffle of the color indices when palette
/// randomization is on. Velocities are zeroed.
SimState randomize_scene(const SimState& state, const RandomizationSpec& spec, CounterRng& rng);

/// Flat vector used for replay discrepancy: time, joint_pos, joint_vel,
/// (px, py, vx, vy) per object, grasped index or -1.
std::vector<double> state_vector(const SimState& state);

}  // namespace hivekit
