#pragma once

#include <span>

#include "hivekit/types.hpp"

namespace hivekit {

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// Point the task is trying to bring the end effector / object to: the bin
/// center for PickPlace, `target` otherwise.
Vec2 task_goal(const TaskSpec& task);

/// Dense shaping reward (SI units). `action` is the command just applied and
/// only enters the pendulum's effort term.
///
///   Reach      -|EE - target|
///   Push       -|obj0 - goal| - 0.5 |EE - obj0|
///   PickPlace  same as Push, goal = bin center
///   Pendulum   -err^2 - 0.01 qdot^2 - 0.001 u^2,  err = wrap(q - target)
double compute_reward(const TaskSpec& task, const SimState& state, const RobotModelSpec& model,
                      std::span<const double> action = {});

/// Success predicate. Reads only the state, never the reward. Boundaries are
/// strict: a distance equal to success_radius is a failure.
///
///   Reach      |EE - target| < r
///   Push       |obj0 - target| < r
///   PickPlace  |obj0 - bin| < bin_radius and obj0 not grasped
///   Pendulum   |err| < r and |qdot| < 1 rad/s
bool compute_success(const TaskSpec& task, const SimState& state, const RobotModelSpec& model);

}  // namespace hivekit
