#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>

#include "hivekit/robot.hpp"
#include "hivekit/types.hpp"

namespace hivekit {

using RewardFn =
    std::function<double(const TaskSpec&, const SimState&, const RobotModelSpec&, std::span<const double>)>;

/// A task environment: one robot plus one task, stepped Gym-style.
///
/// obs keys are exactly the configured sensor names in declaration order.
/// Success comes from compute_success on the robot's state and never looks
/// at the reward; the reward function can be swapped with set_reward_fn.
class Env {
 public:
  Env(EnvConfig cfg, std::unique_ptr<Robot> robot);

  /// Starts the next episode (0, 1, 2, ... per instance).
  StepResult reset();
  /// Starts episode `episode`: scene and goal randomization and sensor noise
  /// are drawn from streams derived from (seed, episode).
  StepResult reset(std::uint64_t episode);
  /// Starts an episode from an exact simulator state and goal, skipping
  /// randomization (sim backend only). Used for replay.
  StepResult reset_to(const SimState& state, const Vec2& goal);

  /// Throws EpisodeError when no episode is active.
  StepResult step(const RobotCommand& action);

  void set_reward_fn(RewardFn fn) { reward_fn_ = std::move(fn); }

  const EnvConfig& config() const { return cfg_; }
  /// Task of the current episode, with the sampled goal in `target`.
  const TaskSpec& task() const { return task_; }
  const SimState& state() const { return robot_->state(); }
  Robot& robot() { return *robot_; }
  std::size_t action_dim() const { return cfg_.robot.joint_count(); }
  std::uint32_t steps() const { return steps_; }
  bool done() const { return done_; }
  bool active() const { return active_; }
  std::uint64_t episode() const { return episode_; }

 private:
  StepResult begin(SensorFrame frame);
  void fill_info(StepResult& r) const;

  EnvConfig cfg_;
  std::unique_ptr<Robot> robot_;
  TaskSpec task_;
  RewardFn reward_fn_;
  std::uint64_t episode_ = 0;
  std::uint64_t next_episode_ = 0;
  std::uint32_t steps_ = 0;
  std::uint32_t success_streak_ = 0;
  bool done_ = false;
  bool active_ = false;
};

/// Goal for episode `episode`: sampled uniformly from [goal_min, goal_max]
/// when goal_randomize is set, else the configured target.
Vec2 episode_goal(const EnvConfig& cfg, std::uint64_t episode);

}  // namespace hivekit
