#include "hivekit/env.hpp"

#include "hivekit/error.hpp"
#include "hivekit/rng.hpp"
#include "hivekit/task.hpp"

namespace hivekit {

Vec2 episode_goal(const EnvConfig& cfg, std::uint64_t episode) {
  const auto& t = cfg.task;
  if (t.kind == TaskKind::PickPlace) return task_goal(t);
  if (!t.goal_randomize) return t.target;
  CounterRng rng(cfg.seed, rng_stream::goal(episode));
  const double x = rng.uniform(t.goal_min.x, t.goal_max.x);
  const double y = rng.uniform(t.goal_min.y, t.goal_max.y);
  return {x, y};
}

Env::Env(EnvConfig cfg, std::unique_ptr<Robot> robot)
    : cfg_(std::move(cfg)), robot_(std::move(robot)), task_(cfg_.task), reward_fn_(compute_reward) {}

StepResult Env::reset() { return reset(next_episode_); }

StepResult Env::reset(std::uint64_t episode) {
  episode_ = episode;
  next_episode_ = episode + 1;
  const Vec2 goal = episode_goal(cfg_, episode);
  if (task_.kind != TaskKind::PickPlace) task_.target = goal;
  robot_->set_goal(goal);
  return begin(robot_->reset(episode));
}

StepResult Env::reset_to(const SimState& state, const Vec2& goal) {
  if (task_.kind != TaskKind::PickPlace) task_.target = goal;
  robot_->set_goal(goal);
  return begin(robot_->restore(state));
}

StepResult Env::begin(SensorFrame frame) {
  steps_ = 0;
  success_streak_ = 0;
  done_ = false;
  active_ = true;
  StepResult r;
  r.obs = std::move(frame.readings);
  r.success = compute_success(task_, robot_->state(), cfg_.robot);
  fill_info(r);
  return r;
}

StepResult Env::step(const RobotCommand& action) {
  if (!active_ || done_) throw EpisodeError("episode finished; call reset");
  robot_->apply_command(action);
  SensorFrame frame = robot_->get_sensors();
  const SimState& s = robot_->state();

  StepResult r;
  r.obs = std::move(frame.readings);
  r.reward = reward_fn_(task_, s, cfg_.robot, action.values);
  r.success = compute_success(task_, s, cfg_.robot);
  ++steps_;

  bool latched = false;
  if (task_.kind == TaskKind::PickPlace) {
    success_streak_ = r.success ? success_streak_ + 1 : 0;
    latched = success_streak_ >= task_.success_latch_steps;
  }
  done_ = steps_ >= cfg_.horizon || latched;
  r.done = done_;
  fill_info(r);
  return r;
}

void Env::fill_info(StepResult& r) const {
  r.info.emplace_back("solved", r.success);
  r.info.emplace_back("time", robot_->state().time);
  r.info.emplace_back("step", static_cast<double>(steps_));
}

}  // namespace hivekit
