#include <gtest/gtest.h>

#include <cmath>

#include "hivekit/agents.hpp"
#include "hivekit/env.hpp"
#include "hivekit/error.hpp"
#include "hivekit/sim.hpp"
#include "hivekit/task.hpp"
#include "oracle_values.hpp"
#include "test_support.hpp"

using namespace hivekit;

namespace {

RobotModelSpec arm() {
  RobotModelSpec m;
  m.link_lengths = {0.5, 0.5};
  m.joint_limits = {{-3, 3}, {-3, 3}};
  m.torque_limits = {1, 1};
  m.initial_joint_pos = {0, 0};
  return m;
}

SimState at(std::vector<double> q) {
  SimState s;
  s.joint_pos = std::move(q);
  s.joint_vel.assign(s.joint_pos.size(), 0.0);
  return s;
}

}  // namespace

TEST(Task, ReachRewards) {
  TaskSpec t;
  t.kind = TaskKind::Reach;
  t.target = {1.0, 0.0};
  EXPECT_EQ(compute_reward(t, at({0.0, 0.0}), arm()), 0.0);
  t.target = {0.0, 0.0};
  auto m = arm();
  m.link_lengths = {0.5, 0.5};
  EXPECT_DOUBLE_EQ(compute_reward(t, at({0.0, 0.0}), m), -1.0);
}

TEST(Task, PushRewardZeroWhenSolved) {
  TaskSpec t;
  t.kind = TaskKind::Push;
  t.target = {1.0, 0.0};
  t.object_count = 1;
  auto s = at({0.0, 0.0});
  SimObject o;
  o.position = {1.0, 0.0};
  s.objects.push_back(o);
  EXPECT_EQ(compute_reward(t, s, arm()), 0.0);
}

TEST(Task, SuccessBoundaryIsStrict) {
  TaskSpec t;
  t.kind = TaskKind::Reach;
  t.success_radius = 0.25;
  t.target = {0.75, 0.0};  // exactly 0.25 from EE (1, 0)
  EXPECT_FALSE(compute_success(t, at({0.0, 0.0}), arm()));
  t.target = {0.7500001, 0.0};
  EXPECT_TRUE(compute_success(t, at({0.0, 0.0}), arm()));
}

TEST(Task, PickPlaceNeedsRelease) {
  TaskSpec t;
  t.kind = TaskKind::PickPlace;
  t.bin_center = Vec2{0.5, 0.5};
  t.bin_radius = 0.1;
  t.object_count = 1;
  auto s = at({0.0, 0.0});
  SimObject o;
  o.position = {0.5, 0.5};
  s.objects.push_back(o);
  EXPECT_TRUE(compute_success(t, s, arm()));
  s.grasped_object = 0;
  EXPECT_FALSE(compute_success(t, s, arm()));
}

TEST(Task, WrapAngle) {
  EXPECT_DOUBLE_EQ(wrap_angle(3 * std::numbers::pi), std::numbers::pi);
  EXPECT_DOUBLE_EQ(wrap_angle(-std::numbers::pi), std::numbers::pi);
  EXPECT_NEAR(wrap_angle(0.5 + 4 * std::numbers::pi), 0.5, 1e-12);
}

TEST(Env, StepBeforeResetAndAfterDone) {
  auto cfg = testkit::shipped_registry().config("reach-v0");
  cfg.horizon = 1;
  auto env = make_env(cfg);
  const RobotCommand cmd{ControlMode::Position, {0.0, 1.5}, {}};
  EXPECT_THROW(env->step(cmd), EpisodeError);
  env->reset();
  const auto r = env->step(cmd);
  EXPECT_TRUE(r.done);
  try {
    env->step(cmd);
    FAIL();
  } catch (const EpisodeError& e) {
    EXPECT_NE(std::string(e.what()).find("episode finished; call reset"), std::string::npos);
  }
}

TEST(Env, GoalStreamMatchesReference) {
  auto cfg = testkit::shipped_registry().config("reach-v0");
  cfg.seed = 7;
  const auto g = episode_goal(cfg, 2);
  EXPECT_EQ(g.x, oracle::kReachSeed7Episode2Goal[0]);
  EXPECT_EQ(g.y, oracle::kReachSeed7Episode2Goal[1]);
}

TEST(Env, ExpertSolvesReachFromCanonicalStart) {
  auto cfg = testkit::shipped_registry().config("reach-v0");
  cfg.horizon = 200;
  cfg.task.success_latch_steps = 200;  // keep stepping after success
  auto env = make_env(cfg);
  const auto expert = make_scripted_expert(cfg);
  auto r = env->reset(0);
  CounterRng rng = policy_rng(cfg.seed, 0);
  bool success = false;
  for (int t = 0; t < 200 && !r.done; ++t) {
    r = env->step(expert->act(r.obs, rng));
    success = r.success;
  }
  EXPECT_TRUE(success);
}

TEST(Env, SuccessIgnoresRewardFunction) {
  const auto& reg = testkit::shipped_registry();
  for (const char* id : {"reach-v0", "push-v0", "pickplace-v0", "pendulum-v0"}) {
    auto a = reg.make(id, 3);
    auto b = reg.make(id, 3);
    b->set_reward_fn([](const TaskSpec&, const SimState&, const RobotModelSpec&, std::span<const double>) { return 0.0; });
    const auto expert = make_scripted_expert(a->config());
    auto ra = a->reset(1);
    auto rb = b->reset(1);
    CounterRng rng = policy_rng(3, 1);
    while (!ra.done) {
      const auto cmd = expert->act(ra.obs, rng);
      ra = a->step(cmd);
      rb = b->step(cmd);
      ASSERT_EQ(ra.success, rb.success) << id;
      ASSERT_EQ(ra.done, rb.done) << id;
      ASSERT_EQ(rb.reward, 0.0);
    }
  }
}

TEST(Env, InfoCarriesSuccessKeys) {
  auto env = testkit::shipped_registry().make("reach-v0");
  env->reset();
  const auto r = env->step({ControlMode::Position, {0.0, 1.5}, {}});
  EXPECT_NE(r.find_info("solved"), nullptr);
}

TEST(Env, FixedScriptIsBitIdentical) {
  const auto& reg = testkit::shipped_registry();
  for (const auto& id : reg.ids()) {
    const auto policy = make_random_policy(reg.config(id));
    auto run = [&] {
      auto env = reg.make(id, 21);
      std::vector<StepResult> out{env->reset()};
      CounterRng rng(5, 5);
      for (int t = 0; t < 60; ++t) {
        if (env->done()) out.push_back(env->reset());
        out.push_back(env->step(policy->act(out.back().obs, rng)));
      }
      return out;
    };
    const auto a = run(), b = run();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      ASSERT_EQ(a[k].obs, b[k].obs) << id;
      ASSERT_EQ(a[k].reward, b[k].reward) << id;
    }
  }
}
