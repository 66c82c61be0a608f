#include <gtest/gtest.h>

#include <cmath>

#include "hivekit/agents.hpp"
#include "hivekit/error.hpp"
#include "hivekit/registry.hpp"
#include "hivekit/sim.hpp"
#include "oracle_values.hpp"
#include "test_support.hpp"

using namespace hivekit;

namespace {

const EnvRegistry& reg() { return testkit::shipped_registry(); }

// One trajectory whose sensor "x" carries the given rows.
Trajectory synthetic(const std::vector<std::vector<double>>& feats, const std::vector<std::vector<double>>& acts) {
  Trajectory t;
  t.env_id = "synthetic-v0";
  SensorSeries s{"x", feats.front().size(), {}};
  for (const auto& f : feats) s.values.insert(s.values.end(), f.begin(), f.end());
  t.observations.push_back(s);
  t.action_dim = acts.front().size();
  for (const auto& a : acts) t.actions.insert(t.actions.end(), a.begin(), a.end());
  t.rewards.assign(feats.size(), 0.0);
  t.successes.assign(feats.size(), 0);
  return t;
}

}  // namespace

TEST(Agents, DlsStepMovesTowardTarget) {
  const auto& m = reg().config("reach-v0").robot;
  const std::vector<double> q{0.3, 1.2};
  const Vec2 e{0.01, -0.02};
  const auto dq = dls_step(m, q, e, 1e-6);
  const std::vector<double> q2{q[0] + dq[0], q[1] + dq[1]};
  const auto moved = end_effector(m, q2) - end_effector(m, q);
  EXPECT_NEAR(moved.x, e.x, 1e-3);
  EXPECT_NEAR(moved.y, e.y, 1e-3);
}

TEST(Agents, ReachExpertFixedPoint) {
  const auto& cfg = reg().config("reach-v0");
  const auto expert = make_scripted_expert(cfg);
  const std::vector<double> q{0.4, 0.9};
  const auto ee = end_effector(cfg.robot, q);
  ObsDict obs;
  obs.set("qpos", q);
  obs.set("qvel", {0.0, 0.0});
  obs.set("ee", {ee.x, ee.y});
  obs.set("goal", {ee.x, ee.y});
  CounterRng rng(0, 0);
  const auto cmd = expert->act(obs, rng);
  ASSERT_EQ(cmd.values.size(), 2u);
  EXPECT_LT(std::hypot(cmd.values[0] - q[0], cmd.values[1] - q[1]), 1e-6);
}

TEST(Agents, PickPlaceNeverGraspsFromAfar) {
  auto env = reg().make("pickplace-v0", 4);
  const auto expert = make_scripted_expert(env->config());
  const double grip = env->config().robot.gripper_radius;
  std::size_t grasps = 0;
  for (std::uint64_t ep = 0; ep < 10; ++ep) {
    auto r = env->reset(ep);
    CounterRng rng = policy_rng(4, ep);
    while (!r.done) {
      const auto cmd = expert->act(r.obs, rng);
      if (cmd.gripper == GripperAction::Grasp) {
        ++grasps;
        const auto ee = end_effector(env->config().robot, env->state().joint_pos);
        ASSERT_LE(norm(env->state().objects[0].position - ee), grip);
      }
      r = env->step(cmd);
    }
  }
  EXPECT_GT(grasps, 0u);
}

TEST(Agents, ExpertsSucceedOnEveryTask) {
  for (const char* id : {"reach-v0", "push-v0", "pickplace-v0", "pendulum-v0"}) {
    const auto expert = make_scripted_expert(reg().config(id));
    const auto rep = evaluate_policy(reg(), *expert, id, {25, 0, std::nullopt});
    EXPECT_GE(rep.success_rate, 0.92) << id;
  }
}

TEST(Agents, RandomPolicyRarelySucceeds) {
  auto cfg = reg().config("reach-v0");
  cfg.env_id = "tightreach-v0";
  cfg.task.success_radius = 0.01;
  EnvRegistry r;
  r.add(cfg);
  const auto rep = evaluate_policy(r, *make_random_policy(cfg), "tightreach-v0", {25, 0, std::nullopt});
  EXPECT_LE(rep.success_rate, 0.04);
}

TEST(Agents, EmptyEvaluationIsAnError) {
  const auto p = make_random_policy(reg().config("reach-v0"));
  try {
    evaluate_policy(reg(), *p, "reach-v0", {0, 0, std::nullopt});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_STREQ(e.what(), "empty evaluation");
  }
}

TEST(Agents, ActionRowCodec) {
  const auto& cfg = reg().config("pickplace-v0");
  ASSERT_EQ(trajectory_action_dim(cfg), 3u);
  const RobotCommand cmd{cfg.control_mode, {0.25, -1.0}, GripperAction::Release};
  const auto row = action_row(cfg, cmd);
  EXPECT_EQ(row, (std::vector<double>{0.25, -1.0, 2.0}));
  EXPECT_EQ(command_from_row(cfg, row), cmd);
  EXPECT_EQ(trajectory_action_dim(reg().config("reach-v0")), 2u);
}

TEST(BC, RecoversRealizableLinearPolicy) {
  const double W[2][4] = {{0.5, -1.25, 2.0, 0.1}, {-0.3, 0.7, 0.05, -0.9}};
  CounterRng rng(3, 3);
  std::vector<Trajectory> trajs;
  for (int k = 0; k < 3; ++k) {
    std::vector<std::vector<double>> f, a;
    for (int t = 0; t < 40; ++t) {
      std::vector<double> x{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      f.push_back(x);
      std::vector<double> y(2);
      for (int i = 0; i < 2; ++i) y[i] = W[i][0] * x[0] + W[i][1] * x[1] + W[i][2] * x[2] + W[i][3];
      a.push_back(y);
    }
    trajs.push_back(synthetic(f, a));
  }
  const auto model = train_bc(trajs, 1e-8, ControlMode::Position);
  ASSERT_EQ(model.action_dim, 2u);
  ASSERT_EQ(model.feature_dim, 4u);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(model.weights[i * 4 + j], W[i][j], 1e-6);
  }
}

TEST(BC, MatchesReferenceRidgeSolution) {
  std::vector<std::vector<double>> f, a;
  for (int t = 0; t < 40; ++t) {
    const double f0 = std::sin(0.3 * t), f1 = std::cos(0.17 * t) * 0.5;
    f.push_back({f0, f1});
    a.push_back({0.7 * f0 - 0.2 * f1 + 0.1 + 0.01 * std::sin(1.3 * t), -0.4 * f0 + 0.9 * f1 - 0.3});
  }
  const std::vector<Trajectory> trajs{synthetic(f, a)};
  const auto model = train_bc(trajs, oracle::kRidgeLambda, ControlMode::Position);
  ASSERT_EQ(model.weights.size(), 6u);
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(model.weights[k], oracle::kRidgeWeights[k], 1e-10);
}

TEST(BC, HugeLambdaShrinksToZero) {
  std::vector<std::vector<double>> f, a;
  for (int t = 0; t < 30; ++t) {
    f.push_back({t * 0.1, 1.0 - t * 0.05});
    a.push_back({2.0 + t * 0.3});
  }
  const std::vector<Trajectory> trajs{synthetic(f, a)};
  const auto model = train_bc(trajs, 1e12, ControlMode::Position);
  for (double w : model.weights) EXPECT_LT(std::abs(w), 1e-9);
}

TEST(BC, SolutionIsAMinimumOfTheObjective) {
  std::vector<std::vector<double>> f, a;
  CounterRng rng(8, 1);
  for (int t = 0; t < 50; ++t) {
    f.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    a.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
  }
  const std::vector<Trajectory> trajs{synthetic(f, a)};
  const auto model = train_bc(trajs, 0.1, ControlMode::Position);
  const double best = bc_objective(model, trajs);
  for (std::size_t k = 0; k < model.weights.size(); ++k) {
    for (double eps : {1e-3, -1e-3}) {
      auto m = model;
      m.weights[k] += eps;
      EXPECT_GT(bc_objective(m, trajs), best);
    }
  }
}

TEST(BC, RejectsBadInput) {
  const std::vector<Trajectory> none;
  EXPECT_THROW(train_bc(none, 1e-3, ControlMode::Position), ValidationError);
  const std::vector<Trajectory> one{synthetic({{1.0}}, {{1.0}})};
  EXPECT_THROW(train_bc(one, 0.0, ControlMode::Position), ValidationError);
}

TEST(BC, ModelFileRoundTrip) {
  testkit::TempDir dir;
  LinearBCModel m;
  m.action_dim = 2;
  m.feature_dim = 3;
  m.weights = {1, 2, 3, 4, 5, 6.5};
  m.lambda = 0.125;
  m.mode = ControlMode::Velocity;
  m.feature_keys = {{"qpos", 2}};
  save_bc_model(dir / "m.rbc", m);
  EXPECT_EQ(load_bc_model(dir / "m.rbc"), m);
}

TEST(Eval, ReportJson) {
  const auto expert = make_scripted_expert(reg().config("reach-v0"));
  const auto rep = evaluate_policy(reg(), *expert, "reach-v0", {3, 1, std::nullopt});
  EXPECT_EQ(rep.episodes.size(), 3u);
  const auto j = rep.to_json();
  EXPECT_NE(j.find("\"success_rate\""), std::string::npos);
  EXPECT_NE(j.find("hivekit.eval/1"), std::string::npos);
}
