#include <gtest/gtest.h>

#include <cmath>

#include "hivekit/agents.hpp"
#include "hivekit/error.hpp"
#include "hivekit/mock_hardware.hpp"
#include "hivekit/robot.hpp"
#include "test_support.hpp"

using namespace hivekit;

namespace {

// Fixed, deterministic command script inside the joint limits.
std::vector<RobotCommand> script(const EnvConfig& cfg, std::size_t n) {
  const auto policy = make_random_policy(cfg);
  CounterRng rng(99, 0);
  std::vector<RobotCommand> out;
  ObsDict none;
  for (std::size_t t = 0; t < n; ++t) out.push_back(policy->act(none, rng));
  return out;
}

}  // namespace

TEST(Robot, SimResetIsDeterministic) {
  const auto cfg = testkit::shipped_registry().config("push-v0");
  auto a = robot_connect(cfg);
  auto b = robot_connect(cfg);
  EXPECT_EQ(a->backend(), Backend::Sim);
  EXPECT_EQ(a->reset(4), b->reset(4));
  EXPECT_EQ(a->reset(4), a->reset(4));
}

TEST(Robot, ModeAndDimensionChecks) {
  const auto cfg = testkit::shipped_registry().config("reach-v0");
  auto r = robot_connect(cfg);
  r->reset(0);
  EXPECT_THROW(r->apply_command({ControlMode::Torque, {0.0, 0.0}, {}}), ValidationError);
  EXPECT_THROW(r->apply_command({ControlMode::Position, {0.0}, {}}), ValidationError);
  EXPECT_THROW(r->apply_command({ControlMode::Position, {0.0, INFINITY}, {}}), ValidationError);
}

TEST(Robot, ResetClearsPartiallyFilledDelay) {
  auto cfg = testkit::shipped_registry().config("reach-v0");
  cfg.sensors[0].delay_steps = 4;
  auto r = robot_connect(cfg);
  const auto first = r->reset(0);
  for (int i = 0; i < 2; ++i) {
    r->apply_command({ControlMode::Position, {1.0, -1.0}, {}});
    r->get_sensors();
  }
  const auto again = r->reset(0);
  EXPECT_EQ(again.readings.at("qpos"), first.readings.at("qpos"));
  EXPECT_EQ(again.readings.at("qpos"), r->state().joint_pos);
}

// Same config except the backend flag: identical command script, identical frames.
TEST(Robot, SimAndLockstepHardwareAgree) {
  for (const char* id : {"reach-v0", "push-v0", "pickplace-v0", "pendulum-v0"}) {
    const auto sim_cfg = testkit::shipped_registry().config(id);
    MockHardwareServer srv(sim_cfg, {});
    srv.start();
    auto hw_cfg = sim_cfg;
    hw_cfg.backend = Backend::Hardware;
    hw_cfg.hardware_endpoint = srv.endpoint();

    auto sim = robot_connect(sim_cfg);
    auto hw = robot_connect(hw_cfg);
    EXPECT_EQ(hw->backend(), Backend::Hardware);
    auto compare = [&](const SensorFrame& a, const SensorFrame& b, std::size_t t) {
      ASSERT_EQ(a.readings.keys(), b.readings.keys());
      for (const auto& [name, va] : a.readings) {
        const auto& vb = b.readings.at(name);
        ASSERT_EQ(va.size(), vb.size());
        for (std::size_t k = 0; k < va.size(); ++k) ASSERT_NEAR(va[k], vb[k], 1e-9) << id << " t=" << t << " " << name;
      }
    };
    compare(sim->reset(2), hw->reset(2), 0);
    const auto cmds = script(sim_cfg, 200);
    for (std::size_t t = 0; t < cmds.size(); ++t) {
      sim->apply_command(cmds[t]);
      hw->apply_command(cmds[t]);
      compare(sim->get_sensors(), hw->get_sensors(), t + 1);
    }
    EXPECT_EQ(sim->state().joint_pos, hw->state().joint_pos) << id;
  }
}

TEST(Robot, RestoreIsSimOnly) {
  const auto cfg = testkit::shipped_registry().config("reach-v0");
  MockHardwareServer srv(cfg, {});
  srv.start();
  auto hw_cfg = cfg;
  hw_cfg.backend = Backend::Hardware;
  hw_cfg.hardware_endpoint = srv.endpoint();
  auto hw = robot_connect(hw_cfg);
  hw->reset(0);
  EXPECT_THROW(hw->restore(hw->state()), ValidationError);
}
