#include <benchmark/benchmark.h>

#include "hivekit/agents.hpp"
#include "hivekit/camera.hpp"
#include "hivekit/dataset.hpp"
#include "hivekit/registry.hpp"
#include "hivekit/sim.hpp"

using namespace hivekit;

namespace {

const EnvRegistry& registry() {
  static const EnvRegistry reg = EnvRegistry::from_directory(HIVEKIT_BENCH_CONFIG_DIR);
  return reg;
}

void BM_SimStep(benchmark::State& state) {
  const auto& cfg = registry().config("push-v0");
  auto s = canonical_state(cfg);
  const RobotCommand cmd{ControlMode::Position, {0.3, 1.1}, GripperAction::NoChange};
  for (auto _ : state) {
    s = sim_step(s, cfg.robot, cmd, cfg.dt);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_SimStep);

// One env step with a random policy; arg 0 = state obs, 1 = 84x84 camera.
void BM_EnvStep(benchmark::State& state) {
  const std::string id = state.range(0) ? "reach_v2d-v0" : "reach-v0";
  auto env = registry().make(id, 0);
  const auto policy = make_random_policy(env->config());
  CounterRng rng(0, 0);
  auto r = env->reset();
  for (auto _ : state) {
    if (r.done) r = env->reset();
    r = env->step(policy->act(r.obs, rng));
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EnvStep)->Arg(0)->Arg(1);

void BM_Rasterize(benchmark::State& state) {
  const auto& cfg = registry().config("pickplace_v2d-v0");
  const auto s = canonical_state(cfg);
  const auto kin = forward_kinematics(cfg.robot, s.joint_pos);
  const auto view = default_camera_view(cfg.robot);
  const auto side = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rasterize_scene(kin.points, s.objects, view, side, side));
}
BENCHMARK(BM_Rasterize)->Arg(32)->Arg(84)->Arg(128);

void BM_Sha256(benchmark::State& state) {
  const std::string data(static_cast<std::size_t>(state.range(0)), 'x');
  for (auto _ : state) benchmark::DoNotOptimize(sha256(std::string_view(data)));
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sha256)->Arg(1 << 10)->Arg(1 << 20);

}  // namespace
BENCHMARK_MAIN();
