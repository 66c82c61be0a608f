#include <gtest/gtest.h>

#include <cmath>

#include "hivekit/registry.hpp"
#include "hivekit/rng.hpp"
#include "hivekit/sensors.hpp"
#include "test_support.hpp"

using namespace hivekit;

namespace {

ObsDict truth_at(int t) {
  ObsDict d;
  d.set("a", {static_cast<double>(t), -0.5 * t});
  d.set("b", {t * 0.25});
  return d;
}

}  // namespace

TEST(Sensors, IdentityWithoutNoiseOrDelay) {
  SensorPipeline p({{"a", SensorKind::JointPos, 0.0, 0, std::nullopt}, {"b", SensorKind::JointVel, 0.0, 0, std::nullopt}});
  p.reset(CounterRng(1, 2));
  for (int t = 0; t < 20; ++t) EXPECT_EQ(p.process(truth_at(t)), truth_at(t));
}

TEST(Sensors, DelayLineReturnsOlderTruth) {
  for (std::uint32_t d : {0u, 1u, 3u, 10u}) {
    SensorPipeline p({{"a", SensorKind::JointPos, 0.0, d, std::nullopt}, {"b", SensorKind::JointVel, 0.0, 0, std::nullopt}});
    p.reset(CounterRng(1, 2));
    for (int t = 0; t < 100; ++t) {
      const auto r = p.process(truth_at(t));
      EXPECT_EQ(r.at("a"), truth_at(std::max(0, t - static_cast<int>(d))).at("a")) << "d=" << d << " t=" << t;
      EXPECT_EQ(r.at("b"), truth_at(t).at("b"));
    }
  }
}

TEST(Sensors, ResetClearsDelayLine) {
  SensorPipeline p({{"a", SensorKind::JointPos, 0.0, 3, std::nullopt}, {"b", SensorKind::JointVel, 0.0, 0, std::nullopt}});
  p.reset(CounterRng(1, 2));
  for (int t = 0; t < 5; ++t) p.process(truth_at(t));
  p.reset(CounterRng(1, 2));
  EXPECT_EQ(p.process(truth_at(40)).at("a"), truth_at(40).at("a"));
}

TEST(Sensors, NoiseIsSeededAndCentered) {
  const std::vector<SensorSpec> specs{{"a", SensorKind::JointPos, 0.1, 0, std::nullopt},
                                      {"b", SensorKind::JointVel, 0.0, 0, std::nullopt}};
  SensorPipeline p(specs), q(specs), r(specs);
  p.reset(CounterRng(9, 2));
  q.reset(CounterRng(9, 2));
  r.reset(CounterRng(10, 2));
  double sum = 0.0, sq = 0.0;
  bool differs = false;
  const int n = 5000;
  for (int t = 0; t < n; ++t) {
    const auto a = p.process(truth_at(0));
    EXPECT_EQ(a, q.process(truth_at(0)));
    differs |= a != r.process(truth_at(0));
    EXPECT_EQ(a.at("b"), truth_at(0).at("b"));
    sum += a.at("a")[0];
    sq += a.at("a")[0] * a.at("a")[0];
  }
  EXPECT_TRUE(differs);
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(std::sqrt(sq / n), 0.1, 0.005);
}

TEST(Sensors, NoiseCanBeDisabled) {
  SensorPipeline p({{"a", SensorKind::JointPos, 0.5, 0, std::nullopt}});
  p.reset(CounterRng(9, 2));
  p.set_noise_enabled(false);
  ObsDict d;
  d.set("a", {1.0, 2.0});
  EXPECT_EQ(p.process(d), d);
}

TEST(Sensors, EnvObservationKeysFollowDeclarationOrder) {
  const auto& reg = testkit::shipped_registry();
  for (const auto& id : reg.ids()) {
    auto env = reg.make(id);
    const auto r = env->reset();
    std::vector<std::string> names;
    for (const auto& s : env->config().sensors) names.push_back(s.name);
    EXPECT_EQ(r.obs.keys(), names) << id;
    for (const auto& s : env->config().sensors) {
      EXPECT_EQ(r.obs.at(s.name).size(), sensor_dim(env->config(), s)) << id << "/" << s.name;
    }
  }
}

TEST(Sensors, CameraValuesStayInUnitRange) {
  auto env = testkit::shipped_registry().make("pickplace_v2d-v0");
  auto r = env->reset();
  const auto& cam = r.obs.at("camera");
  EXPECT_EQ(cam.size(), 84u * 84u);
  for (double v : cam) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}
