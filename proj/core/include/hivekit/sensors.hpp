#pragma once

#include <deque>
#include <vector>

#include "hivekit/camera.hpp"
#include "hivekit/rng.hpp"
#include "hivekit/types.hpp"

namespace hivekit {

/// Ground-truth readings for every declared sensor, in declaration order.
ObsDict raw_readings(const EnvConfig& cfg, const SimState& state, const Vec2& goal, const CameraView& view);

/// Output dimension of one sensor for the given config.
std::size_t sensor_dim(const EnvConfig& cfg, const SensorSpec& spec);

/// Per-sensor delay line followed by additive Gaussian noise.
///
/// Each call to process() pushes one ground-truth frame and returns, for a
/// sensor with delay d, the frame pushed d calls earlier, or the oldest one
/// retained while fewer than d+1 frames exist: reading(t) = truth(max(0, t-d)).
/// Noise is drawn once per call per sensor component, in declaration order,
/// and only for sensors with noise_sigma > 0. Camera values are clamped
/// back into [0, 1].
class SensorPipeline {
 public:
  SensorPipeline() = default;
  explicit SensorPipeline(std::vector<SensorSpec> specs);

  void reset(CounterRng noise_rng);
  ObsDict process(const ObsDict& truth);

  void set_noise_enabled(bool enabled) { noise_enabled_ = enabled; }
  bool noise_enabled() const { return noise_enabled_; }

 private:
  std::vector<SensorSpec> specs_;
  std::vector<std::deque<std::vector<double>>> delay_lines_;
  CounterRng rng_;
  bool noise_enabled_ = true;
};

}  // namespace hivekit
