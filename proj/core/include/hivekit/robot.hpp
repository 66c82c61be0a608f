#pragma once

#include <chrono>
#include <cstdint>
#include <memory>

#include "hivekit/camera.hpp"
#include "hivekit/sensors.hpp"
#include "hivekit/types.hpp"

namespace hivekit {

struct RobotOptions {
  std::chrono::milliseconds connect_timeout{2000};
  std::chrono::milliseconds io_timeout{2000};
};

/// Grasp/release first, then frame_skip sim_steps of dt. Shared by the
/// in-process backend and the mock hardware server so both advance alike.
SimState advance(const SimState& state, const RobotModelSpec& model, const RobotCommand& cmd, double dt,
                 std::uint32_t frame_skip);

/// Episode-start state: canonical layout plus the seeded scene randomization.
SimState episode_initial_state(const EnvConfig& cfg, std::uint64_t episode);

/// One robot, either simulated in-process or driven over the hardware wire
/// protocol. Both backends run the same sensor pipeline (delay line, then
/// noise) on the state they observe, so the contract is identical; only
/// where the state comes from differs.
///
/// A Robot is single-threaded.
class Robot {
 public:
  explicit Robot(EnvConfig cfg);
  virtual ~Robot() = default;
  Robot(const Robot&) = delete;
  Robot& operator=(const Robot&) = delete;

  virtual Backend backend() const = 0;

  /// Starts episode `episode`: restores the initial state, clears delay lines
  /// and reseeds the noise stream. Returns the first frame.
  SensorFrame reset(std::uint64_t episode);

  /// Throws ValidationError on a mode or dimension mismatch or a non-finite value.
  void apply_command(const RobotCommand& cmd);

  SensorFrame get_sensors();

  /// Sim backend only: jump to an exact state (replay). Clears delay lines
  /// and reseeds noise on the episode-0 stream.
  SensorFrame restore(const SimState& state);

  /// Most recent state observed by this robot.
  const SimState& state() const { return state_; }
  const EnvConfig& config() const { return cfg_; }

  void set_goal(const Vec2& goal) { goal_ = goal; }
  const Vec2& goal() const { return goal_; }
  void set_noise_enabled(bool enabled) { pipeline_.set_noise_enabled(enabled); }

 protected:
  virtual SimState do_reset(std::uint64_t episode) = 0;
  virtual void do_apply(const RobotCommand& cmd) = 0;
  virtual SimState do_fetch() = 0;
  virtual void do_restore(const SimState& state);

  SensorFrame make_frame();

  EnvConfig cfg_;
  SimState state_;

 private:
  SensorPipeline pipeline_;
  CameraView view_;
  Vec2 goal_;
};

/// Backend selection reads only cfg.backend. Hardware: connects to
/// cfg.hardware_endpoint and throws ConnectionError / TimeoutError.
std::unique_ptr<Robot> robot_connect(const EnvConfig& cfg, const RobotOptions& options = {});

}  // namespace hivekit
