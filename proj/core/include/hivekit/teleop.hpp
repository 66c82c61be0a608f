#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hivekit/env.hpp"
#include "hivekit/net.hpp"
#include "hivekit/types.hpp"

namespace hivekit {

enum class TeleopEventKind { KeyDown, KeyUp, Axis };

struct TeleopEvent {
  TeleopEventKind kind = TeleopEventKind::KeyDown;
  std::string code;
  double value = 0.0;  // Axis only, in [-1, 1]
  double client_time = 0.0;
};

/// What an input code drives.
struct InputBinding {
  enum class Target { JointVelocity, EndEffector, GripperToggle };
  Target target = Target::JointVelocity;
  std::size_t index = 0;  // joint, or 0 = x / 1 = y for EndEffector
  double direction = 1.0;
};

using InputMap = std::map<std::string, InputBinding>;

/// Two keys per joint (q/a, w/s, e/d, t/g, y/h, u/j: +/-), "axis<i>" for
/// joint i, arrow keys for end-effector x/y, and " " / "Space" to toggle the
/// gripper.
InputMap default_input_map(std::size_t joint_count);

struct TeleopOptions {
  double rate_hz = 20.0;
  std::uint16_t port = 0;
  std::string host = "127.0.0.1";
  /// Container that finalized recordings are written to; empty keeps them in
  /// memory only.
  std::filesystem::path record_path;
  /// Arrow keys move the end effector through damped-least-squares IK
  /// instead of joint keys driving joints directly.
  bool end_effector_mode = false;
  double joint_speed = 0.5;  // rad/s per key
  double ee_speed = 0.25;    // m/s per arrow key
  std::size_t event_queue_capacity = 256;
  std::optional<std::uint64_t> seed;
  InputMap input_map;  // empty: default_input_map
};

struct TeleopStats {
  std::string session_id;
  std::uint64_t steps = 0;
  std::uint64_t episodes = 0;
  double mean_step_interval = 0.0;  // seconds
  std::size_t recorded = 0;
};

/// One live environment driven at a fixed rate by console input over the
/// WebSocket JSON protocol (docs/console_protocol.md).
///
/// The loop thread folds queued events into a held command, steps the env,
/// broadcasts a scene message and auto-resets at episode end. One
/// connection holds control; later ones get "busy" and, when they asked to
/// spectate, read-only scene updates.
class TeleopServer {
 public:
  TeleopServer(EnvConfig cfg, TeleopOptions options = {});
  ~TeleopServer();
  TeleopServer(const TeleopServer&) = delete;
  TeleopServer& operator=(const TeleopServer&) = delete;

  /// Binds the port and starts the loop. Throws ConnectionError or
  /// ValidationError (rate outside [1, 100]).
  void start();
  void stop();
  std::uint16_t port() const { return port_; }

  /// Throws ValidationError when a recording is already in progress.
  void start_recording();
  enum class StopOutcome { Pending, Stopped, Discarded };
  /// Pending: the open episode is finalized at the next episode boundary.
  /// Stopped: the open episode had no steps yet; earlier episodes of this
  /// recording are kept. Discarded: nothing had been recorded at all.
  /// Throws ValidationError when no recording is in progress.
  StopOutcome stop_recording();
  bool recording() const;

  /// Queues an event as if a controlling console had sent it.
  void submit(const TeleopEvent& ev);
  void request_reset();

  std::vector<Trajectory> recorded() const;
  TeleopStats stats() const;
  SimState state() const;
  const EnvConfig& config() const { return cfg_; }

 private:
  struct Connection;

  void loop();
  void accept_loop();
  void serve(std::shared_ptr<Connection> conn);
  void release(const std::shared_ptr<Connection>& conn);
  void handle_message(const std::shared_ptr<Connection>& conn, const std::string& text);
  void enqueue(const TeleopEvent& ev);
  void broadcast(const std::string& msg, bool to_pending = false);

  // Loop-thread helpers; called with mu_ held.
  RobotCommand fold_inputs();
  void finalize_episode_locked();
  void begin_episode_locked();
  std::string scene_json_locked(const StepResult& r) const;

  EnvConfig cfg_;
  TeleopOptions opts_;
  InputMap input_map_;
  std::string session_id_;
  std::uint16_t port_ = 0;

  mutable std::mutex mu_;
  std::unique_ptr<Env> env_;
  StepResult last_;
  std::vector<double> held_target_;
  std::map<std::string, bool> keys_down_;
  std::map<std::string, double> axes_;
  std::map<std::string, bool> axes_fresh_;
  std::optional<GripperAction> pending_grip_;
  bool reset_requested_ = false;
  bool recording_ = false;
  bool stop_pending_ = false;
  std::optional<Trajectory> open_traj_;
  std::vector<Trajectory> recorded_;
  std::size_t saved_in_recording_ = 0;
  std::vector<std::string> notices_;
  std::uint64_t steps_ = 0;
  std::uint64_t episodes_ = 0;
  std::chrono::steady_clock::time_point first_step_, last_step_;

  std::mutex q_mu_;
  std::condition_variable q_not_full_;
  std::deque<TeleopEvent> events_;

  std::mutex conn_mu_;
  std::vector<std::shared_ptr<Connection>> conns_;
  std::vector<std::thread> conn_threads_;
  std::shared_ptr<Connection> controller_;

  std::unique_ptr<net::Listener> listener_;
  std::thread loop_thread_, accept_thread_;
  std::atomic<bool> running_{false};
};

}  // namespace hivekit
