#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "hivekit/net.hpp"
#include "hivekit/types.hpp"
#include "hivekit/wire.hpp"

namespace hivekit {

enum class MockMode {
  /// The embedded sim advances only when SET_CMD arrives (deterministic).
  Lockstep,
  /// The embedded sim advances on a wall-clock timer with the latest command
  /// held, and every reply is delayed by `latency`.
  FreeRun,
};

struct MockHardwareOptions {
  MockMode mode = MockMode::Lockstep;
  std::chrono::milliseconds latency{0};
  std::uint16_t port = 0;  // 0 picks an ephemeral port
};

/// Serves the hardware wire protocol over TCP for one robot, backed by the
/// in-process simulator. The robot model, scene, seed, dt and frame_skip come
/// from `cfg`. One client at a time; extra connections get ERROR(BUSY) and
/// are closed.
class MockHardwareServer {
 public:
  MockHardwareServer(EnvConfig cfg, MockHardwareOptions options);
  ~MockHardwareServer();
  MockHardwareServer(const MockHardwareServer&) = delete;
  MockHardwareServer& operator=(const MockHardwareServer&) = delete;

  /// Binds and starts serving. Throws ConnectionError on bind failure.
  void start();
  void stop();

  std::uint16_t port() const { return port_; }
  std::string endpoint() const { return "127.0.0.1:" + std::to_string(port_); }

  SimState snapshot() const;
  std::uint64_t commands_applied() const { return commands_applied_.load(); }

 private:
  void accept_loop();
  void serve(net::Socket sock);
  void timer_loop();
  wire::Frame handle(const wire::Frame& request);

  EnvConfig cfg_;
  MockHardwareOptions options_;
  std::unique_ptr<net::Listener> listener_;
  std::uint16_t port_ = 0;

  mutable std::mutex mu_;  // guards state_ and held_
  SimState state_;
  RobotCommand held_;

  std::atomic<bool> running_{false};
  std::atomic<bool> client_active_{false};
  std::atomic<std::uint64_t> commands_applied_{0};
  std::thread accept_thread_;
  std::thread client_thread_;
  std::thread timer_thread_;
  std::mutex client_mu_;
  net::Socket* client_sock_ = nullptr;
};

}  // namespace hivekit
