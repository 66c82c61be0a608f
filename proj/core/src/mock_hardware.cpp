#include "hivekit/mock_hardware.hpp"

#include <cmath>

#include "hivekit/error.hpp"
#include "hivekit/robot.hpp"
#include "hivekit/sim.hpp"

namespace hivekit {

namespace {

constexpr auto kPoll = std::chrono::milliseconds(50);

RobotCommand hold_command(const EnvConfig& cfg, const SimState& state) {
  RobotCommand cmd;
  cmd.mode = cfg.control_mode;
  cmd.values = cfg.control_mode == ControlMode::Position ? state.joint_pos
                                                          : std::vector<double>(cfg.robot.joint_count(), 0.0);
  return cmd;
}

wire::Frame error_frame(std::uint32_t id, wire::ErrorCode code, std::string_view msg) {
  return {wire::Opcode::Error, id, wire::encode_error(code, msg)};
}

}  // namespace

MockHardwareServer::MockHardwareServer(EnvConfig cfg, MockHardwareOptions options)
    : cfg_(std::move(cfg)), options_(options), state_(canonical_state(cfg_)), held_(hold_command(cfg_, state_)) {}

MockHardwareServer::~MockHardwareServer() { stop(); }

void MockHardwareServer::start() {
  if (running_) return;
  listener_ = std::make_unique<net::Listener>(options_.port);
  port_ = listener_->port();
  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
  if (options_.mode == MockMode::FreeRun) timer_thread_ = std::thread([this] { timer_loop(); });
}

void MockHardwareServer::stop() {
  if (!running_.exchange(false)) return;
  {
    std::lock_guard lock(client_mu_);
    if (client_sock_) client_sock_->shutdown();
  }
  if (accept_thread_.joinable()) accept_thread_.join();
  if (client_thread_.joinable()) client_thread_.join();
  if (timer_thread_.joinable()) timer_thread_.join();
  listener_.reset();
}

SimState MockHardwareServer::snapshot() const {
  std::lock_guard lock(mu_);
  return state_;
}

void MockHardwareServer::accept_loop() {
  while (running_) {
    auto sock = listener_->accept(kPoll);
    if (!sock) continue;
    if (client_active_) {
      try {
        sock->send_all(wire::encode_frame(error_frame(0, wire::ErrorCode::Busy, "BUSY: another client is connected")));
      } catch (const Error&) {
      }
      continue;
    }
    if (client_thread_.joinable()) client_thread_.join();
    client_active_ = true;
    client_thread_ = std::thread([this, s = std::move(*sock)]() mutable { serve(std::move(s)); });
  }
}

void MockHardwareServer::serve(net::Socket sock) {
  {
    std::lock_guard lock(client_mu_);
    client_sock_ = &sock;
  }
  wire::FrameDecoder decoder;
  std::uint8_t buf[4096];
  try {
    while (running_) {
      if (!sock.wait_readable(kPoll)) continue;
      const auto n = sock.recv_some(buf, kPoll);
      if (n == 0) break;
      decoder.push(std::span(buf, n));
      while (auto request = decoder.next()) {
        const auto reply = handle(*request);
        if (options_.mode == MockMode::FreeRun && options_.latency.count() > 0) {
          std::this_thread::sleep_for(options_.latency);
        }
        sock.send_all(wire::encode_frame(reply));
      }
    }
  } catch (const ProtocolError& e) {
    try {
      sock.send_all(wire::encode_frame(error_frame(0, wire::ErrorCode::BadRequest, e.what())));
    } catch (const Error&) {
    }
  } catch (const Error&) {
    // Connection dropped; wait for the next client.
  }
  {
    std::lock_guard lock(client_mu_);
    client_sock_ = nullptr;
  }
  client_active_ = false;
}

wire::Frame MockHardwareServer::handle(const wire::Frame& request) {
  const auto id = request.request_id;
  switch (request.opcode) {
    case wire::Opcode::Ping:
      return {wire::Opcode::Pong, id, request.payload};
    case wire::Opcode::Reset: {
      const auto episode = wire::decode_reset(request.payload);
      std::lock_guard lock(mu_);
      state_ = episode_initial_state(cfg_, episode);
      held_ = hold_command(cfg_, state_);
      return {wire::Opcode::ResetEcho, id, wire::encode_state(wire::to_wire(state_))};
    }
    case wire::Opcode::GetState: {
      std::lock_guard lock(mu_);
      return {wire::Opcode::State, id, wire::encode_state(wire::to_wire(state_))};
    }
    case wire::Opcode::SetCmd: {
      const auto cmd = wire::decode_command(request.payload);
      if (cmd.mode != cfg_.control_mode) {
        return error_frame(id, wire::ErrorCode::BadCommand, "control mode mismatch");
      }
      if (cmd.values.size() != cfg_.robot.joint_count()) {
        return error_frame(id, wire::ErrorCode::BadCommand, "command dimension mismatch");
      }
      for (double v : cmd.values) {
        if (!std::isfinite(v)) return error_frame(id, wire::ErrorCode::BadCommand, "non-finite command");
      }
      std::lock_guard lock(mu_);
      if (options_.mode == MockMode::Lockstep) {
        state_ = advance(state_, cfg_.robot, cmd, cfg_.dt, cfg_.frame_skip);
      } else {
        if (cmd.gripper == GripperAction::Grasp) state_ = attempt_grasp(state_, cfg_.robot);
        if (cmd.gripper == GripperAction::Release) state_ = release_grasp(state_);
        held_ = cmd;
        held_.gripper = GripperAction::NoChange;
      }
      ++commands_applied_;
      return {wire::Opcode::Ack, id, {}};
    }
    default:
      return error_frame(id, wire::ErrorCode::BadRequest,
                         "unknown opcode " + std::to_string(static_cast<int>(request.opcode)));
  }
}

void MockHardwareServer::timer_loop() {
  const auto period = std::chrono::duration<double>(cfg_.dt * cfg_.frame_skip);
  auto next = std::chrono::steady_clock::now();
  while (running_) {
    next += std::chrono::duration_cast<std::chrono::steady_clock::duration>(period);
    std::this_thread::sleep_until(next);
    std::lock_guard lock(mu_);
    state_ = advance(state_, cfg_.robot, held_, cfg_.dt, cfg_.frame_skip);
  }
}

}  // namespace hivekit
