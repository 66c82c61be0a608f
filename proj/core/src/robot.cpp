#include "hivekit/robot.hpp"

#include <cmath>

#include "hivekit/error.hpp"
#include "hivekit/net.hpp"
#include "hivekit/rng.hpp"
#include "hivekit/sim.hpp"
#include "hivekit/wire.hpp"

namespace hivekit {

SimState advance(const SimState& state, const RobotModelSpec& model, const RobotCommand& cmd, double dt,
                 std::uint32_t frame_skip) {
  SimState s = state;
  if (cmd.gripper == GripperAction::Grasp) {
    s = attempt_grasp(s, model);
  } else if (cmd.gripper == GripperAction::Release) {
    s = release_grasp(s);
  }
  for (std::uint32_t i = 0; i < frame_skip; ++i) s = sim_step(s, model, cmd, dt);
  return s;
}

SimState episode_initial_state(const EnvConfig& cfg, std::uint64_t episode) {
  CounterRng rng(cfg.seed, rng_stream::scene(episode));
  return randomize_scene(canonical_state(cfg), cfg.randomization, rng);
}

Robot::Robot(EnvConfig cfg)
    : cfg_(std::move(cfg)), pipeline_(cfg_.sensors), view_(default_camera_view(cfg_.robot)), goal_(cfg_.task.target) {}

SensorFrame Robot::reset(std::uint64_t episode) {
  state_ = do_reset(episode);
  pipeline_.reset(CounterRng(cfg_.seed, rng_stream::noise(episode)));
  return make_frame();
}

SensorFrame Robot::restore(const SimState& state) {
  if (state.joint_pos.size() != cfg_.robot.joint_count() || state.joint_vel.size() != cfg_.robot.joint_count()) {
    throw ValidationError("restored state does not match the robot's joint count");
  }
  do_restore(state);
  state_ = state;
  pipeline_.reset(CounterRng(cfg_.seed, rng_stream::noise(0)));
  return make_frame();
}

void Robot::do_restore(const SimState&) { throw ValidationError("restore is only supported by the sim backend"); }

void Robot::apply_command(const RobotCommand& cmd) {
  if (cmd.mode != cfg_.control_mode) {
    throw ValidationError("control mode mismatch: robot is in " + std::string(to_string(cfg_.control_mode)) +
                          " mode, command is " + std::string(to_string(cmd.mode)));
  }
  if (cmd.values.size() != cfg_.robot.joint_count()) {
    throw ValidationError("command has " + std::to_string(cmd.values.size()) + " values, robot has " +
                          std::to_string(cfg_.robot.joint_count()) + " joints");
  }
  for (double v : cmd.values) {
    if (!std::isfinite(v)) throw ValidationError("command contains a non-finite component");
  }
  do_apply(cmd);
}

SensorFrame Robot::get_sensors() {
  state_ = do_fetch();
  return make_frame();
}

SensorFrame Robot::make_frame() {
  SensorFrame frame;
  frame.timestamp = state_.time;
  frame.readings = pipeline_.process(raw_readings(cfg_, state_, goal_, view_));
  return frame;
}

namespace {

class SimRobot final : public Robot {
 public:
  explicit SimRobot(EnvConfig cfg) : Robot(std::move(cfg)) { state_ = canonical_state(cfg_); }

  Backend backend() const override { return Backend::Sim; }

 protected:
  SimState do_reset(std::uint64_t episode) override { return episode_initial_state(cfg_, episode); }
  void do_apply(const RobotCommand& cmd) override {
    state_ = advance(state_, cfg_.robot, cmd, cfg_.dt, cfg_.frame_skip);
  }
  SimState do_fetch() override { return state_; }
  void do_restore(const SimState&) override {}
};

class HardwareRobot final : public Robot {
 public:
  HardwareRobot(EnvConfig cfg, const RobotOptions& options) : Robot(std::move(cfg)), options_(options) {
    const auto [host, port] = net::split_endpoint(*cfg_.hardware_endpoint);
    sock_ = net::connect_tcp(host, port, options_.connect_timeout);
    const auto pong = call(wire::Opcode::Ping, {});
    if (pong.opcode != wire::Opcode::Pong) throw ProtocolError("expected PONG from hardware endpoint");
    state_ = canonical_state(cfg_);
  }

  Backend backend() const override { return Backend::Hardware; }

 protected:
  SimState do_reset(std::uint64_t episode) override {
    const auto reply = call(wire::Opcode::Reset, wire::encode_reset(episode));
    expect(reply, wire::Opcode::ResetEcho);
    time_ = 0.0;
    return wire::from_wire(wire::decode_state(reply.payload), time_);
  }

  void do_apply(const RobotCommand& cmd) override {
    expect(call(wire::Opcode::SetCmd, wire::encode_command(cmd)), wire::Opcode::Ack);
    for (std::uint32_t i = 0; i < cfg_.frame_skip; ++i) time_ += cfg_.dt;
  }

  SimState do_fetch() override {
    const auto reply = call(wire::Opcode::GetState, {});
    expect(reply, wire::Opcode::State);
    return wire::from_wire(wire::decode_state(reply.payload), time_);
  }

 private:
  wire::Frame call(wire::Opcode op, std::vector<std::uint8_t> payload) {
    const auto id = next_id_++;
    sock_.send_all(wire::encode_frame({op, id, std::move(payload)}));
    std::uint8_t buf[4096];
    while (true) {
      if (auto frame = decoder_.next()) {
        if (frame->opcode == wire::Opcode::Error) {
          auto [code, msg] = wire::decode_error(frame->payload);
          throw RemoteError(code, "hardware error " + std::to_string(code) + ": " + msg);
        }
        if (frame->request_id != id) throw ProtocolError("response for unexpected request id");
        return std::move(*frame);
      }
      const auto n = sock_.recv_some(buf, options_.io_timeout);
      if (n == 0) throw ConnectionError("hardware endpoint closed the connection");
      decoder_.push(std::span(buf, n));
    }
  }

  static void expect(const wire::Frame& f, wire::Opcode op) {
    if (f.opcode != op) throw ProtocolError("unexpected reply opcode " + std::to_string(static_cast<int>(f.opcode)));
  }

  RobotOptions options_;
  net::Socket sock_;
  wire::FrameDecoder decoder_;
  std::uint32_t next_id_ = 1;
  double time_ = 0.0;
};

}  // namespace

std::unique_ptr<Robot> robot_connect(const EnvConfig& cfg, const RobotOptions& options) {
  if (cfg.backend == Backend::Hardware) {
    if (!cfg.hardware_endpoint) throw ValidationError("hardware_endpoint required for backend = hardware");
    return std::make_unique<HardwareRobot>(cfg, options);
  }
  return std::make_unique<SimRobot>(cfg);
}

}  // namespace hivekit
