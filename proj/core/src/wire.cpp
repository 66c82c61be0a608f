#include "hivekit/wire.hpp"

#include <cmath>

#include "hivekit/bytes.hpp"
#include "hivekit/error.hpp"

namespace hivekit::wire {

using Writer = ByteWriter<std::endian::big>;
using Reader = ByteReader<std::endian::big>;

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + frame.payload.size());
  Writer w(out);
  w.put(static_cast<std::uint32_t>(5 + frame.payload.size()));
  w.put(static_cast<std::uint8_t>(frame.opcode));
  w.put(frame.request_id);
  w.put_bytes(frame.payload);
  return out;
}

void FrameDecoder::push(std::span<const std::uint8_t> bytes) {
  if (read_pos_ > 0 && read_pos_ == buffer_.size()) {
    buffer_.clear();
    read_pos_ = 0;
  } else if (read_pos_ > 4096) {
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(read_pos_));
    read_pos_ = 0;
  }
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

std::optional<Frame> FrameDecoder::next() {
  const std::span<const std::uint8_t> avail(buffer_.data() + read_pos_, buffer_.size() - read_pos_);
  if (avail.size() < 4) return std::nullopt;
  Reader r(avail);
  const auto length = r.get<std::uint32_t>();
  if (length < 5 || length > kMaxFrameLength) {
    throw ProtocolError("invalid frame length " + std::to_string(length));
  }
  if (avail.size() < 4 + static_cast<std::size_t>(length)) return std::nullopt;
  Frame f;
  f.opcode = static_cast<Opcode>(r.get<std::uint8_t>());
  f.request_id = r.get<std::uint32_t>();
  auto payload = r.get_bytes(length - 5);
  f.payload.assign(payload.begin(), payload.end());
  read_pos_ += 4 + length;
  return f;
}

std::vector<std::uint8_t> encode_state(const WireState& state) {
  if (state.joint_pos.size() != state.joint_vel.size()) {
    throw ValidationError("joint_pos and joint_vel differ in dimension");
  }
  std::vector<std::uint8_t> out;
  Writer w(out);
  w.put(static_cast<std::uint16_t>(state.joint_pos.size()));
  for (double v : state.joint_pos) w.put_f64(v);
  for (double v : state.joint_vel) w.put_f64(v);
  w.put(static_cast<std::uint16_t>(state.objects.size()));
  for (const auto& o : state.objects) {
    w.put_f64(o.x);
    w.put_f64(o.y);
    w.put_f64(o.radius);
    w.put_f64(o.tag);
  }
  return out;
}

WireState decode_state(std::span<const std::uint8_t> payload) {
  Reader r(payload);
  WireState s;
  const auto n = r.get<std::uint16_t>();
  s.joint_pos.resize(n);
  s.joint_vel.resize(n);
  for (auto& v : s.joint_pos) v = r.get_f64();
  for (auto& v : s.joint_vel) v = r.get_f64();
  const auto m = r.get<std::uint16_t>();
  s.objects.resize(m);
  for (auto& o : s.objects) {
    o.x = r.get_f64();
    o.y = r.get_f64();
    o.radius = r.get_f64();
    o.tag = r.get_f64();
  }
  if (!r.done()) throw ProtocolError("trailing bytes in state payload");
  return s;
}

WireState to_wire(const SimState& state) {
  WireState ws;
  ws.joint_pos = state.joint_pos;
  ws.joint_vel = state.joint_vel;
  for (std::size_t k = 0; k < state.objects.size(); ++k) {
    const auto& obj = state.objects[k];
    const bool held = state.grasped_object && *state.grasped_object == k;
    const double color = static_cast<double>(obj.color_index);
    ws.objects.push_back({obj.position.x, obj.position.y, obj.radius, held ? -(color + 1.0) : color});
  }
  return ws;
}

SimState from_wire(const WireState& ws, double time) {
  SimState s;
  s.time = time;
  s.joint_pos = ws.joint_pos;
  s.joint_vel = ws.joint_vel;
  for (std::size_t k = 0; k < ws.objects.size(); ++k) {
    const auto& o = ws.objects[k];
    SimObject obj;
    obj.position = {o.x, o.y};
    obj.radius = o.radius;
    obj.mass = 0.0;
    const bool held = o.tag < 0.0;
    obj.color_index = static_cast<std::uint8_t>(held ? -o.tag - 1.0 : o.tag);
    if (held) s.grasped_object = k;
    s.objects.push_back(obj);
  }
  return s;
}

std::vector<std::uint8_t> encode_command(const RobotCommand& cmd) {
  std::vector<std::uint8_t> out;
  Writer w(out);
  w.put(static_cast<std::uint8_t>(cmd.mode));
  w.put(static_cast<std::uint8_t>(cmd.gripper));
  w.put(static_cast<std::uint16_t>(cmd.values.size()));
  for (double v : cmd.values) w.put_f64(v);
  return out;
}

RobotCommand decode_command(std::span<const std::uint8_t> payload) {
  Reader r(payload);
  RobotCommand cmd;
  const auto mode = r.get<std::uint8_t>();
  const auto gripper = r.get<std::uint8_t>();
  if (mode > 2) throw ProtocolError("unknown control mode " + std::to_string(mode));
  if (gripper > 2) throw ProtocolError("unknown gripper action " + std::to_string(gripper));
  cmd.mode = static_cast<ControlMode>(mode);
  cmd.gripper = static_cast<GripperAction>(gripper);
  cmd.values.resize(r.get<std::uint16_t>());
  for (auto& v : cmd.values) v = r.get_f64();
  if (!r.done()) throw ProtocolError("trailing bytes in SET_CMD payload");
  return cmd;
}

std::vector<std::uint8_t> encode_reset(std::uint64_t episode) {
  std::vector<std::uint8_t> out;
  Writer(out).put(episode);
  return out;
}

std::uint64_t decode_reset(std::span<const std::uint8_t> payload) {
  Reader r(payload);
  const auto episode = r.get<std::uint64_t>();
  if (!r.done()) throw ProtocolError("trailing bytes in RESET payload");
  return episode;
}

std::vector<std::uint8_t> encode_error(ErrorCode code, std::string_view message) {
  std::vector<std::uint8_t> out;
  Writer w(out);
  w.put(static_cast<std::uint16_t>(code));
  w.put_string(message);
  return out;
}

std::pair<std::uint16_t, std::string> decode_error(std::span<const std::uint8_t> payload) {
  Reader r(payload);
  const auto code = r.get<std::uint16_t>();
  return {code, r.get_string(r.remaining())};
}

}  // namespace hivekit::wire
