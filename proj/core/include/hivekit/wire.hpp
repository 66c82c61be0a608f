#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hivekit/types.hpp"

// Hardware wire protocol. Every frame on the TCP stream is
//
//   u32 length | u8 opcode | u32 request_id | payload
//
// with length = 5 + payload size (the bytes after the length field). All
// integers and f64 values are big-endian.
namespace hivekit::wire {

enum class Opcode : std::uint8_t {
  Ping = 0x01,
  Reset = 0x02,
  GetState = 0x03,
  SetCmd = 0x04,
  Error = 0x7F,
  Pong = 0x81,
  ResetEcho = 0x82,
  State = 0x83,
  Ack = 0x84,
};

enum class ErrorCode : std::uint16_t {
  Busy = 1,
  BadRequest = 2,
  BadCommand = 3,
  Internal = 4,
};

constexpr std::size_t kHeaderSize = 9;
constexpr std::size_t kMaxFrameLength = 1u << 20;

struct Frame {
  Opcode opcode = Opcode::Ping;
  std::uint32_t request_id = 0;
  std::vector<std::uint8_t> payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

std::vector<std::uint8_t> encode_frame(const Frame& frame);

/// Incremental decoder for a byte stream carrying back-to-back frames.
class FrameDecoder {
 public:
  void push(std::span<const std::uint8_t> bytes);
  /// Next complete frame, if buffered. Throws ProtocolError on a length
  /// below 5 or above kMaxFrameLength.
  std::optional<Frame> next();
  std::size_t buffered() const { return buffer_.size() - read_pos_; }

 private:
  std::vector<std::uint8_t> buffer_;
  std::size_t read_pos_ = 0;
};

/// Per-object record of a state payload. `tag` is the color index for a free
/// disc and -(color_index + 1) for a disc held by the gripper.
struct WireObject {
  double x = 0.0;
  double y = 0.0;
  double radius = 0.0;
  double tag = 0.0;
  friend bool operator==(const WireObject&, const WireObject&) = default;
};

struct WireState {
  std::vector<double> joint_pos;
  std::vector<double> joint_vel;
  std::vector<WireObject> objects;
  friend bool operator==(const WireState&, const WireState&) = default;
};

/// GET_STATE reply / RESET echo: u16 n, n f64 pos, n f64 vel, u16 m, m x 4 f64.
std::vector<std::uint8_t> encode_state(const WireState& state);
WireState decode_state(std::span<const std::uint8_t> payload);
WireState to_wire(const SimState& state);

/// Rebuilds the parts of a SimState a hardware client can observe. Object
/// velocity and mass are not transmitted and come back as zero / unset.
SimState from_wire(const WireState& ws, double time);

/// SET_CMD: u8 mode, u8 gripper, u16 n, n f64.
std::vector<std::uint8_t> encode_command(const RobotCommand& cmd);
RobotCommand decode_command(std::span<const std::uint8_t> payload);

/// RESET: u64 episode_seed.
std::vector<std::uint8_t> encode_reset(std::uint64_t episode);
std::uint64_t decode_reset(std::span<const std::uint8_t> payload);

/// ERROR: u16 code, utf8 message (rest of payload).
std::vector<std::uint8_t> encode_error(ErrorCode code, std::string_view message);
std::pair<std::uint16_t, std::string> decode_error(std::span<const std::uint8_t> payload);

}  // namespace hivekit::wire
