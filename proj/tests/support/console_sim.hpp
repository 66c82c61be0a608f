#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hivekit/types.hpp"
#include "hivekit/websocket.hpp"
#include "json.hpp"

namespace hivekit::testkit {

/// Headless stand-in for the browser console: speaks the teleop JSON
/// protocol over a WebSocket and keeps the latest scene.
class ConsoleSim {
 public:
  using json = nlohmann::json;
  using clock = std::chrono::steady_clock;

  struct Scene {
    double time = 0.0;
    std::vector<Vec2> links;
    Vec2 target;
    bool success = false;
    double reward = 0.0;
    std::uint64_t step = 0;
    std::uint64_t episode = 0;
    clock::time_point received;
  };

  ConsoleSim(std::uint16_t port, const std::string& want);

  void send(const json& msg);
  void key(const std::string& kind, const std::string& code);
  void axis(const std::string& code, double value);

  /// Reads one message; nullopt on timeout or close.
  std::optional<json> read(std::chrono::milliseconds timeout);
  /// Reads until a message of `type` (and matching `field == value` when
  /// given) arrives. Everything read on the way is still recorded.
  std::optional<json> wait_for(const std::string& type, std::chrono::milliseconds timeout,
                               const std::string& field = {}, const std::string& value = {});

  bool closed() const { return closed_; }
  const std::optional<Scene>& last_scene() const { return last_scene_; }
  const std::vector<Scene>& scenes() const { return scenes_; }
  const std::vector<json>& messages() const { return messages_; }

  /// Drives a two-link arm toward the scene target: analytic IK for the
  /// target, then one axis event per joint per scene, proportional to the
  /// joint error. Returns when an episode "done" arrives or the deadline
  /// passes; true if the last scene before "done" reported success.
  bool drive_reach(std::chrono::milliseconds deadline, double gain = 4.0);

  void close() { ws_.close(); }

 private:
  void record(const json& m);

  ws::WebSocket ws_;
  bool closed_ = false;
  std::optional<Scene> last_scene_;
  std::vector<Scene> scenes_;
  std::vector<json> messages_;
};

}  // namespace hivekit::testkit
