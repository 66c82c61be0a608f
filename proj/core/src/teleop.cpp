#include "hivekit/teleop.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

#include "hivekit/agents.hpp"
#include "hivekit/dataset.hpp"
#include "hivekit/error.hpp"
#include "hivekit/registry.hpp"
#include "hivekit/sim.hpp"
#include "hivekit/task.hpp"
#include "hivekit/websocket.hpp"
#include "json.hpp"

namespace hivekit {

using json = nlohmann::json;

InputMap default_input_map(std::size_t joint_count) {
  static constexpr const char* kPlus[] = {"q", "w", "e", "t", "y", "u"};
  static constexpr const char* kMinus[] = {"a", "s", "d", "g", "h", "j"};
  using T = InputBinding::Target;
  InputMap m;
  for (std::size_t j = 0; j < joint_count && j < std::size(kPlus); ++j) {
    m[kPlus[j]] = {T::JointVelocity, j, 1.0};
    m[kMinus[j]] = {T::JointVelocity, j, -1.0};
  }
  for (std::size_t j = 0; j < joint_count; ++j) m["axis" + std::to_string(j)] = {T::JointVelocity, j, 1.0};
  m["ArrowRight"] = {T::EndEffector, 0, 1.0};
  m["ArrowLeft"] = {T::EndEffector, 0, -1.0};
  m["ArrowUp"] = {T::EndEffector, 1, 1.0};
  m["ArrowDown"] = {T::EndEffector, 1, -1.0};
  m[" "] = {T::GripperToggle, 0, 1.0};
  m["Space"] = {T::GripperToggle, 0, 1.0};
  return m;
}

struct TeleopServer::Connection {
  enum class Role { Pending, Control, Spectate };
  std::optional<ws::WebSocket> ws;
  Role role = Role::Pending;
  std::atomic<bool> alive{true};
  net::Socket raw;  // until the handshake completes
};

namespace {

std::string make_session_id() {
  std::random_device rd;
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%08x%08x", rd(), rd());
  return buf;
}

std::string error_msg(const std::string& msg) { return json{{"type", "error"}, {"msg", msg}}.dump(); }
std::string episode_msg(const char* event) { return json{{"type", "episode"}, {"event", event}}.dump(); }

TeleopEventKind parse_event_kind(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "keydown") return TeleopEventKind::KeyDown;
  if (s == "keyup") return TeleopEventKind::KeyUp;
  if (s == "axis") return TeleopEventKind::Axis;
  throw ProtocolError("unknown input kind '" + s + "'");
}

}  // namespace

TeleopServer::TeleopServer(EnvConfig cfg, TeleopOptions options)
    : cfg_(std::move(cfg)), opts_(std::move(options)), session_id_(make_session_id()) {
  if (!(opts_.rate_hz >= 1.0 && opts_.rate_hz <= 100.0)) throw ValidationError("rate_hz must be in [1, 100]");
  if (opts_.seed) cfg_.seed = *opts_.seed;
  input_map_ = opts_.input_map.empty() ? default_input_map(cfg_.robot.joint_count()) : opts_.input_map;
}

TeleopServer::~TeleopServer() { stop(); }

void TeleopServer::start() {
  if (running_) return;
  env_ = make_env(cfg_);
  {
    std::lock_guard lk(mu_);
    begin_episode_locked();
  }
  listener_ = std::make_unique<net::Listener>(opts_.port, opts_.host);
  port_ = listener_->port();
  running_ = true;
  loop_thread_ = std::thread([this] { loop(); });
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void TeleopServer::stop() {
  if (!running_.exchange(false)) return;
  q_not_full_.notify_all();
  if (accept_thread_.joinable()) accept_thread_.join();
  if (loop_thread_.joinable()) loop_thread_.join();
  std::vector<std::thread> threads;
  {
    std::lock_guard lk(conn_mu_);
    for (auto& c : conns_) {
      if (c->ws) {
        c->ws->close(1001);
      } else {
        c->raw.shutdown();
      }
    }
    threads.swap(conn_threads_);
  }
  for (auto& t : threads) t.join();
  std::lock_guard lk(conn_mu_);
  conns_.clear();
  controller_.reset();
  listener_.reset();
}

// ---------------------------------------------------------------- recording

void TeleopServer::start_recording() {
  std::lock_guard lk(mu_);
  if (recording_) throw ValidationError("a recording is already in progress");
  recording_ = true;
  stop_pending_ = false;
  saved_in_recording_ = 0;
  open_traj_ = begin_trajectory(cfg_, cfg_.seed, env_->state(), env_->task().target, TrajectorySource::HumanTeleop);
}

TeleopServer::StopOutcome TeleopServer::stop_recording() {
  std::lock_guard lk(mu_);
  if (!recording_) throw ValidationError("no recording in progress");
  if (stop_pending_) throw ValidationError("recording is already stopping");
  if (!open_traj_ || open_traj_->length() == 0) {
    recording_ = false;
    open_traj_.reset();
    return saved_in_recording_ == 0 ? StopOutcome::Discarded : StopOutcome::Stopped;
  }
  stop_pending_ = true;
  return StopOutcome::Pending;
}

bool TeleopServer::recording() const {
  std::lock_guard lk(mu_);
  return recording_;
}

std::vector<Trajectory> TeleopServer::recorded() const {
  std::lock_guard lk(mu_);
  return recorded_;
}

TeleopStats TeleopServer::stats() const {
  std::lock_guard lk(mu_);
  TeleopStats s;
  s.session_id = session_id_;
  s.steps = steps_;
  s.episodes = episodes_;
  s.recorded = recorded_.size();
  if (steps_ > 1) s.mean_step_interval = std::chrono::duration<double>(last_step_ - first_step_).count() / (steps_ - 1);
  return s;
}

SimState TeleopServer::state() const {
  std::lock_guard lk(mu_);
  return env_->state();
}

void TeleopServer::finalize_episode_locked() {
  if (!recording_ || !open_traj_) return;
  if (open_traj_->length() > 0) {
    recorded_.push_back(std::move(*open_traj_));
    ++saved_in_recording_;
    if (!opts_.record_path.empty()) write_trajectories(opts_.record_path, cfg_, recorded_);
    notices_.push_back(json{{"type", "record"}, {"state", "saved"}, {"trajectories", recorded_.size()}}.dump());
  }
  open_traj_.reset();
  if (stop_pending_) {
    recording_ = false;
    stop_pending_ = false;
    notices_.push_back(json{{"type", "record"}, {"state", "stopped"}}.dump());
  }
}

void TeleopServer::begin_episode_locked() {
  last_ = env_->reset();
  ++episodes_;
  held_target_ = env_->state().joint_pos;
  pending_grip_.reset();
  if (recording_) {
    open_traj_ =
        begin_trajectory(cfg_, cfg_.seed, env_->state(), env_->task().target, TrajectorySource::HumanTeleop);
  }
}

// ---------------------------------------------------------------- events

void TeleopServer::enqueue(const TeleopEvent& ev) {
  std::unique_lock lk(q_mu_);
  q_not_full_.wait(lk, [&] { return !running_ || events_.size() < opts_.event_queue_capacity; });
  if (!running_) return;
  events_.push_back(ev);
}

void TeleopServer::submit(const TeleopEvent& ev) {
  if (ev.kind == TeleopEventKind::Axis && !(ev.value >= -1.0 && ev.value <= 1.0)) {
    throw ValidationError("axis value must be in [-1, 1]");
  }
  enqueue(ev);
}

void TeleopServer::request_reset() {
  std::lock_guard lk(mu_);
  reset_requested_ = true;
}

RobotCommand TeleopServer::fold_inputs() {
  std::deque<TeleopEvent> evs;
  {
    std::lock_guard lk(q_mu_);
    evs.swap(events_);
  }
  q_not_full_.notify_all();

  for (auto& [code, fresh] : axes_fresh_) fresh = false;
  for (const auto& ev : evs) {
    const auto it = input_map_.find(ev.code);
    if (it == input_map_.end()) continue;
    switch (ev.kind) {
      case TeleopEventKind::KeyDown:
        if (it->second.target == InputBinding::Target::GripperToggle) {
          if (!keys_down_[ev.code]) {
            pending_grip_ = env_->state().grasped_object ? GripperAction::Release : GripperAction::Grasp;
          }
        }
        keys_down_[ev.code] = true;
        break;
      case TeleopEventKind::KeyUp:
        keys_down_[ev.code] = false;
        break;
      case TeleopEventKind::Axis:
        axes_[ev.code] = ev.value;  // last writer wins
        axes_fresh_[ev.code] = true;
        break;
    }
  }
  for (auto& [code, v] : axes_) {
    if (!axes_fresh_[code]) v = std::abs(v) < 1e-3 ? 0.0 : 0.5 * v;
  }

  const auto n = cfg_.robot.joint_count();
  const double period = cfg_.dt * cfg_.frame_skip;
  std::vector<double> vel(n, 0.0);
  Vec2 ee_vel{0.0, 0.0};
  auto apply = [&](const InputBinding& b, double amount) {
    if (b.target == InputBinding::Target::JointVelocity && b.index < n) {
      vel[b.index] += b.direction * amount * opts_.joint_speed;
    } else if (b.target == InputBinding::Target::EndEffector) {
      (b.index == 0 ? ee_vel.x : ee_vel.y) += b.direction * amount * opts_.ee_speed;
    }
  };
  for (const auto& [code, down] : keys_down_) {
    if (down) apply(input_map_.at(code), 1.0);
  }
  for (const auto& [code, v] : axes_) apply(input_map_.at(code), v);

  if (opts_.end_effector_mode && (ee_vel.x != 0.0 || ee_vel.y != 0.0)) {
    const auto dq = dls_step(cfg_.robot, held_target_, ee_vel * period);
    for (std::size_t j = 0; j < n; ++j) vel[j] += dq[j] / period;
  }

  RobotCommand cmd;
  cmd.mode = cfg_.control_mode;
  switch (cfg_.control_mode) {
    case ControlMode::Position:
      for (std::size_t j = 0; j < n; ++j) {
        const auto& lim = cfg_.robot.joint_limits[j];
        held_target_[j] = std::clamp(held_target_[j] + vel[j] * period, lim.lo, lim.hi);
      }
      cmd.values = held_target_;
      break;
    case ControlMode::Velocity:
      cmd.values = vel;
      break;
    case ControlMode::Torque:
      for (std::size_t j = 0; j < n; ++j) {
        const double lim = cfg_.robot.torque_limits[j];
        cmd.values.push_back(std::clamp(vel[j] / opts_.joint_speed * lim, -lim, lim));
      }
      break;
  }
  if (pending_grip_) {
    cmd.gripper = *pending_grip_;
    pending_grip_.reset();
  }
  return cmd;
}

// ---------------------------------------------------------------- loop

std::string TeleopServer::scene_json_locked(const StepResult& r) const {
  const auto& s = env_->state();
  const auto kin = forward_kinematics(cfg_.robot, s.joint_pos);
  json links = json::array();
  for (const auto& p : kin.points) links.push_back({p.x, p.y});
  json objects = json::array();
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    const auto& o = s.objects[i];
    objects.push_back({{"p", {o.position.x, o.position.y}},
                       {"r", o.radius},
                       {"c", o.color_index},
                       {"held", s.grasped_object == i}});
  }
  Vec2 target = env_->task().target;
  if (cfg_.task.kind == TaskKind::PendulumSwingup) {
    const double a = env_->task().target.x;
    target = Vec2{std::cos(a), std::sin(a)} * cfg_.robot.link_lengths[0];
  } else if (cfg_.task.kind == TaskKind::PickPlace) {
    target = task_goal(env_->task());
  }
  json j = {{"type", "scene"},     {"time", s.time},
            {"links", links},      {"objects", objects},
            {"target", {target.x, target.y}},
            {"success", r.success}, {"reward", r.reward},
            {"step", env_->steps()}, {"episode", env_->episode()},
            {"recording", recording_}};
  return j.dump();
}

void TeleopServer::loop() {
  using clock = std::chrono::steady_clock;
  const auto period = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(1.0 / opts_.rate_hz));
  auto deadline = clock::now();
  while (running_) {
    std::vector<std::string> out;
    try {
      std::lock_guard lk(mu_);
      if (reset_requested_) {
        reset_requested_ = false;
        finalize_episode_locked();
        begin_episode_locked();
        out.push_back(episode_msg("reset"));
      }
      const RobotCommand cmd = fold_inputs();
      const ObsDict obs_before = last_.obs;
      StepResult r = env_->step(cmd);
      const auto now = clock::now();
      if (steps_++ == 0) first_step_ = now;
      last_step_ = now;
      if (recording_ && open_traj_) append_step(*open_traj_, cfg_, obs_before, cmd, r, env_->state());
      out.push_back(scene_json_locked(r));
      if (r.done) {
        out.push_back(episode_msg("done"));
        finalize_episode_locked();
        begin_episode_locked();
        out.push_back(episode_msg("reset"));
      } else {
        last_ = std::move(r);
      }
      out.insert(out.end(), notices_.begin(), notices_.end());
      notices_.clear();
    } catch (const std::exception& e) {
      out.push_back(error_msg(std::string("session error: ") + e.what()));
    }
    for (const auto& m : out) broadcast(m);
    deadline += period;
    const auto now = clock::now();
    if (deadline < now - 5 * period) deadline = now;  // fell far behind; do not burst
    std::this_thread::sleep_until(deadline);
  }
}

void TeleopServer::broadcast(const std::string& msg, bool to_pending) {
  std::vector<std::shared_ptr<Connection>> targets;
  {
    std::lock_guard lk(conn_mu_);
    for (const auto& c : conns_) {
      if (c->alive && c->ws && (to_pending || c->role != Connection::Role::Pending)) targets.push_back(c);
    }
  }
  for (const auto& c : targets) {
    try {
      c->ws->send_text(msg);
    } catch (const Error&) {
      c->alive = false;
      c->ws->shutdown();
    }
  }
}

// ---------------------------------------------------------------- connections

void TeleopServer::accept_loop() {
  while (running_) {
    std::optional<net::Socket> sock;
    try {
      sock = listener_->accept(net::Millis(100));
    } catch (const Error&) {
      continue;
    }
    if (!sock) continue;
    sock->set_nodelay();
    auto conn = std::make_shared<Connection>();
    conn->raw = std::move(*sock);
    std::lock_guard lk(conn_mu_);
    // Drop finished connections.
    std::erase_if(conns_, [](const auto& c) { return !c->alive; });
    conns_.push_back(conn);
    conn_threads_.emplace_back([this, conn] { serve(conn); });
  }
}

void TeleopServer::serve(std::shared_ptr<Connection> conn) {
  try {
    auto ws = ws::WebSocket::accept_upgrade(std::move(conn->raw), net::Millis(2000));
    {
      std::lock_guard lk(conn_mu_);
      conn->ws.emplace(std::move(ws));
    }
    std::string text;
    while (running_ && conn->alive) {
      const auto st = conn->ws->recv_text(text, net::Millis(100));
      if (st == ws::RecvStatus::Timeout) continue;
      if (st == ws::RecvStatus::Closed) break;
      try {
        handle_message(conn, text);
      } catch (const ProtocolError& e) {
        conn->ws->send_text(error_msg(e.what()));
        // Free the control slot before the peer can observe the close.
        release(conn);
        conn->ws->close(1002);
        break;
      }
    }
  } catch (const Error&) {
  }
  release(conn);
}

void TeleopServer::release(const std::shared_ptr<Connection>& conn) {
  conn->alive = false;
  std::lock_guard lk(conn_mu_);
  if (controller_ == conn) {
    controller_.reset();
    // Release everything the departing controller was holding.
    std::lock_guard lk2(mu_);
    for (auto& [code, down] : keys_down_) down = false;
    for (auto& [code, v] : axes_) v = 0.0;
  }
}

void TeleopServer::handle_message(const std::shared_ptr<Connection>& conn, const std::string& text) {
  json m;
  try {
    m = json::parse(text);
  } catch (const json::exception&) {
    throw ProtocolError("message is not valid JSON");
  }
  if (!m.is_object() || !m.contains("type") || !m["type"].is_string()) throw ProtocolError("message needs a type");
  const std::string type = m["type"];

  if (type == "hello") {
    if (conn->role != Connection::Role::Pending) throw ProtocolError("duplicate hello");
    const std::string want = m.value("want", "control");
    if (want != "control" && want != "spectate") throw ProtocolError("want must be 'control' or 'spectate'");
    bool busy = false;
    {
      std::lock_guard lk(conn_mu_);
      if (want == "control" && !controller_) {
        controller_ = conn;
        conn->role = Connection::Role::Control;
      } else {
        busy = want == "control" || controller_ != nullptr;
        conn->role = Connection::Role::Spectate;
      }
    }
    if (busy) conn->ws->send_text(json{{"type", "busy"}}.dump());
    if (busy && want == "control") {
      conn->ws->close(1000);
      conn->alive = false;
    }
    return;
  }
  if (conn->role == Connection::Role::Pending) throw ProtocolError("send hello first");

  if (conn->role != Connection::Role::Control) {
    if (type == "input" || type == "record" || type == "reset") {
      conn->ws->send_text(error_msg("spectators cannot control the session"));
      return;
    }
    throw ProtocolError("unknown message type '" + type + "'");
  }

  if (type == "input") {
    if (!m.contains("kind") || !m["kind"].is_string() || !m.contains("code") || !m["code"].is_string()) {
      throw ProtocolError("input needs kind and code");
    }
    TeleopEvent ev;
    ev.kind = parse_event_kind(m["kind"]);
    ev.code = m["code"];
    ev.client_time = m.contains("client_time") && m["client_time"].is_number() ? m["client_time"].get<double>() : 0.0;
    if (ev.kind == TeleopEventKind::Axis) {
      if (!m.contains("value") || !m["value"].is_number()) throw ProtocolError("axis input needs a value");
      ev.value = m["value"];
      if (!(ev.value >= -1.0 && ev.value <= 1.0)) throw ProtocolError("axis value must be in [-1, 1]");
    } else if (m.contains("value") && !m["value"].is_null()) {
      throw ProtocolError("key input carries no value");
    }
    enqueue(ev);
  } else if (type == "record") {
    const std::string action = m.value("action", "");
    try {
      if (action == "start") {
        start_recording();
        conn->ws->send_text(json{{"type", "record"}, {"state", "started"}}.dump());
      } else if (action == "stop") {
        const auto outcome = stop_recording();
        if (outcome == StopOutcome::Discarded) {
          conn->ws->send_text(error_msg("recording discarded: no steps were recorded"));
        } else if (outcome == StopOutcome::Stopped) {
          conn->ws->send_text(json{{"type", "record"}, {"state", "stopped"}}.dump());
        } else {
          conn->ws->send_text(json{{"type", "record"}, {"state", "stopping"}}.dump());
        }
      } else {
        throw ProtocolError("record action must be 'start' or 'stop'");
      }
    } catch (const ValidationError& e) {
      conn->ws->send_text(error_msg(e.what()));
    }
  } else if (type == "reset") {
    request_reset();
  } else {
    throw ProtocolError("unknown message type '" + type + "'");
  }
}

}  // namespace hivekit
