#include "hivekit/agents.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "hivekit/bytes.hpp"
#include "hivekit/error.hpp"
#include "hivekit/registry.hpp"
#include "hivekit/sim.hpp"
#include "hivekit/task.hpp"
#include "json.hpp"

namespace hivekit {

std::vector<double> dls_step(const RobotModelSpec& model, std::span<const double> joint_pos, const Vec2& ee_error,
                             double damping) {
  const auto n = joint_pos.size();
  const auto jac = planar_jacobian(model, joint_pos);
  // A = J J^T + damping^2 I (2x2), solved in closed form.
  double a00 = damping * damping, a01 = 0.0, a11 = damping * damping;
  for (std::size_t i = 0; i < n; ++i) {
    a00 += jac[i] * jac[i];
    a01 += jac[i] * jac[n + i];
    a11 += jac[n + i] * jac[n + i];
  }
  const double det = a00 * a11 - a01 * a01;
  const double y0 = (a11 * ee_error.x - a01 * ee_error.y) / det;
  const double y1 = (-a01 * ee_error.x + a00 * ee_error.y) / det;
  std::vector<double> dq(n);
  for (std::size_t i = 0; i < n; ++i) dq[i] = jac[i] * y0 + jac[n + i] * y1;
  return dq;
}

std::size_t trajectory_action_dim(const EnvConfig& cfg) {
  return cfg.robot.joint_count() + (cfg.task.object_count > 0 ? 1 : 0);
}

std::vector<double> action_row(const EnvConfig& cfg, const RobotCommand& cmd) {
  std::vector<double> row = cmd.values;
  if (cfg.task.object_count > 0) row.push_back(static_cast<double>(cmd.gripper));
  return row;
}

RobotCommand command_from_row(const EnvConfig& cfg, std::span<const double> row) {
  if (row.size() != trajectory_action_dim(cfg)) throw ValidationError("action dimension mismatch");
  RobotCommand cmd;
  cmd.mode = cfg.control_mode;
  const auto n = cfg.robot.joint_count();
  cmd.values.assign(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(n));
  if (cfg.task.object_count > 0) {
    const double g = row[n];
    if (g == 1.0) {
      cmd.gripper = GripperAction::Grasp;
    } else if (g == 2.0) {
      cmd.gripper = GripperAction::Release;
    } else if (g != 0.0) {
      throw ValidationError("bad gripper code in action row");
    }
  }
  return cmd;
}

CounterRng policy_rng(std::uint64_t seed, std::uint64_t episode) {
  return CounterRng(seed, rng_stream::policy(episode));
}

namespace {

Vec2 clip_norm(Vec2 v, double max_norm) {
  const double n = norm(v);
  return n > max_norm ? v * (max_norm / n) : v;
}

// ---------------------------------------------------------------- random

class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(const EnvConfig& cfg) : cfg_(cfg) {}

  RobotCommand act(const ObsDict&, CounterRng& rng) const override {
    RobotCommand cmd;
    cmd.mode = cfg_.control_mode;
    const auto& r = cfg_.robot;
    for (std::size_t i = 0; i < r.joint_count(); ++i) {
      switch (cfg_.control_mode) {
        case ControlMode::Position:
          cmd.values.push_back(rng.uniform(r.joint_limits[i].lo, r.joint_limits[i].hi));
          break;
        case ControlMode::Velocity:
          cmd.values.push_back(rng.uniform(-2.0, 2.0));
          break;
        case ControlMode::Torque:
          cmd.values.push_back(rng.uniform(-r.torque_limits[i], r.torque_limits[i]));
          break;
      }
    }
    if (cfg_.task.object_count > 0) cmd.gripper = static_cast<GripperAction>(rng.below(3));
    return cmd;
  }

  PolicyDescriptor descriptor() const override { return {"random", cfg_.env_id, {}}; }

 private:
  EnvConfig cfg_;
};

// ---------------------------------------------------------------- experts

// Resolves the sensors an expert reads and converts joint targets into
// commands for the configured control mode.
class ExpertBase : public Policy {
 public:
  explicit ExpertBase(const EnvConfig& cfg, std::string kind) : cfg_(cfg), kind_(std::move(kind)) {
    if (const auto* s = cfg.find_sensor(SensorKind::JointPos)) {
      qpos_key_ = s->name;
    } else if (const auto* p = cfg.find_sensor(SensorKind::Proprio)) {
      proprio_key_ = p->name;
    } else {
      throw ValidationError("scripted expert needs a joint_pos or proprio sensor");
    }
    if (const auto* s = cfg.find_sensor(SensorKind::JointVel)) qvel_key_ = s->name;
    if (const auto* s = cfg.find_sensor(SensorKind::GoalPos)) goal_key_ = s->name;
    if (const auto* s = cfg.find_sensor(SensorKind::ObjectPose)) obj_key_ = s->name;
  }

  PolicyDescriptor descriptor() const override {
    PolicyDescriptor d{kind_, cfg_.env_id, {}};
    for (const auto* k : {&qpos_key_, &proprio_key_, &qvel_key_, &goal_key_, &obj_key_}) {
      if (!k->empty()) d.obs_keys.push_back(*k);
    }
    return d;
  }

 protected:
  std::vector<double> joint_pos(const ObsDict& obs) const {
    const auto n = cfg_.robot.joint_count();
    if (!qpos_key_.empty()) return obs.at(qpos_key_);
    const auto& p = obs.at(proprio_key_);
    return {p.begin(), p.begin() + static_cast<std::ptrdiff_t>(n)};
  }

  std::vector<double> joint_vel(const ObsDict& obs) const {
    const auto n = cfg_.robot.joint_count();
    if (!qvel_key_.empty()) return obs.at(qvel_key_);
    if (!proprio_key_.empty()) {
      const auto& p = obs.at(proprio_key_);
      return {p.begin() + static_cast<std::ptrdiff_t>(n), p.end()};
    }
    return std::vector<double>(n, 0.0);
  }

  Vec2 goal(const ObsDict& obs) const {
    if (!goal_key_.empty()) {
      const auto& g = obs.at(goal_key_);
      return {g[0], g[1]};
    }
    return task_goal(cfg_.task);
  }

  Vec2 object(const ObsDict& obs) const {
    if (obj_key_.empty()) throw ValidationError("scripted expert needs an object_pose sensor");
    const auto& o = obs.at(obj_key_);
    if (o.size() < 2) throw ValidationError("object_pose reading is empty");
    return {o[0], o[1]};
  }

  /// Joint target -> command in the configured mode.
  RobotCommand joint_command(std::span<const double> q, std::span<const double> dq) const {
    RobotCommand cmd;
    cmd.mode = cfg_.control_mode;
    const double period = cfg_.dt * cfg_.frame_skip;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const auto& lim = cfg_.robot.joint_limits[i];
      const double target = std::clamp(q[i] + dq[i], lim.lo, lim.hi);
      cmd.values.push_back(cfg_.control_mode == ControlMode::Velocity ? (target - q[i]) / period : target);
    }
    return cmd;
  }

  RobotCommand move_ee_toward(std::span<const double> q, const Vec2& ee_target, double max_step) const {
    const Vec2 err = clip_norm(ee_target - end_effector(cfg_.robot, q), max_step);
    return joint_command(q, dls_step(cfg_.robot, q, err));
  }

  EnvConfig cfg_;
  std::string kind_;
  std::string qpos_key_, proprio_key_, qvel_key_, goal_key_, obj_key_;
};

class ReachExpert final : public ExpertBase {
 public:
  explicit ReachExpert(const EnvConfig& cfg) : ExpertBase(cfg, "expert_reach") {}

  RobotCommand act(const ObsDict& obs, CounterRng&) const override {
    return move_ee_toward(joint_pos(obs), goal(obs), 0.3);
  }
};

class PushExpert final : public ExpertBase {
 public:
  explicit PushExpert(const EnvConfig& cfg) : ExpertBase(cfg, "expert_push") {}

  RobotCommand act(const ObsDict& obs, CounterRng&) const override {
    const auto q = joint_pos(obs);
    const Vec2 ee = end_effector(cfg_.robot, q);
    const Vec2 o = object(obs);
    const Vec2 g = goal(obs);
    const double r = cfg_.task.object_radius;
    const Vec2 to_goal = g - o;
    const double dist = norm(to_goal);
    if (dist < 1e-9) return joint_command(q, std::vector<double>(q.size(), 0.0));
    const Vec2 n = to_goal * (1.0 / dist);
    const Vec2 perp{-n.y, n.x};

    const Vec2 rel = ee - o;
    const double along = dot(rel, n);
    const double lateral = dot(rel, perp);
    const Vec2 behind = o - n * (r + 0.03);

    Vec2 target;
    if (along < -0.5 * r && std::abs(lateral) < 0.3 * r) {
      // Aligned behind the disc: drive to the contact point with the disc at the goal.
      target = g - n * r;
      return move_ee_toward(q, target, 0.04);
    }
    if (segment_clearance(ee, behind, o) < r + 0.02) {
      const double side = lateral >= 0.0 ? 1.0 : -1.0;
      target = o + perp * (side * (r + 0.07)) - n * 0.02;
    } else {
      target = behind;
    }
    return move_ee_toward(q, target, 0.15);
  }

 private:
  static double segment_clearance(const Vec2& a, const Vec2& b, const Vec2& p) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    return norm(p - (a + ab * t));
  }
};

class PickPlaceExpert final : public ExpertBase {
 public:
  explicit PickPlaceExpert(const EnvConfig& cfg) : ExpertBase(cfg, "expert_pick_place") {}

  RobotCommand act(const ObsDict& obs, CounterRng&) const override {
    const auto q = joint_pos(obs);
    const auto qd = joint_vel(obs);
    const Vec2 ee = end_effector(cfg_.robot, q);
    const Vec2 o = object(obs);
    const Vec2 bin = goal(obs);
    const double bin_radius = cfg_.task.bin_radius.value_or(0.05);
    const double grip = cfg_.robot.gripper_radius;

    if (norm(o - bin) < 0.5 * bin_radius && ee_speed(q, qd) < 0.05) {
      auto cmd = joint_command(q, std::vector<double>(q.size(), 0.0));
      cmd.gripper = GripperAction::Release;
      return cmd;
    }
    if (norm(o - ee) <= 0.95 * grip) {
      // Carry: place the end effector so the held disc lands on the bin center.
      auto cmd = move_ee_toward(q, bin + (ee - o), 0.1);
      cmd.gripper = GripperAction::Grasp;
      return cmd;
    }
    return move_ee_toward(q, o, 0.15);
  }

 private:
  double ee_speed(std::span<const double> q, std::span<const double> qd) const {
    const auto jac = planar_jacobian(cfg_.robot, q);
    const auto n = q.size();
    double vx = 0.0, vy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      vx += jac[i] * qd[i];
      vy += jac[n + i] * qd[i];
    }
    return std::hypot(vx, vy);
  }
};

class PendulumExpert final : public ExpertBase {
 public:
  explicit PendulumExpert(const EnvConfig& cfg) : ExpertBase(cfg, "expert_pendulum") {
    if (cfg.control_mode != ControlMode::Torque) throw ValidationError("pendulum expert requires torque control");
  }

  RobotCommand act(const ObsDict& obs, CounterRng&) const override {
    const double theta = joint_pos(obs)[0];
    const double omega = joint_vel(obs)[0];
    const double length = cfg_.robot.link_lengths[0];
    const double inertia = joint_inertia(cfg_.robot, 0);
    const double limit = cfg_.robot.torque_limits[0];
    const double g_over_l = physics::kGravity / length;
    const double target = cfg_.task.target.x;
    const double err = wrap_angle(theta - target);

    double u = 0.0;
    if (std::abs(err) < kCaptureAngle) {
      const double gravity_comp = g_over_l * std::sin(theta + std::numbers::pi / 2.0);
      u = inertia * (-kKp * err - kKd * omega + gravity_comp);
    } else {
      // Energy per unit inertia relative to the bottom; the upright target has 2 g/L.
      const double energy = 0.5 * omega * omega + g_over_l * (std::sin(theta) + 1.0);
      const double desired = g_over_l * (std::sin(target) + 1.0);
      const double direction = std::abs(omega) > 1e-3 ? (omega > 0 ? 1.0 : -1.0) : 1.0;
      u = (energy < desired ? 1.0 : -0.5) * direction * limit;
    }
    RobotCommand cmd;
    cmd.mode = ControlMode::Torque;
    cmd.values = {std::clamp(u, -limit, limit)};
    return cmd;
  }

 private:
  static constexpr double kCaptureAngle = 0.35;
  static constexpr double kKp = 40.0;
  static constexpr double kKd = 10.0;
};

// ---------------------------------------------------------------- BC

class LinearBCPolicy final : public Policy {
 public:
  LinearBCPolicy(LinearBCModel model, const EnvConfig& cfg) : model_(std::move(model)), cfg_(cfg) {
    if (model_.action_dim != trajectory_action_dim(cfg)) throw ValidationError("model does not match the env's actions");
  }

  RobotCommand act(const ObsDict& obs, CounterRng&) const override {
    auto row = model_.predict(bc_features(obs, model_.feature_keys));
    if (cfg_.task.object_count > 0) row.back() = std::clamp(std::round(row.back()), 0.0, 2.0);
    return command_from_row(cfg_, row);
  }

  PolicyDescriptor descriptor() const override {
    PolicyDescriptor d{"linear_bc", cfg_.env_id, {}};
    for (const auto& [name, dim] : model_.feature_keys) d.obs_keys.push_back(name);
    return d;
  }

 private:
  LinearBCModel model_;
  EnvConfig cfg_;
};

}  // namespace

PolicyRef make_random_policy(const EnvConfig& cfg) { return std::make_shared<RandomPolicy>(cfg); }

PolicyRef make_scripted_expert(const EnvConfig& cfg) {
  switch (cfg.task.kind) {
    case TaskKind::Reach:
    case TaskKind::Push:
    case TaskKind::PickPlace:
      if (cfg.control_mode == ControlMode::Torque) {
        throw ValidationError("scripted arm experts support position or velocity control only");
      }
      break;
    case TaskKind::PendulumSwingup:
      break;
  }
  switch (cfg.task.kind) {
    case TaskKind::Reach:
      return std::make_shared<ReachExpert>(cfg);
    case TaskKind::Push:
      return std::make_shared<PushExpert>(cfg);
    case TaskKind::PickPlace:
      return std::make_shared<PickPlaceExpert>(cfg);
    case TaskKind::PendulumSwingup:
      return std::make_shared<PendulumExpert>(cfg);
  }
  throw ValidationError("unsupported task");
}

std::vector<double> LinearBCModel::predict(std::span<const double> features) const {
  if (features.size() != feature_dim) throw ValidationError("feature dimension mismatch");
  std::vector<double> out(action_dim, 0.0);
  for (std::size_t a = 0; a < action_dim; ++a) {
    double acc = 0.0;
    for (std::size_t f = 0; f < feature_dim; ++f) acc += weights[a * feature_dim + f] * features[f];
    out[a] = acc;
  }
  return out;
}

std::vector<double> bc_features(const ObsDict& obs, const std::vector<std::pair<std::string, std::size_t>>& keys) {
  std::vector<double> f;
  for (const auto& [name, dim] : keys) {
    const auto& v = obs.at(name);
    if (v.size() != dim) throw ValidationError("observation '" + name + "' has unexpected dimension");
    f.insert(f.end(), v.begin(), v.end());
  }
  f.push_back(1.0);
  return f;
}

namespace {

// Column layout shared by training and the objective: all non-camera sensors
// of the first trajectory, in its declared order.
std::vector<std::pair<std::string, std::size_t>> feature_layout(const Trajectory& t) {
  std::vector<std::pair<std::string, std::size_t>> keys;
  for (const auto& s : t.observations) {
    const bool camera = s.dim > 64;  // occupancy grids are never fed to the linear model
    if (!camera) keys.emplace_back(s.name, s.dim);
  }
  return keys;
}

void fill_row(const Trajectory& t, std::size_t step, const std::vector<std::pair<std::string, std::size_t>>& keys,
              double* row) {
  std::size_t col = 0;
  for (const auto& [name, dim] : keys) {
    auto it = std::find_if(t.observations.begin(), t.observations.end(),
                           [&](const SensorSeries& s) { return s.name == name; });
    if (it == t.observations.end() || it->dim != dim) {
      throw ValidationError("trajectory lacks observation '" + name + "' with the expected dimension");
    }
    for (std::size_t d = 0; d < dim; ++d) row[col++] = it->values[step * dim + d];
  }
  row[col] = 1.0;
}

}  // namespace

LinearBCModel train_bc(std::span<const Trajectory> trajectories, double lambda, ControlMode mode) {
  if (!(lambda > 0.0)) throw ValidationError("ridge coefficient lambda must be > 0");
  if (trajectories.empty()) throw ValidationError("cannot train on an empty dataset");

  LinearBCModel model;
  model.lambda = lambda;
  model.mode = mode;
  model.feature_keys = feature_layout(trajectories.front());
  model.action_dim = trajectories.front().action_dim;
  model.feature_dim = 1;
  for (const auto& [name, dim] : model.feature_keys) model.feature_dim += dim;

  const auto fd = model.feature_dim;
  const auto ad = model.action_dim;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(fd), static_cast<Eigen::Index>(fd));
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(fd), static_cast<Eigen::Index>(ad));
  Eigen::VectorXd x(static_cast<Eigen::Index>(fd));
  std::size_t rows = 0;
  for (const auto& t : trajectories) {
    if (t.action_dim != ad) throw ValidationError("trajectories disagree on action dimension");
    for (std::size_t step = 0; step < t.length(); ++step) {
      fill_row(t, step, model.feature_keys, x.data());
      gram.selfadjointView<Eigen::Lower>().rankUpdate(x);
      const auto a = t.action(step);
      for (std::size_t j = 0; j < ad; ++j) cross.col(static_cast<Eigen::Index>(j)) += x * a[j];
      ++rows;
    }
  }
  if (rows == 0) throw ValidationError("cannot train on trajectories with no steps");
  gram = gram.selfadjointView<Eigen::Lower>();
  gram.diagonal().array() += lambda;

  Eigen::LLT<Eigen::MatrixXd> chol(gram);
  if (chol.info() != Eigen::Success) throw ValidationError("ridge system is not positive definite");
  const Eigen::MatrixXd wt = chol.solve(cross);  // fd x ad

  model.weights.resize(ad * fd);
  for (std::size_t a = 0; a < ad; ++a) {
    for (std::size_t f = 0; f < fd; ++f) {
      model.weights[a * fd + f] = wt(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(a));
    }
  }
  return model;
}

double bc_objective(const LinearBCModel& model, std::span<const Trajectory> trajectories) {
  std::vector<double> x(model.feature_dim);
  double sse = 0.0;
  std::size_t rows = 0;
  for (const auto& t : trajectories) {
    for (std::size_t step = 0; step < t.length(); ++step) {
      fill_row(t, step, model.feature_keys, x.data());
      const auto pred = model.predict(x);
      const auto a = t.action(step);
      for (std::size_t j = 0; j < model.action_dim; ++j) sse += (pred[j] - a[j]) * (pred[j] - a[j]);
      ++rows;
    }
  }
  double reg = 0.0;
  for (double w : model.weights) reg += w * w;
  return (sse + model.lambda * reg) / static_cast<double>(std::max<std::size_t>(rows, 1));
}

PolicyRef make_bc_policy(LinearBCModel model, const EnvConfig& cfg) {
  return std::make_shared<LinearBCPolicy>(std::move(model), cfg);
}

void save_bc_model(const std::filesystem::path& path, const LinearBCModel& model) {
  std::vector<std::uint8_t> out;
  ByteWriter<std::endian::little> w(out);
  w.put_string("RBC1");
  w.put(static_cast<std::uint32_t>(model.action_dim));
  w.put(static_cast<std::uint32_t>(model.feature_dim));
  for (double v : model.weights) w.put_f64(v);
  w.put_f64(model.lambda);
  w.put(static_cast<std::uint8_t>(model.mode));
  w.put(static_cast<std::uint16_t>(model.feature_keys.size()));
  for (const auto& [name, dim] : model.feature_keys) {
    w.put(static_cast<std::uint8_t>(name.size()));
    w.put_string(name);
    w.put(static_cast<std::uint32_t>(dim));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write model file " + path.string());
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error("failed writing model file " + path.string());
}

LinearBCModel load_bc_model(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open model file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  ByteReader<std::endian::little, DatasetError> r(bytes);
  if (r.get_string(4) != "RBC1") throw DatasetError("not a linear BC model file");
  LinearBCModel m;
  m.action_dim = r.get<std::uint32_t>();
  m.feature_dim = r.get<std::uint32_t>();
  m.weights.resize(m.action_dim * m.feature_dim);
  for (auto& v : m.weights) v = r.get_f64();
  m.lambda = r.get_f64();
  const auto mode = r.get<std::uint8_t>();
  if (mode > 2) throw DatasetError("bad control mode in model file");
  m.mode = static_cast<ControlMode>(mode);
  const auto n_keys = r.get<std::uint16_t>();
  for (std::uint16_t i = 0; i < n_keys; ++i) {
    const auto len = r.get<std::uint8_t>();
    auto name = r.get_string(len);
    m.feature_keys.emplace_back(std::move(name), r.get<std::uint32_t>());
  }
  return m;
}

EvalReport evaluate_policy(const EnvRegistry& registry, const Policy& policy, const std::string& env_id,
                           const EvalOptions& options) {
  if (options.n_episodes == 0) throw ValidationError("empty evaluation");
  EvalReport report;
  report.env_id = env_id;
  report.policy_kind = policy.descriptor().kind;
  report.seed = options.seed;

  auto env = registry.make(env_id, options.seed);
  if (options.reward_fn) env->set_reward_fn(*options.reward_fn);
  std::size_t successes = 0;
  double total_return = 0.0;
  for (std::uint64_t ep = 0; ep < options.n_episodes; ++ep) {
    auto rng = policy_rng(options.seed, ep);
    StepResult r = env->reset(ep);
    EpisodeRow row;
    row.episode = ep;
    while (!r.done) {
      r = env->step(policy.act(r.obs, rng));
      row.episode_return += r.reward;
    }
    row.success = r.success;
    row.length = env->steps();
    successes += row.success ? 1 : 0;
    total_return += row.episode_return;
    report.episodes.push_back(row);
  }
  report.success_rate = static_cast<double>(successes) / static_cast<double>(options.n_episodes);
  report.mean_return = total_return / static_cast<double>(options.n_episodes);
  return report;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["schema"] = "hivekit.eval/1";
  j["env_id"] = env_id;
  j["policy"] = policy_kind;
  j["seed"] = seed;
  j["n_episodes"] = episodes.size();
  j["success_rate"] = success_rate;
  j["mean_return"] = mean_return;
  auto& rows = j["episodes"] = nlohmann::ordered_json::array();
  for (const auto& e : episodes) {
    rows.push_back({{"episode", e.episode}, {"success", e.success}, {"return", e.episode_return}, {"length", e.length}});
  }
  return j.dump(2);
}

}  // namespace hivekit
