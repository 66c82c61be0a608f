#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hivekit/env.hpp"
#include "hivekit/rng.hpp"
#include "hivekit/types.hpp"

namespace hivekit {

class EnvRegistry;

struct PolicyDescriptor {
  std::string kind;
  std::string env_id;
  std::vector<std::string> obs_keys;
};

/// act() must be deterministic given (obs, rng state). Policies are
/// immutable after construction and may be shared between threads.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual RobotCommand act(const ObsDict& obs, CounterRng& rng) const = 0;
  virtual PolicyDescriptor descriptor() const = 0;
};

using PolicyRef = std::shared_ptr<const Policy>;

/// Uniform commands: joint targets inside the limits (position), +-2 rad/s
/// (velocity) or +-torque limit (torque); random gripper action when the
/// task has objects.
PolicyRef make_random_policy(const EnvConfig& cfg);

/// Analytic controller per task kind, reading joint state, object pose and
/// goal from the observation:
///  - Reach: one damped-least-squares IK step toward the goal, sent as a
///    position target (velocity mode: the same step divided by the control
///    period).
///  - Push: go around the disc to a point behind it on the goal line, then
///    drive the end effector to where it touches the disc at the goal.
///  - PickPlace: approach, Grasp once within 0.95 gripper_radius, carry to
///    the bin, Release when the disc is near the bin center and the end
///    effector has slowed down.
///  - PendulumSwingup: energy pumping until near upright, then PD with
///    gravity compensation.
/// Throws ValidationError for an unsupported task / control mode pairing or
/// missing sensors.
PolicyRef make_scripted_expert(const EnvConfig& cfg);

/// One damped-least-squares step: dq = J^T (J J^T + damping^2 I)^-1 e.
std::vector<double> dls_step(const RobotModelSpec& model, std::span<const double> joint_pos, const Vec2& ee_error,
                             double damping = 0.05);

/// Width of a stored action row: one value per joint, plus the gripper code
/// (0 no_change, 1 grasp, 2 release) as a last column when the task has
/// objects.
std::size_t trajectory_action_dim(const EnvConfig& cfg);
std::vector<double> action_row(const EnvConfig& cfg, const RobotCommand& cmd);
RobotCommand command_from_row(const EnvConfig& cfg, std::span<const double> row);

/// Linear policy a = W [features; 1] fitted by ridge regression.
struct LinearBCModel {
  std::size_t action_dim = 0;
  std::size_t feature_dim = 0;  // includes the trailing bias term
  std::vector<double> weights;  // action_dim x feature_dim, row-major
  double lambda = 1e-3;
  ControlMode mode = ControlMode::Position;
  std::vector<std::pair<std::string, std::size_t>> feature_keys;  // sensor name, dim

  std::vector<double> predict(std::span<const double> features) const;
  friend bool operator==(const LinearBCModel&, const LinearBCModel&) = default;
};

/// Non-camera sensors of `obs` in `keys` order, followed by a constant 1.
std::vector<double> bc_features(const ObsDict& obs, const std::vector<std::pair<std::string, std::size_t>>& keys);

/// Solves (X^T X + lambda I) W^T = X^T Y over every (obs, action) pair of every
/// trajectory, by Cholesky factorization of the (feature_dim x feature_dim)
/// Gram matrix. Throws ValidationError for lambda <= 0, an empty set or
/// inconsistent dimensions.
LinearBCModel train_bc(std::span<const Trajectory> trajectories, double lambda, ControlMode mode);

/// Mean squared residual of the model over the pooled pairs, plus the ridge
/// penalty lambda * |W|^2 / n: the objective train_bc minimizes (scaled).
double bc_objective(const LinearBCModel& model, std::span<const Trajectory> trajectories);

/// The model predicts stored action rows for `cfg`; a gripper column is
/// rounded to the nearest code.
PolicyRef make_bc_policy(LinearBCModel model, const EnvConfig& cfg);

/// "RBC1" | u32 action_dim | u32 feature_dim | W as little-endian f64,
/// row-major | f64 lambda | u8 control mode | u16 key count | per key
/// {u8 name length, name, u32 dim}.
void save_bc_model(const std::filesystem::path& path, const LinearBCModel& model);
LinearBCModel load_bc_model(const std::filesystem::path& path);

struct EvalOptions {
  std::size_t n_episodes = 25;
  std::uint64_t seed = 0;
  /// Replaces the environment's reward function; success is unaffected.
  std::optional<RewardFn> reward_fn;
};

struct EpisodeRow {
  std::uint64_t episode = 0;
  bool success = false;
  double episode_return = 0.0;
  std::uint32_t length = 0;
};

struct EvalReport {
  std::string env_id;
  std::string policy_kind;
  std::uint64_t seed = 0;
  double success_rate = 0.0;
  double mean_return = 0.0;
  std::vector<EpisodeRow> episodes;

  std::string to_json() const;
};

/// Runs episodes 0..n-1 of `env_id` with the env seed set to options.seed.
/// An episode counts as a success when its final step reports success.
/// Throws ValidationError("empty evaluation") for n_episodes == 0.
EvalReport evaluate_policy(const EnvRegistry& registry, const Policy& policy, const std::string& env_id,
                           const EvalOptions& options);

/// Policy rng for episode `episode` under env seed `seed`.
CounterRng policy_rng(std::uint64_t seed, std::uint64_t episode);

}  // namespace hivekit
