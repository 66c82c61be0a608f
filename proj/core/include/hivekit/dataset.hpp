#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hivekit/agents.hpp"
#include "hivekit/collector.hpp"
#include "hivekit/types.hpp"

namespace hivekit {

class EnvRegistry;

using Digest = std::array<std::uint8_t, 32>;

/// SHA-256.
Digest sha256(std::span<const std::uint8_t> bytes);
Digest sha256(std::string_view text);
std::string to_hex(const Digest& d);
/// Digest of the serialized config with its seed set to 0.
Digest config_digest(const EnvConfig& cfg);

// ---------------------------------------------------------------- container

inline constexpr std::uint16_t kRslVersion = 1;

struct IndexEntry {
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
};

/// Writes a RoboSet-lite container (docs/dataset_format.md). Every
/// trajectory must carry cfg's env_id and, when present, a config_digest
/// metadata entry equal to config_digest(cfg). Throws DatasetError.
void write_trajectories(const std::filesystem::path& path, const EnvConfig& cfg, std::span<const Trajectory> trajs);

/// Reader with random access through the index. The header, config digest
/// and index are validated on open; groups are parsed on demand.
class DatasetReader {
 public:
  /// Throws DatasetError("not a RoboSet-lite file") on a bad magic and
  /// DatasetError for any other malformation.
  explicit DatasetReader(const std::filesystem::path& path);

  const EnvConfig& config() const { return config_; }
  const std::string& config_text() const { return config_text_; }
  const Digest& digest() const { return digest_; }
  std::uint16_t version() const { return version_; }
  std::size_t size() const { return index_.size(); }
  const std::vector<IndexEntry>& index() const { return index_; }

  Trajectory read(std::size_t k);
  std::vector<Trajectory> read_all();

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::uint64_t file_size_ = 0;
  std::uint16_t version_ = 0;
  std::string config_text_;
  EnvConfig config_;
  Digest digest_{};
  std::vector<IndexEntry> index_;
};

// ---------------------------------------------------------------- recording

/// Rebuilds whole episodes from collector batches recorded with
/// record_states. Batches of one worker must arrive in order, which the
/// collector guarantees; episodes cut off by the step budget are dropped.
class TrajectoryAssembler {
 public:
  TrajectoryAssembler(EnvConfig cfg, TrajectorySource source);
  void add(const RolloutBatch& batch);
  /// Completed trajectories, ordered by (worker, episode).
  std::vector<Trajectory> take();

 private:
  struct Open {
    std::optional<Trajectory> traj;
  };
  EnvConfig cfg_;
  TrajectorySource source_;
  std::vector<Open> open_;
  std::vector<std::pair<std::pair<std::size_t, std::uint64_t>, Trajectory>> done_;
};

/// Starts an empty trajectory for an episode beginning at `initial_state`
/// with goal `goal`; sets the seed, goal and config_digest metadata.
Trajectory begin_trajectory(const EnvConfig& cfg, std::uint64_t seed, const SimState& initial_state, const Vec2& goal,
                            TrajectorySource source);
/// Appends one step: the observation seen before the action, the action and
/// its outcome, and the state after it.
void append_step(Trajectory& t, const EnvConfig& cfg, const ObsDict& obs, const RobotCommand& cmd,
                 const StepResult& result, const SimState& state_after);

/// Episodes 0..n-1 of `env_id` under `seed`, run sequentially.
std::vector<Trajectory> record_episodes(const EnvRegistry& registry, const std::string& env_id, const Policy& policy,
                                        std::size_t n_episodes, std::uint64_t seed, TrajectorySource source);

// ---------------------------------------------------------------- replay

struct ReplayReport {
  double final_state_diff = 0.0;
  double per_step_max_diff = 0.0;
};

/// Resets a noise-free sim environment to traj.initial_state with the goal
/// from the "goal" metadata and re-applies every action. Diffs are L2 norms
/// of state_vector differences against the recorded states. Throws
/// ValidationError for a hardware config, a wrong action width, a trajectory
/// longer than the horizon or missing per-step states.
ReplayReport replay_trajectory(const Trajectory& traj, const EnvConfig& cfg);

struct HistogramBin {
  std::string label;
  double upper = 0.0;  // inclusive bound; +inf for the last bin
  std::size_t count = 0;
};

struct ContainerReplayReport {
  std::string env_id;
  std::size_t n_trajectories = 0;
  std::vector<double> final_state_diffs;
  std::vector<double> per_step_max_diffs;
  double max_final_state_diff = 0.0;
  double max_per_step_diff = 0.0;
  std::vector<HistogramBin> histogram;

  std::string to_json() const;
  std::string to_text() const;
};

/// Replays every trajectory of a container against its embedded config.
/// With `expected`, refuses (DatasetError) unless the container's digest
/// equals config_digest(*expected).
ContainerReplayReport replay_container(const std::filesystem::path& path,
                                       const std::optional<EnvConfig>& expected = std::nullopt);

/// Histogram over the bins {0, 1e-12, 1e-9, 1e-6, 1e-3, inf}.
std::vector<HistogramBin> diff_histogram(std::span<const double> diffs);

// ---------------------------------------------------------------- manifest

struct ManifestRow {
  std::string domain;
  std::size_t n_trajectories = 0;
  std::size_t n_tasks = 0;
  std::string world;    // "Sim" or "Real"
  std::string visuals;  // "<n> cam"
  std::string source;
};

struct DatasetManifest {
  std::vector<ManifestRow> rows;
  std::string to_table() const;
  std::string to_json() const;
};

/// One row per (env_id, source) across the containers, in first-seen order.
DatasetManifest build_manifest(std::span<const std::filesystem::path> containers);

/// Human-facing label of a source, e.g. "Expert Policy", "Human TeleOp".
std::string source_label(TrajectorySource s);

}  // namespace hivekit
