#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hivekit/agents.hpp"
#include "hivekit/types.hpp"

namespace hivekit {

class EnvRegistry;

struct CollectorConfig {
  std::string env_id;
  std::size_t n_workers = 1;
  std::size_t batch_size = 500;
  std::uint64_t total_steps = 0;
  PolicyRef policy;
  std::vector<std::uint64_t> seeds;  // one per worker
  /// Bounded queue capacity in batches; 0 means 2 * n_workers.
  std::size_t queue_capacity = 0;
  /// Also keep the post-step SimState of every step and the start state of
  /// every episode, which is what dataset recording needs.
  bool record_states = false;
};

/// Episode that began inside a batch.
struct EpisodeStart {
  std::size_t step = 0;  // index within the batch of its first step
  std::uint64_t episode = 0;
  SimState initial_state;
  Vec2 goal;
};

/// Contiguous steps of one worker. observations[k] holds the reading seen
/// before actions[k]; dones marks the last step of an episode.
struct RolloutBatch {
  std::size_t worker_id = 0;
  std::uint64_t env_seed = 0;
  std::uint64_t batch_seq = 0;  // per worker, from 0
  std::size_t action_dim = 0;
  std::vector<SensorSeries> observations;
  std::vector<double> actions;
  std::vector<double> rewards;
  std::vector<std::uint8_t> successes;
  std::vector<std::uint8_t> dones;
  std::vector<std::size_t> episode_ends;  // indices where dones == 1
  std::vector<GripperAction> grippers;
  bool final_partial = false;
  // Filled only with record_states.
  std::vector<SimState> states;
  std::vector<EpisodeStart> starts;

  std::size_t size() const { return rewards.size(); }
};

struct CollectionReport {
  double wall_seconds = 0.0;
  std::uint64_t steps_delivered = 0;
  double steps_per_sec = 0.0;
  std::vector<std::uint64_t> per_worker_steps;
  std::uint64_t batches = 0;
};

using BatchSink = std::function<void(RolloutBatch&&)>;

/// Runs n_workers threads, each owning an environment built with its own
/// seed. Workers claim step budgets of batch_size from a shared counter, so
/// exactly total_steps steps are produced and delivered; only the batch that
/// takes the last claim can be short, and it is flagged final_partial.
/// Batches reach `sink` on the calling thread in completion order. A full
/// queue blocks workers. A worker exception stops collection and is rethrown
/// here once every thread has joined.
CollectionReport collect_async(const EnvRegistry& registry, const CollectorConfig& cfg, const BatchSink& sink);

enum class ObsMode { State, Visual };
std::string to_string(ObsMode m);
ObsMode parse_obs_mode(const std::string& s);

struct ThroughputReport {
  std::string env_id;  // the environment actually stepped
  std::size_t n_workers = 0;
  ObsMode obs_mode = ObsMode::State;
  std::uint64_t total_steps = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> runs;  // steps/s per seed
  double steps_per_sec_mean = 0.0;
  double steps_per_sec_std = 0.0;  // sample standard deviation
  std::vector<std::vector<std::uint64_t>> per_worker_steps;

  std::string to_json() const;
};

/// Random-policy throughput over three runs seeded base_seed, base_seed+1,
/// base_seed+2. Visual mode steps the env's _v2d variant so the camera
/// rasterization is inside the timed loop.
ThroughputReport benchmark_throughput(const EnvRegistry& registry, const std::string& env_id, std::size_t n_workers,
                                      std::uint64_t total_steps, ObsMode mode, std::uint64_t base_seed = 0,
                                      std::size_t batch_size = 500);

}  // namespace hivekit
