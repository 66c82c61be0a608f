#include "hivekit/collector.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "hivekit/config.hpp"
#include "hivekit/error.hpp"
#include "hivekit/registry.hpp"
#include "json.hpp"

namespace hivekit {

namespace {

class BatchQueue {
 public:
  explicit BatchQueue(std::size_t capacity) : capacity_(capacity) {}

  /// Blocks while full. Returns false if the queue was aborted.
  bool push(RolloutBatch&& b) {
    std::unique_lock lk(mu_);
    not_full_.wait(lk, [&] { return aborted_ || q_.size() < capacity_; });
    if (aborted_) return false;
    q_.push_back(std::move(b));
    not_empty_.notify_one();
    return true;
  }

  /// Blocks until a batch is available or all producers are finished.
  std::optional<RolloutBatch> pop() {
    std::unique_lock lk(mu_);
    not_empty_.wait(lk, [&] { return aborted_ || !q_.empty() || producers_ == 0; });
    if (aborted_ || q_.empty()) return std::nullopt;
    RolloutBatch b = std::move(q_.front());
    q_.pop_front();
    not_full_.notify_one();
    return b;
  }

  void set_producers(std::size_t n) {
    std::lock_guard lk(mu_);
    producers_ = n;
  }

  void producer_done() {
    std::lock_guard lk(mu_);
    --producers_;
    not_empty_.notify_all();
  }

  void abort() {
    std::lock_guard lk(mu_);
    aborted_ = true;
    not_full_.notify_all();
    not_empty_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable not_full_, not_empty_;
  std::deque<RolloutBatch> q_;
  std::size_t capacity_;
  std::size_t producers_ = 0;
  bool aborted_ = false;
};

/// Takes up to `want` steps from the shared budget.
std::uint64_t claim(std::atomic<std::uint64_t>& remaining, std::uint64_t want) {
  std::uint64_t cur = remaining.load();
  while (cur > 0) {
    const std::uint64_t take = std::min(cur, want);
    if (remaining.compare_exchange_weak(cur, cur - take)) return take;
  }
  return 0;
}

class Worker {
 public:
  Worker(const EnvRegistry& registry, const CollectorConfig& cfg, std::size_t id)
      : cfg_(cfg), id_(id), env_(registry.make(cfg.env_id, cfg.seeds[id])) {
    for (const auto& s : env_->config().sensors) sensor_names_.push_back(s.name);
  }

  void run(std::atomic<std::uint64_t>& remaining, BatchQueue& queue, std::atomic<bool>& stop) {
    begin_episode(0);
    std::uint64_t seq = 0;
    while (!stop.load(std::memory_order_relaxed)) {
      const std::uint64_t n = claim(remaining, cfg_.batch_size);
      if (n == 0) break;
      RolloutBatch b = produce(n);
      b.batch_seq = seq++;
      b.final_partial = n < cfg_.batch_size;
      if (!queue.push(std::move(b))) break;
    }
  }

 private:
  void begin_episode(std::uint64_t ep) {
    episode_ = ep;
    rng_ = policy_rng(cfg_.seeds[id_], ep);
    last_ = env_->reset(ep);
    pending_start_ = true;
  }

  RolloutBatch produce(std::uint64_t n) {
    RolloutBatch b;
    b.worker_id = id_;
    b.env_seed = cfg_.seeds[id_];
    b.action_dim = env_->action_dim();
    for (const auto& name : sensor_names_) {
      const auto& v = last_.obs.at(name);
      b.observations.push_back({name, v.size(), {}});
      b.observations.back().values.reserve(n * v.size());
    }
    b.actions.reserve(n * b.action_dim);
    b.rewards.reserve(n);
    for (std::uint64_t k = 0; k < n; ++k) {
      if (pending_start_) {
        if (cfg_.record_states) b.starts.push_back({k, episode_, env_->state(), env_->task().target});
        pending_start_ = false;
      }
      for (std::size_t i = 0; i < sensor_names_.size(); ++i) {
        const auto& v = last_.obs.at(sensor_names_[i]);
        auto& dst = b.observations[i].values;
        dst.insert(dst.end(), v.begin(), v.end());
      }
      const RobotCommand cmd = cfg_.policy->act(last_.obs, rng_);
      StepResult r = env_->step(cmd);
      b.actions.insert(b.actions.end(), cmd.values.begin(), cmd.values.end());
      b.grippers.push_back(cmd.gripper);
      b.rewards.push_back(r.reward);
      b.successes.push_back(r.success ? 1 : 0);
      b.dones.push_back(r.done ? 1 : 0);
      if (cfg_.record_states) b.states.push_back(env_->state());
      if (r.done) {
        b.episode_ends.push_back(static_cast<std::size_t>(k));
        begin_episode(episode_ + 1);
      } else {
        last_ = std::move(r);
      }
    }
    return b;
  }

  const CollectorConfig& cfg_;
  std::size_t id_;
  std::unique_ptr<Env> env_;
  std::vector<std::string> sensor_names_;
  std::uint64_t episode_ = 0;
  CounterRng rng_;
  StepResult last_;
  bool pending_start_ = false;
};

}  // namespace

CollectionReport collect_async(const EnvRegistry& registry, const CollectorConfig& cfg, const BatchSink& sink) {
  if (cfg.n_workers == 0) throw ValidationError("n_workers must be positive");
  if (cfg.batch_size == 0) throw ValidationError("batch_size must be positive");
  if (cfg.total_steps < cfg.batch_size) throw ValidationError("total_steps must be >= batch_size");
  if (cfg.seeds.size() != cfg.n_workers) throw ValidationError("need exactly one seed per worker");
  if (!cfg.policy) throw ValidationError("collector needs a policy");
  if (!registry.contains(cfg.env_id)) throw RegistryError("unknown env id '" + cfg.env_id + "'");

  // Environments are built up front so configuration errors surface here.
  std::vector<std::unique_ptr<Worker>> workers;
  for (std::size_t i = 0; i < cfg.n_workers; ++i) workers.push_back(std::make_unique<Worker>(registry, cfg, i));

  BatchQueue queue(cfg.queue_capacity ? cfg.queue_capacity : 2 * cfg.n_workers);
  queue.set_producers(cfg.n_workers);
  std::atomic<std::uint64_t> remaining{cfg.total_steps};
  std::atomic<bool> stop{false};
  std::mutex err_mu;
  std::exception_ptr worker_error;

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < cfg.n_workers; ++i) {
    threads.emplace_back([&, i] {
      try {
        workers[i]->run(remaining, queue, stop);
      } catch (...) {
        {
          std::lock_guard lk(err_mu);
          if (!worker_error) worker_error = std::current_exception();
        }
        stop = true;
        queue.abort();
      }
      queue.producer_done();
    });
  }

  CollectionReport report;
  report.per_worker_steps.assign(cfg.n_workers, 0);
  std::exception_ptr sink_error;
  while (auto b = queue.pop()) {
    report.steps_delivered += b->size();
    report.per_worker_steps[b->worker_id] += b->size();
    ++report.batches;
    try {
      sink(std::move(*b));
    } catch (...) {
      sink_error = std::current_exception();
      stop = true;
      queue.abort();
      break;
    }
  }
  for (auto& t : threads) t.join();
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (worker_error) std::rethrow_exception(worker_error);
  if (sink_error) std::rethrow_exception(sink_error);
  report.steps_per_sec = report.wall_seconds > 0 ? report.steps_delivered / report.wall_seconds : 0.0;
  return report;
}

std::string to_string(ObsMode m) { return m == ObsMode::State ? "state" : "visual"; }

ObsMode parse_obs_mode(const std::string& s) {
  if (s == "state") return ObsMode::State;
  if (s == "visual") return ObsMode::Visual;
  throw ValidationError("obs mode must be 'state' or 'visual', got '" + s + "'");
}

ThroughputReport benchmark_throughput(const EnvRegistry& registry, const std::string& env_id, std::size_t n_workers,
                                      std::uint64_t total_steps, ObsMode mode, std::uint64_t base_seed,
                                      std::size_t batch_size) {
  ThroughputReport rep;
  rep.env_id = mode == ObsMode::Visual ? visual_variant_id(env_id) : env_id;
  if (!registry.contains(env_id)) throw RegistryError("unknown env id '" + env_id + "'");
  if (!registry.contains(rep.env_id)) throw RegistryError("visual variant '" + rep.env_id + "' is not registered");
  rep.n_workers = n_workers;
  rep.obs_mode = mode;
  rep.total_steps = total_steps;

  CollectorConfig cc;
  cc.env_id = rep.env_id;
  cc.n_workers = n_workers;
  cc.batch_size = std::min<std::uint64_t>(batch_size, total_steps);
  cc.total_steps = total_steps;
  cc.policy = make_random_policy(registry.config(rep.env_id));
  for (std::uint64_t run = 0; run < 3; ++run) {
    const std::uint64_t seed = base_seed + run;
    rep.seeds.push_back(seed);
    cc.seeds.clear();
    for (std::size_t w = 0; w < n_workers; ++w) cc.seeds.push_back(seed * 1000 + w);
    const auto r = collect_async(registry, cc, [](RolloutBatch&&) {});
    rep.runs.push_back(r.steps_per_sec);
    rep.per_worker_steps.push_back(r.per_worker_steps);
  }
  double sum = 0.0;
  for (double v : rep.runs) sum += v;
  rep.steps_per_sec_mean = sum / rep.runs.size();
  double ss = 0.0;
  for (double v : rep.runs) ss += (v - rep.steps_per_sec_mean) * (v - rep.steps_per_sec_mean);
  rep.steps_per_sec_std = std::sqrt(ss / (rep.runs.size() - 1));
  return rep;
}

std::string ThroughputReport::to_json() const {
  nlohmann::ordered_json j;
  j["schema"] = "hivekit.bench/1";
  j["env_id"] = env_id;
  j["n_workers"] = n_workers;
  j["obs_mode"] = to_string(obs_mode);
  j["total_steps"] = total_steps;
  j["seeds"] = seeds;
  j["steps_per_sec_runs"] = runs;
  j["steps_per_sec_mean"] = steps_per_sec_mean;
  j["steps_per_sec_std"] = steps_per_sec_std;
  j["per_worker_steps"] = per_worker_steps;
  return j.dump(2);
}

}  // namespace hivekit
