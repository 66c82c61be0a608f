#include <gtest/gtest.h>

#include <map>
#include <set>

#include "hivekit/agents.hpp"
#include "hivekit/collector.hpp"
#include "hivekit/error.hpp"
#include "test_support.hpp"

using namespace hivekit;

namespace {

const EnvRegistry& reg() { return testkit::shipped_registry(); }

struct Flat {
  std::vector<double> actions, rewards, obs0;
  std::vector<std::uint8_t> dones;
};

// What one worker with env seed `seed` must produce, stepped sequentially.
Flat sequential(const std::string& id, std::uint64_t seed, std::uint64_t n, const Policy& policy) {
  Flat f;
  auto env = reg().make(id, seed);
  std::uint64_t ep = 0;
  auto r = env->reset(ep);
  CounterRng rng = policy_rng(seed, ep);
  const auto& first = env->config().sensors.front().name;
  for (std::uint64_t k = 0; k < n; ++k) {
    const auto& o = r.obs.at(first);
    f.obs0.insert(f.obs0.end(), o.begin(), o.end());
    const auto cmd = policy.act(r.obs, rng);
    r = env->step(cmd);
    f.actions.insert(f.actions.end(), cmd.values.begin(), cmd.values.end());
    f.rewards.push_back(r.reward);
    f.dones.push_back(r.done);
    if (r.done) {
      r = env->reset(++ep);
      rng = policy_rng(seed, ep);
    }
  }
  return f;
}

void append(Flat& f, const RolloutBatch& b) {
  f.actions.insert(f.actions.end(), b.actions.begin(), b.actions.end());
  f.rewards.insert(f.rewards.end(), b.rewards.begin(), b.rewards.end());
  f.obs0.insert(f.obs0.end(), b.observations[0].values.begin(), b.observations[0].values.end());
  f.dones.insert(f.dones.end(), b.dones.begin(), b.dones.end());
}

CollectorConfig config(const std::string& id, std::size_t workers, std::uint64_t total, std::size_t batch) {
  CollectorConfig c;
  c.env_id = id;
  c.n_workers = workers;
  c.total_steps = total;
  c.batch_size = batch;
  c.policy = make_random_policy(reg().config(id));
  for (std::size_t w = 0; w < workers; ++w) c.seeds.push_back(100 + w);
  return c;
}

}  // namespace

TEST(Collector, SingleWorkerEqualsSequential) {
  auto cfg = config("push-v0", 1, 730, 100);
  Flat got;
  std::vector<std::uint64_t> seqs;
  collect_async(reg(), cfg, [&](RolloutBatch&& b) {
    seqs.push_back(b.batch_seq);
    append(got, b);
  });
  EXPECT_EQ(seqs, (std::vector<std::uint64_t>{0, 1, 2, 3, 4, 5, 6, 7}));
  const auto want = sequential("push-v0", 100, 730, *cfg.policy);
  EXPECT_EQ(got.actions, want.actions);
  EXPECT_EQ(got.rewards, want.rewards);
  EXPECT_EQ(got.obs0, want.obs0);
  EXPECT_EQ(got.dones, want.dones);
}

TEST(Collector, AccountingAndIntactBatches) {
  auto cfg = config("reach-v0", 4, 1000, 100);
  std::uint64_t total = 0;
  std::size_t batches = 0;
  const auto rep = collect_async(reg(), cfg, [&](RolloutBatch&& b) {
    ++batches;
    total += b.size();
    EXPECT_EQ(b.size(), 100u);
    EXPECT_FALSE(b.final_partial);
    EXPECT_EQ(b.actions.size(), b.size() * b.action_dim);
    EXPECT_EQ(b.dones.size(), b.size());
    for (const auto& s : b.observations) EXPECT_EQ(s.values.size(), b.size() * s.dim);
    std::size_t ends = 0;
    for (auto d : b.dones) ends += d;
    EXPECT_EQ(ends, b.episode_ends.size());
  });
  EXPECT_EQ(total, 1000u);
  EXPECT_EQ(batches, 10u);
  EXPECT_EQ(rep.steps_delivered, 1000u);
  std::uint64_t per = 0;
  for (auto s : rep.per_worker_steps) per += s;
  EXPECT_EQ(per, 1000u);
}

TEST(Collector, NoLossNoDuplicationAcrossWorkers) {
  auto cfg = config("reach-v0", 3, 5000, 250);
  std::multiset<std::pair<std::size_t, std::uint64_t>> delivered;
  std::map<std::size_t, std::uint64_t> steps;
  const auto rep = collect_async(reg(), cfg, [&](RolloutBatch&& b) {
    delivered.insert({b.worker_id, b.batch_seq});
    steps[b.worker_id] += b.size();
  });
  // Every worker's sequence numbers are 0..k-1, each exactly once.
  for (std::size_t w = 0; w < 3; ++w) {
    const auto k = delivered.count({w, 0}) ? std::distance(delivered.lower_bound({w, 0}), delivered.upper_bound({w, ~0ull})) : 0;
    for (std::int64_t s = 0; s < k; ++s) EXPECT_EQ(delivered.count({w, static_cast<std::uint64_t>(s)}), 1u);
    EXPECT_EQ(steps[w], rep.per_worker_steps[w]);
  }
  EXPECT_EQ(delivered.size(), rep.batches);
  EXPECT_EQ(rep.steps_delivered, 5000u);
}

// A worker's stream depends only on its own seed, not on how many workers run.
TEST(Collector, WorkersAreIsolated) {
  auto cfg = config("push-v0", 4, 4000, 200);
  std::map<std::size_t, Flat> per;
  collect_async(reg(), cfg, [&](RolloutBatch&& b) { append(per[b.worker_id], b); });
  for (auto& [w, f] : per) {
    const auto want = sequential("push-v0", cfg.seeds[w], f.rewards.size(), *cfg.policy);
    EXPECT_EQ(f.actions, want.actions) << "worker " << w;
    EXPECT_EQ(f.rewards, want.rewards) << "worker " << w;
  }
}

TEST(Collector, FinalPartialBatchIsFlagged) {
  auto cfg = config("reach-v0", 2, 1050, 100);
  std::size_t partial = 0;
  std::uint64_t total = 0;
  collect_async(reg(), cfg, [&](RolloutBatch&& b) {
    total += b.size();
    if (b.final_partial) {
      ++partial;
      EXPECT_EQ(b.size(), 50u);
    } else {
      EXPECT_EQ(b.size(), 100u);
    }
  });
  EXPECT_EQ(partial, 1u);
  EXPECT_EQ(total, 1050u);
}

TEST(Collector, InvalidConfigs) {
  auto sink = [](RolloutBatch&&) {};
  auto c = config("reach-v0", 2, 1000, 100);
  c.seeds.pop_back();
  EXPECT_THROW(collect_async(reg(), c, sink), ValidationError);
  c = config("reach-v0", 1, 50, 100);
  EXPECT_THROW(collect_async(reg(), c, sink), ValidationError);
  c = config("reach-v0", 1, 1000, 100);
  c.env_id = "missing-v0";
  EXPECT_THROW(collect_async(reg(), c, sink), RegistryError);
}

TEST(Collector, SinkErrorStopsCollection) {
  auto c = config("reach-v0", 2, 100000, 100);
  int seen = 0;
  EXPECT_THROW(collect_async(reg(), c,
                             [&](RolloutBatch&&) {
                               if (++seen == 3) throw std::runtime_error("sink failed");
                             }),
               std::runtime_error);
  EXPECT_EQ(seen, 3);
}

TEST(Collector, ThroughputReportShape) {
  const auto rep = benchmark_throughput(reg(), "reach-v0", 1, 1000, ObsMode::Visual, 0, 500);
  EXPECT_EQ(rep.env_id, "reach_v2d-v0");
  EXPECT_EQ(rep.runs.size(), 3u);
  EXPECT_EQ(rep.seeds, (std::vector<std::uint64_t>{0, 1, 2}));
  EXPECT_GT(rep.steps_per_sec_mean, 0.0);
  EXPECT_NE(rep.to_json().find("hivekit.bench/1"), std::string::npos);
  EXPECT_THROW(parse_obs_mode("pixels"), ValidationError);
}
