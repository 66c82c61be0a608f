// hivekit: command-line front end for environments, collection, datasets
// and policies. Exit codes: 0 success, 1 usage, 2 runtime error,
// 3 verification failure.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "hivekit/agents.hpp"
#include "hivekit/collector.hpp"
#include "hivekit/config.hpp"
#include "hivekit/dataset.hpp"
#include "hivekit/error.hpp"
#include "hivekit/registry.hpp"
#include "hivekit/teleop.hpp"
#include "json.hpp"

#ifndef HIVEKIT_DEFAULT_CONFIG_DIR
#define HIVEKIT_DEFAULT_CONFIG_DIR "configs"
#endif

namespace {

using namespace hivekit;
using ojson = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitVerify = 3;

struct Common {
  std::uint64_t seed = 0;
  std::string config;
  std::string out;
  bool json = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Base seed");
  sub->add_option("--config", c.config, "Config file or directory (default: $HIVEKIT_CONFIG_DIR or the built-in fixtures)");
  sub->add_option("--out", c.out, "Output path");
  sub->add_flag("--json", c.json, "Machine-readable JSON on stdout");
}

EnvRegistry load_registry(const Common& c) {
  EnvRegistry reg;
  if (!c.config.empty()) {
    reg.add_path(c.config);
  } else if (const char* dir = std::getenv("HIVEKIT_CONFIG_DIR"); dir && *dir) {
    reg.add_path(dir);
  } else {
    reg.add_path(HIVEKIT_DEFAULT_CONFIG_DIR);
  }
  return reg;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << text << "\n";
}

/// Prints the report as JSON or text, and writes JSON to --out when the
/// subcommand has no other use for it.
void emit(const Common& c, const std::string& json_text, const std::string& human, bool out_is_report = true) {
  std::cout << (c.json ? json_text : human);
  if (!(c.json ? json_text : human).ends_with('\n')) std::cout << "\n";
  if (out_is_report && !c.out.empty()) write_text(c.out, json_text);
}

/// "expert", "random", or a model file ("bc:<path>" or a path ending .rbc).
PolicyRef make_policy(const std::string& spec, const EnvConfig& cfg) {
  if (spec == "expert") return make_scripted_expert(cfg);
  if (spec == "random") return make_random_policy(cfg);
  std::string path = spec;
  if (path.rfind("bc:", 0) == 0) path = path.substr(3);
  if (path.ends_with(".rbc") || spec.rfind("bc:", 0) == 0) return make_bc_policy(load_bc_model(path), cfg);
  throw ValidationError("unknown policy '" + spec + "' (expected expert, random or bc:<model>)");
}

TrajectorySource source_for(const std::string& policy) {
  if (policy == "expert") return TrajectorySource::ExpertPolicy;
  if (policy == "random") return TrajectorySource::Random;
  return TrajectorySource::Scripted;
}

std::vector<std::uint64_t> worker_seeds(std::uint64_t seed, std::size_t n) {
  std::vector<std::uint64_t> s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(seed * 1000 + i);
  return s;
}

// ---------------------------------------------------------------- commands

int cmd_list(const Common& c) {
  const auto reg = load_registry(c);
  ojson j;
  j["schema"] = "hivekit.list/1";
  j["envs"] = ojson::array();
  std::ostringstream os;
  for (const auto& id : reg.ids()) {
    const auto& cfg = reg.config(id);
    ojson sensors = ojson::array();
    for (const auto& s : cfg.sensors) sensors.push_back(s.name);
    j["envs"].push_back({{"id", id},
                         {"robot", to_string(cfg.robot.kind)},
                         {"task", to_string(cfg.task.kind)},
                         {"backend", to_string(cfg.backend)},
                         {"control_mode", to_string(cfg.control_mode)},
                         {"horizon", cfg.horizon},
                         {"sensors", sensors}});
    os << id << "  " << to_string(cfg.task.kind) << " / " << to_string(cfg.robot.kind) << " / "
       << to_string(cfg.backend) << "  sensors:";
    for (const auto& s : cfg.sensors) os << " " << s.name;
    os << "\n";
  }
  emit(c, j.dump(2), os.str());
  return kExitOk;
}

int cmd_check(const Common& c) {
  const auto reg = load_registry(c);
  ojson j;
  j["schema"] = "hivekit.check/1";
  j["registered"] = reg.size();
  auto& rows = j["envs"] = ojson::array();
  std::ostringstream os;
  std::size_t passed = 0;
  for (const auto& id : reg.ids()) {
    std::string error;
    try {
      auto env = reg.make(id, c.seed);
      auto r = env->reset();
      auto policy = make_random_policy(env->config());
      auto rng = policy_rng(c.seed, 0);
      r = env->step(policy->act(r.obs, rng));
      if (r.obs.size() != env->config().sensors.size()) error = "observation keys do not match sensors";
    } catch (const std::exception& e) {
      error = e.what();
    }
    passed += error.empty() ? 1 : 0;
    rows.push_back({{"id", id}, {"ok", error.empty()}, {"error", error}});
    os << (error.empty() ? "ok    " : "FAIL  ") << id << (error.empty() ? "" : ": " + error) << "\n";
  }
  const bool ok = passed == reg.size() && rows.size() == reg.size();
  j["passed"] = passed;
  j["ok"] = ok;
  os << passed << "/" << reg.size() << " environments constructed, reset and stepped\n";
  emit(c, j.dump(2), os.str());
  return ok ? kExitOk : kExitVerify;
}

struct CollectArgs {
  std::string env, policy = "expert", source;
  std::uint64_t steps = 10000;
  std::size_t workers = 1, batch = 500, episodes = 0;
};

int cmd_collect(const Common& c, const CollectArgs& a) {
  const auto reg = load_registry(c);
  const auto& cfg = reg.config(a.env);
  auto policy = make_policy(a.policy, cfg);
  const auto source = a.source.empty() ? source_for(a.policy) : parse_trajectory_source(a.source);
  ojson j;
  j["schema"] = "hivekit.collect/1";
  j["env_id"] = a.env;
  j["policy"] = a.policy;
  j["seed"] = c.seed;
  std::vector<Trajectory> trajs;
  const auto t0 = std::chrono::steady_clock::now();
  if (a.episodes > 0) {
    trajs = record_episodes(reg, a.env, *policy, a.episodes, c.seed, source);
    std::uint64_t steps = 0;
    for (const auto& t : trajs) steps += t.length();
    j["steps"] = steps;
    j["workers"] = 1;
    j["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  } else {
    CollectorConfig cc;
    cc.env_id = a.env;
    cc.n_workers = a.workers;
    cc.batch_size = a.batch;
    cc.total_steps = a.steps;
    cc.policy = policy;
    cc.seeds = worker_seeds(c.seed, a.workers);
    cc.record_states = !c.out.empty();
    TrajectoryAssembler assembler(cfg, source);
    const auto rep = collect_async(reg, cc, [&](RolloutBatch&& b) {
      if (cc.record_states) assembler.add(b);
    });
    trajs = assembler.take();
    j["steps"] = rep.steps_delivered;
    j["workers"] = a.workers;
    j["batches"] = rep.batches;
    j["wall_seconds"] = rep.wall_seconds;
    j["steps_per_sec"] = rep.steps_per_sec;
    j["per_worker_steps"] = rep.per_worker_steps;
  }
  std::size_t successes = 0;
  for (const auto& t : trajs) successes += (t.length() && t.successes.back()) ? 1 : 0;
  j["trajectories"] = trajs.size();
  j["successful_trajectories"] = successes;
  if (!c.out.empty()) {
    write_trajectories(c.out, cfg, trajs);
    j["out"] = c.out;
  }
  std::ostringstream os;
  os << "collected " << j["steps"].get<std::uint64_t>() << " steps on " << a.env << " with policy " << a.policy
     << ": " << trajs.size() << " complete trajectories (" << successes << " successful)";
  if (!c.out.empty()) os << ", written to " << c.out;
  emit(c, j.dump(2), os.str(), false);
  return kExitOk;
}

int cmd_bench(const Common& c, const std::string& env, std::size_t workers, const std::string& mode,
              std::uint64_t steps) {
  const auto reg = load_registry(c);
  const auto rep = benchmark_throughput(reg, env, workers, steps, parse_obs_mode(mode), c.seed);
  std::ostringstream os;
  os << rep.env_id << " " << mode << " x" << workers << ": " << static_cast<long long>(rep.steps_per_sec_mean)
     << " +- " << static_cast<long long>(rep.steps_per_sec_std) << " steps/s over 3 seeds";
  emit(c, rep.to_json(), os.str());
  return kExitOk;
}

std::atomic<bool> g_interrupted{false};

int cmd_teleop(const Common& c, const std::string& env, std::uint16_t port, double rate, bool ee,
               double duration) {
  const auto reg = load_registry(c);
  TeleopOptions o;
  o.port = port;
  o.rate_hz = rate;
  o.end_effector_mode = ee;
  o.seed = c.seed;
  o.record_path = c.out;
  TeleopServer server(reg.config(env), o);
  server.start();
  std::signal(SIGINT, [](int) { g_interrupted = true; });
  std::signal(SIGTERM, [](int) { g_interrupted = true; });
  std::cerr << "teleop session for " << env << " on ws://127.0.0.1:" << server.port() << "/ at " << rate
            << " Hz; Ctrl-C to stop\n";
  const auto t0 = std::chrono::steady_clock::now();
  while (!g_interrupted) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    if (duration > 0 && std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >= duration) {
      break;
    }
  }
  server.stop();
  const auto s = server.stats();
  ojson j = {{"schema", "hivekit.teleop/1"},
             {"env_id", env},
             {"session_id", s.session_id},
             {"port", server.port()},
             {"steps", s.steps},
             {"episodes", s.episodes},
             {"mean_step_interval", s.mean_step_interval},
             {"recorded_trajectories", s.recorded}};
  std::ostringstream os;
  os << "session " << s.session_id << ": " << s.steps << " steps, " << s.recorded << " recorded trajectories";
  emit(c, j.dump(2), os.str(), false);
  return kExitOk;
}

int cmd_replay(const Common& c, const std::string& dataset, const std::string& report, const std::string& expect_env,
               double tolerance) {
  std::optional<EnvConfig> expected;
  if (!expect_env.empty()) expected = load_registry(c).config(expect_env);
  const auto rep = replay_container(dataset, expected);
  if (!report.empty()) write_text(report, rep.to_json());
  emit(c, rep.to_json(), rep.to_text());
  return rep.max_final_state_diff <= tolerance ? kExitOk : kExitVerify;
}

int cmd_train_bc(const Common& c, const std::vector<std::string>& datasets, double lambda) {
  std::vector<Trajectory> trajs;
  std::optional<EnvConfig> cfg;
  for (const auto& path : datasets) {
    DatasetReader r(path);
    if (cfg && cfg->env_id != r.config().env_id) throw ValidationError("datasets come from different environments");
    if (!cfg) cfg = r.config();
    auto t = r.read_all();
    trajs.insert(trajs.end(), std::make_move_iterator(t.begin()), std::make_move_iterator(t.end()));
  }
  if (!cfg || trajs.empty()) throw ValidationError("cannot train on an empty dataset");
  const auto model = train_bc(trajs, lambda, cfg->control_mode);
  const std::string out = c.out.empty() ? "model.rbc" : c.out;
  save_bc_model(out, model);
  std::size_t pairs = 0;
  for (const auto& t : trajs) pairs += t.length();
  ojson j = {{"schema", "hivekit.train_bc/1"},
             {"env_id", cfg->env_id},
             {"n_trajectories", trajs.size()},
             {"pairs", pairs},
             {"lambda", lambda},
             {"action_dim", model.action_dim},
             {"feature_dim", model.feature_dim},
             {"objective", bc_objective(model, trajs)},
             {"out", out}};
  std::ostringstream os;
  os << "trained linear BC on " << trajs.size() << " trajectories (" << pairs << " pairs) of " << cfg->env_id
     << "; model written to " << out;
  emit(c, j.dump(2), os.str(), false);
  return kExitOk;
}

int cmd_eval(const Common& c, const std::string& env, const std::string& policy_spec, std::size_t episodes,
             bool zero_reward, double min_success) {
  const auto reg = load_registry(c);
  const auto policy = make_policy(policy_spec, reg.config(env));
  EvalOptions o;
  o.n_episodes = episodes;
  o.seed = c.seed;
  if (zero_reward) o.reward_fn = [](const TaskSpec&, const SimState&, const RobotModelSpec&, std::span<const double>) {
    return 0.0;
  };
  const auto rep = evaluate_policy(reg, *policy, env, o);
  std::ostringstream os;
  os << env << " " << rep.policy_kind << ": success_rate " << rep.success_rate << " over " << episodes
     << " episodes, mean return " << rep.mean_return;
  emit(c, rep.to_json(), os.str());
  return rep.success_rate >= min_success ? kExitOk : kExitVerify;
}

int cmd_manifest(const Common& c, const std::vector<std::string>& inputs) {
  std::vector<std::filesystem::path> paths(inputs.begin(), inputs.end());
  const auto m = build_manifest(paths);
  emit(c, m.to_json(), m.to_table());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hivekit: robot learning environments, rollout collection and datasets"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "hivekit 0.1.0");

  Common common;
  auto* list = app.add_subcommand("list", "List registered environments");
  add_common(list, common);

  auto* check = app.add_subcommand("check", "Construct, reset and step every registered environment");
  add_common(check, common);

  CollectArgs ca;
  auto* collect = app.add_subcommand("collect", "Collect rollouts, optionally into a dataset container (--out)");
  add_common(collect, common);
  collect->add_option("--env", ca.env, "Environment id")->required();
  collect->add_option("--policy", ca.policy, "expert, random or bc:<model>");
  collect->add_option("--steps", ca.steps, "Total steps across workers")->check(CLI::PositiveNumber);
  collect->add_option("--workers", ca.workers, "Worker threads")->check(CLI::PositiveNumber);
  collect->add_option("--batch", ca.batch, "Steps per batch")->check(CLI::PositiveNumber);
  collect->add_option("--episodes", ca.episodes, "Record exactly this many episodes sequentially instead of --steps");
  collect->add_option("--source", ca.source, "Source tag: expert_policy, human_teleop, scripted, random");

  std::string bench_env = "reach-v0", obs_mode = "state";
  std::size_t bench_workers = 1;
  std::uint64_t bench_steps = 20000;
  auto* bench = app.add_subcommand("bench", "Throughput benchmark (mean and std over 3 seeds)");
  add_common(bench, common);
  bench->add_option("--env", bench_env, "Environment id");
  bench->add_option("--workers", bench_workers, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--obs-mode", obs_mode, "state or visual")->check(CLI::IsMember({"state", "visual"}));
  bench->add_option("--steps", bench_steps, "Steps per run")->check(CLI::PositiveNumber);

  std::string tele_env;
  std::uint16_t tele_port = 8765;
  double tele_rate = 20.0, tele_duration = 0.0;
  bool tele_ee = false;
  auto* teleop = app.add_subcommand("teleop", "Serve a teleoperation session; --out records to a container");
  add_common(teleop, common);
  teleop->add_option("--env", tele_env, "Environment id")->required();
  teleop->add_option("--port", tele_port, "WebSocket port (0 picks one)");
  teleop->add_option("--rate", tele_rate, "Control rate in Hz")->check(CLI::Range(1.0, 100.0));
  teleop->add_flag("--ee", tele_ee, "Arrow keys drive the end effector");
  teleop->add_option("--duration", tele_duration, "Stop after this many seconds (0 = until Ctrl-C)");

  std::string replay_dataset, replay_report, replay_expect;
  double replay_tol = 0.0;
  auto* replay = app.add_subcommand("replay", "Replay a container and report final-state discrepancies");
  add_common(replay, common);
  replay->add_option("--dataset", replay_dataset, "Container path")->required();
  replay->add_option("--report", replay_report, "Write the JSON report here");
  replay->add_option("--expect-env", replay_expect, "Refuse unless the container matches this env's config");
  replay->add_option("--tolerance", replay_tol, "Largest accepted final_state_diff (default 0)");

  std::vector<std::string> bc_datasets;
  double bc_lambda = 1e-3;
  auto* train = app.add_subcommand("train-bc", "Fit a linear ridge BC policy; --out is the model file");
  add_common(train, common);
  train->add_option("--dataset", bc_datasets, "Container path(s)")->required();
  train->add_option("--lambda", bc_lambda, "Ridge coefficient (> 0)")->check(CLI::PositiveNumber);

  std::string eval_env, eval_policy = "expert";
  std::size_t eval_episodes = 25;
  bool eval_zero = false;
  double eval_min = 0.0;
  auto* eval = app.add_subcommand("eval", "Evaluate a policy's success rate");
  add_common(eval, common);
  eval->add_option("--env", eval_env, "Environment id")->required();
  eval->add_option("--policy", eval_policy, "expert, random or bc:<model>");
  eval->add_option("--episodes", eval_episodes, "Episodes");
  eval->add_flag("--zero-reward", eval_zero, "Replace the reward with a constant 0");
  eval->add_option("--min-success", eval_min, "Exit 3 when the success rate is below this");

  std::vector<std::string> manifest_inputs;
  auto* manifest = app.add_subcommand("manifest", "Summarize containers as a dataset manifest");
  add_common(manifest, common);
  manifest->add_option("--inputs", manifest_inputs, "Container paths")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*list) return cmd_list(common);
    if (*check) return cmd_check(common);
    if (*collect) return cmd_collect(common, ca);
    if (*bench) return cmd_bench(common, bench_env, bench_workers, obs_mode, bench_steps);
    if (*teleop) return cmd_teleop(common, tele_env, tele_port, tele_rate, tele_ee, tele_duration);
    if (*replay) return cmd_replay(common, replay_dataset, replay_report, replay_expect, replay_tol);
    if (*train) return cmd_train_bc(common, bc_datasets, bc_lambda);
    if (*eval) return cmd_eval(common, eval_env, eval_policy, eval_episodes, eval_zero, eval_min);
    if (*manifest) return cmd_manifest(common, manifest_inputs);
  } catch (const std::exception& e) {
    std::cerr << "hivekit: error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
