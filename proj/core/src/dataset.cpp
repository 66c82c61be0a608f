#include "hivekit/dataset.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "hivekit/bytes.hpp"
#include "hivekit/config.hpp"
#include "hivekit/error.hpp"
#include "hivekit/registry.hpp"
#include "hivekit/sim.hpp"
#include "hivekit/task.hpp"
#include "json.hpp"

namespace hivekit {

namespace {
constexpr char kMagic[4] = {'R', 'S', 'L', '1'};
using Writer = ByteWriter<std::endian::little>;
using Reader = ByteReader<std::endian::little, DatasetError>;

std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double parse_real(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw DatasetError("bad real '" + std::string(s) + "'");
  return v;
}
}  // namespace

// ---------------------------------------------------------------- digest

Digest sha256(std::span<const std::uint8_t> bytes) {
  Digest d{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), d.data(), &len, EVP_sha256(), nullptr) != 1 || len != d.size()) {
    throw Error("SHA-256 computation failed");
  }
  return d;
}

Digest sha256(std::string_view text) {
  return sha256(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string to_hex(const Digest& d) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s;
  for (auto b : d) {
    s.push_back(kHex[b >> 4]);
    s.push_back(kHex[b & 15]);
  }
  return s;
}

namespace {
// The seed is per run and stored with each trajectory, so containers and
// digests use the config with seed 0.
std::string container_config_text(const EnvConfig& cfg) {
  EnvConfig c = cfg;
  c.seed = 0;
  return serialize_env_config(c);
}
}  // namespace

Digest config_digest(const EnvConfig& cfg) { return sha256(container_config_text(cfg)); }

// ---------------------------------------------------------------- state blocks

namespace {

void put_state(Writer& w, const SimState& s) {
  w.put_f64(s.time);
  w.put(static_cast<std::uint16_t>(s.joint_pos.size()));
  for (double v : s.joint_pos) w.put_f64(v);
  for (double v : s.joint_vel) w.put_f64(v);
  w.put(static_cast<std::uint16_t>(s.objects.size()));
  for (const auto& o : s.objects) {
    w.put_f64(o.position.x);
    w.put_f64(o.position.y);
    w.put_f64(o.velocity.x);
    w.put_f64(o.velocity.y);
    w.put_f64(o.radius);
    w.put_f64(o.mass);
    w.put(o.color_index);
  }
  w.put(static_cast<std::int16_t>(s.grasped_object ? static_cast<int>(*s.grasped_object) : -1));
  w.put_f64(s.grasp_offset.x);
  w.put_f64(s.grasp_offset.y);
  for (auto v : s.rng_state) w.put(v);
}

SimState get_state(Reader& r) {
  SimState s;
  s.time = r.get_f64();
  const auto n = r.get<std::uint16_t>();
  s.joint_pos.resize(n);
  s.joint_vel.resize(n);
  for (auto& v : s.joint_pos) v = r.get_f64();
  for (auto& v : s.joint_vel) v = r.get_f64();
  const auto m = r.get<std::uint16_t>();
  s.objects.resize(m);
  for (auto& o : s.objects) {
    o.position.x = r.get_f64();
    o.position.y = r.get_f64();
    o.velocity.x = r.get_f64();
    o.velocity.y = r.get_f64();
    o.radius = r.get_f64();
    o.mass = r.get_f64();
    o.color_index = r.get<std::uint8_t>();
  }
  const auto g = r.get<std::int16_t>();
  if (g >= 0) {
    if (static_cast<std::size_t>(g) >= m) throw DatasetError("grasped index out of range");
    s.grasped_object = static_cast<std::size_t>(g);
  } else if (g != -1) {
    throw DatasetError("bad grasped index");
  }
  s.grasp_offset.x = r.get_f64();
  s.grasp_offset.y = r.get_f64();
  for (auto& v : s.rng_state) v = r.get<std::uint64_t>();
  return s;
}

void check_metadata_entry(const std::string& key, const std::string& value) {
  if (key.empty() || key.find_first_of("=\n") != std::string::npos) {
    throw DatasetError("metadata key '" + key + "' must be non-empty without '=' or newline");
  }
  if (value.find('\n') != std::string::npos) throw DatasetError("metadata value for '" + key + "' has a newline");
  if (key == "seed") throw DatasetError("metadata key 'seed' is reserved");
}

std::vector<std::uint8_t> encode_group(const Trajectory& t) {
  const std::size_t T = t.length();
  if (t.successes.size() != T || t.actions.size() != T * t.action_dim) {
    throw DatasetError("trajectory columns have inconsistent lengths");
  }
  if (!t.states.empty() && t.states.size() != T) throw DatasetError("trajectory states do not match its length");
  if (T > std::numeric_limits<std::uint32_t>::max() || t.action_dim > 0xFFFF || t.observations.size() > 0xFFFF) {
    throw DatasetError("trajectory too large for the container format");
  }
  std::vector<std::uint8_t> out;
  Writer w(out);
  w.put(static_cast<std::uint32_t>(T));
  w.put(static_cast<std::uint16_t>(t.action_dim));
  w.put(static_cast<std::uint16_t>(t.observations.size()));
  for (const auto& s : t.observations) {
    if (s.name.size() > 255) throw DatasetError("sensor name too long");
    if (s.values.size() != T * s.dim) throw DatasetError("sensor '" + s.name + "' has the wrong number of values");
    w.put(static_cast<std::uint8_t>(s.name.size()));
    w.put_string(s.name);
    w.put(static_cast<std::uint32_t>(s.dim));
  }
  put_state(w, t.initial_state);
  for (const auto& s : t.observations) {
    for (double v : s.values) w.put_f64(v);
  }
  for (double v : t.actions) w.put_f64(v);
  for (double v : t.rewards) w.put_f64(v);
  for (auto v : t.successes) w.put(v);
  w.put(static_cast<std::uint8_t>(t.states.empty() ? 0 : 1));
  for (const auto& s : t.states) put_state(w, s);
  w.put(static_cast<std::uint8_t>(t.source));

  std::string meta = "seed=" + std::to_string(t.seed) + "\n";
  for (const auto& [k, v] : t.metadata) {
    check_metadata_entry(k, v);
    meta += k + "=" + v + "\n";
  }
  w.put(static_cast<std::uint32_t>(meta.size()));
  w.put_string(meta);
  return out;
}

Trajectory decode_group(std::span<const std::uint8_t> bytes, const std::string& env_id) {
  Reader r(bytes);
  Trajectory t;
  t.env_id = env_id;
  const std::size_t T = r.get<std::uint32_t>();
  t.action_dim = r.get<std::uint16_t>();
  const auto n_sensors = r.get<std::uint16_t>();
  for (std::uint16_t i = 0; i < n_sensors; ++i) {
    SensorSeries s;
    s.name = r.get_string(r.get<std::uint8_t>());
    s.dim = r.get<std::uint32_t>();
    t.observations.push_back(std::move(s));
  }
  t.initial_state = get_state(r);
  for (auto& s : t.observations) {
    if (s.dim != 0 && T > r.remaining() / 8 / s.dim) throw DatasetError("truncated sensor array '" + s.name + "'");
    s.values.resize(T * s.dim);
    for (auto& v : s.values) v = r.get_f64();
  }
  if (t.action_dim != 0 && T > r.remaining() / 8 / t.action_dim) throw DatasetError("truncated action array");
  t.actions.resize(T * t.action_dim);
  for (auto& v : t.actions) v = r.get_f64();
  if (T > r.remaining() / 8) throw DatasetError("truncated reward array");
  t.rewards.resize(T);
  for (auto& v : t.rewards) v = r.get_f64();
  t.successes.resize(T);
  for (auto& v : t.successes) v = r.get<std::uint8_t>();
  const auto has_states = r.get<std::uint8_t>();
  if (has_states > 1) throw DatasetError("bad state flag");
  if (has_states) {
    t.states.reserve(T);
    for (std::size_t k = 0; k < T; ++k) t.states.push_back(get_state(r));
  }
  const auto source = r.get<std::uint8_t>();
  if (source > 3) throw DatasetError("bad source code " + std::to_string(source));
  t.source = static_cast<TrajectorySource>(source);

  const std::string meta = r.get_string(r.get<std::uint32_t>());
  if (!r.done()) throw DatasetError("trailing bytes in trajectory group");
  std::istringstream lines(meta);
  std::string line;
  bool first = true;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DatasetError("bad metadata line '" + line + "'");
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    if (first) {
      if (key != "seed") throw DatasetError("metadata must start with the seed");
      auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), t.seed);
      if (ec != std::errc{} || p != value.data() + value.size()) throw DatasetError("bad seed '" + value + "'");
      first = false;
      continue;
    }
    t.metadata.emplace_back(std::move(key), std::move(value));
  }
  if (first) throw DatasetError("missing seed metadata");
  return t;
}

}  // namespace

// ---------------------------------------------------------------- writer

void write_trajectories(const std::filesystem::path& path, const EnvConfig& cfg, std::span<const Trajectory> trajs) {
  const std::string config_text = container_config_text(cfg);
  const Digest digest = sha256(config_text);
  const std::string digest_hex = to_hex(digest);

  std::vector<std::vector<std::uint8_t>> groups;
  for (const auto& t : trajs) {
    if (t.env_id != cfg.env_id) {
      throw DatasetError("trajectory from '" + t.env_id + "' cannot go in a '" + cfg.env_id + "' container");
    }
    if (const auto* d = t.find_metadata("config_digest"); d && *d != digest_hex) {
      throw DatasetError("trajectory was recorded under a different config of '" + cfg.env_id + "'");
    }
    groups.push_back(encode_group(t));
  }

  std::vector<std::uint8_t> out;
  Writer w(out);
  w.put_bytes(std::span(reinterpret_cast<const std::uint8_t*>(kMagic), 4));
  w.put(kRslVersion);
  w.put(static_cast<std::uint32_t>(config_text.size()));
  w.put_string(config_text);
  w.put_bytes(digest);
  w.put(static_cast<std::uint32_t>(groups.size()));
  std::uint64_t offset = out.size() + groups.size() * 16;
  for (const auto& g : groups) {
    w.put(offset);
    w.put(static_cast<std::uint64_t>(g.size()));
    offset += g.size();
  }
  for (const auto& g : groups) w.put_bytes(g);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DatasetError("cannot write " + path.string());
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  f.close();
  if (!f) throw DatasetError("failed writing " + path.string());
}

// ---------------------------------------------------------------- reader

DatasetReader::DatasetReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw DatasetError("cannot open " + path.string());
  in_.seekg(0, std::ios::end);
  file_size_ = static_cast<std::uint64_t>(in_.tellg());
  in_.seekg(0);

  auto read_bytes = [&](std::size_t n) {
    if (n > file_size_ - static_cast<std::uint64_t>(in_.tellg())) throw DatasetError("truncated container header");
    std::vector<std::uint8_t> b(n);
    in_.read(reinterpret_cast<char*>(b.data()), static_cast<std::streamsize>(n));
    if (!in_) throw DatasetError("read error in " + path.string());
    return b;
  };

  if (file_size_ < 4) throw DatasetError("not a RoboSet-lite file");
  auto magic = read_bytes(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic)) throw DatasetError("not a RoboSet-lite file");

  auto fixed = read_bytes(6);
  Reader hr(fixed);
  version_ = hr.get<std::uint16_t>();
  if (version_ != kRslVersion) throw DatasetError("unsupported container version " + std::to_string(version_));
  const auto config_len = hr.get<std::uint32_t>();
  auto cfg_bytes = read_bytes(config_len);
  config_text_.assign(cfg_bytes.begin(), cfg_bytes.end());
  auto digest_bytes = read_bytes(32);
  std::copy(digest_bytes.begin(), digest_bytes.end(), digest_.begin());
  if (sha256(config_text_) != digest_) throw DatasetError("config digest mismatch: embedded config was modified");
  try {
    config_ = parse_env_config(config_text_);
  } catch (const Error& e) {
    throw DatasetError(std::string("embedded config is invalid: ") + e.what());
  }

  auto count_bytes = read_bytes(4);
  const auto n = Reader(count_bytes).get<std::uint32_t>();
  if (n > (file_size_ - static_cast<std::uint64_t>(in_.tellg())) / 16) throw DatasetError("truncated index");
  auto idx = read_bytes(static_cast<std::size_t>(n) * 16);
  Reader ir(idx);
  std::uint64_t prev_end = static_cast<std::uint64_t>(in_.tellg());
  for (std::uint32_t k = 0; k < n; ++k) {
    IndexEntry e{ir.get<std::uint64_t>(), ir.get<std::uint64_t>()};
    if (e.offset < prev_end || e.length > file_size_ || e.offset > file_size_ - e.length) {
      throw DatasetError("corrupt index entry " + std::to_string(k));
    }
    prev_end = e.offset + e.length;
    index_.push_back(e);
  }
}

Trajectory DatasetReader::read(std::size_t k) {
  if (k >= index_.size()) throw DatasetError("trajectory index " + std::to_string(k) + " out of range");
  const auto& e = index_[k];
  std::vector<std::uint8_t> bytes(e.length);
  in_.clear();
  in_.seekg(static_cast<std::streamoff>(e.offset));
  in_.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(e.length));
  if (!in_) throw DatasetError("read error in " + path_.string());
  return decode_group(bytes, config_.env_id);
}

std::vector<Trajectory> DatasetReader::read_all() {
  std::vector<Trajectory> out;
  out.reserve(index_.size());
  for (std::size_t k = 0; k < index_.size(); ++k) out.push_back(read(k));
  return out;
}

// ---------------------------------------------------------------- recording

Trajectory begin_trajectory(const EnvConfig& cfg, std::uint64_t seed, const SimState& initial_state, const Vec2& goal,
                            TrajectorySource source) {
  Trajectory t;
  t.env_id = cfg.env_id;
  t.seed = seed;
  t.action_dim = trajectory_action_dim(cfg);
  for (const auto& s : cfg.sensors) t.observations.push_back({s.name, 0, {}});
  t.initial_state = initial_state;
  t.source = source;
  t.set_metadata("goal", format_real(goal.x) + "," + format_real(goal.y));
  t.set_metadata("config_digest", to_hex(config_digest(cfg)));
  return t;
}

void append_step(Trajectory& t, const EnvConfig& cfg, const ObsDict& obs, const RobotCommand& cmd,
                 const StepResult& result, const SimState& state_after) {
  for (auto& s : t.observations) {
    const auto& v = obs.at(s.name);
    if (t.length() == 0) s.dim = v.size();
    s.values.insert(s.values.end(), v.begin(), v.end());
  }
  const auto row = action_row(cfg, cmd);
  t.actions.insert(t.actions.end(), row.begin(), row.end());
  t.rewards.push_back(result.reward);
  t.successes.push_back(result.success ? 1 : 0);
  t.states.push_back(state_after);
}

TrajectoryAssembler::TrajectoryAssembler(EnvConfig cfg, TrajectorySource source)
    : cfg_(std::move(cfg)), source_(source) {}

void TrajectoryAssembler::add(const RolloutBatch& b) {
  if (b.worker_id >= open_.size()) open_.resize(b.worker_id + 1);
  auto& slot = open_[b.worker_id].traj;
  std::size_t next_start = 0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (next_start < b.starts.size() && b.starts[next_start].step == k) {
      const auto& st = b.starts[next_start++];
      slot = begin_trajectory(cfg_, b.env_seed, st.initial_state, st.goal, source_);
      slot->set_metadata("episode", std::to_string(st.episode));
      slot->set_metadata("worker", std::to_string(b.worker_id));
    }
    if (!slot) continue;  // tail of an episode that began before recording
    auto& t = *slot;
    for (std::size_t i = 0; i < t.observations.size(); ++i) {
      const auto& src = b.observations[i];
      t.observations[i].dim = src.dim;
      t.observations[i].values.insert(t.observations[i].values.end(), src.values.begin() + k * src.dim,
                                      src.values.begin() + (k + 1) * src.dim);
    }
    t.actions.insert(t.actions.end(), b.actions.begin() + k * b.action_dim, b.actions.begin() + (k + 1) * b.action_dim);
    if (cfg_.task.object_count > 0) t.actions.push_back(static_cast<double>(b.grippers[k]));
    t.rewards.push_back(b.rewards[k]);
    t.successes.push_back(b.successes[k]);
    if (b.states.size() != b.size()) throw ValidationError("batches must be collected with record_states");
    t.states.push_back(b.states[k]);
    if (b.dones[k]) {
      const std::uint64_t ep = std::stoull(*t.find_metadata("episode"));
      done_.push_back({{b.worker_id, ep}, std::move(t)});
      slot.reset();
    }
  }
}

std::vector<Trajectory> TrajectoryAssembler::take() {
  std::stable_sort(done_.begin(), done_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Trajectory> out;
  for (auto& [key, t] : done_) out.push_back(std::move(t));
  done_.clear();
  return out;
}

std::vector<Trajectory> record_episodes(const EnvRegistry& registry, const std::string& env_id, const Policy& policy,
                                        std::size_t n_episodes, std::uint64_t seed, TrajectorySource source) {
  auto env = registry.make(env_id, seed);
  const auto& cfg = env->config();
  std::vector<Trajectory> out;
  for (std::uint64_t ep = 0; ep < n_episodes; ++ep) {
    auto rng = policy_rng(seed, ep);
    StepResult r = env->reset(ep);
    Trajectory t = begin_trajectory(cfg, seed, env->state(), env->task().target, source);
    t.set_metadata("episode", std::to_string(ep));
    while (!r.done) {
      const RobotCommand cmd = policy.act(r.obs, rng);
      StepResult next = env->step(cmd);
      append_step(t, cfg, r.obs, cmd, next, env->state());
      r = std::move(next);
    }
    out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------- replay

namespace {
double l2_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

Vec2 goal_from_metadata(const Trajectory& t, const EnvConfig& cfg) {
  const auto* g = t.find_metadata("goal");
  if (!g) return task_goal(cfg.task);
  const auto comma = g->find(',');
  if (comma == std::string::npos) throw DatasetError("bad goal metadata '" + *g + "'");
  return {parse_real(std::string_view(*g).substr(0, comma)), parse_real(std::string_view(*g).substr(comma + 1))};
}
}  // namespace

ReplayReport replay_trajectory(const Trajectory& traj, const EnvConfig& cfg) {
  if (cfg.backend != Backend::Sim) throw ValidationError("replay requires backend = sim");
  if (traj.action_dim != trajectory_action_dim(cfg)) throw ValidationError("action dimension mismatch");
  if (traj.length() > cfg.horizon) throw ValidationError("trajectory is longer than the horizon");
  if (traj.states.size() != traj.length()) throw ValidationError("trajectory has no per-step states to compare");

  auto env = make_env(cfg);
  env->robot().set_noise_enabled(false);
  env->reset_to(traj.initial_state, goal_from_metadata(traj, cfg));
  ReplayReport rep;
  std::vector<double> last = state_vector(env->state());
  for (std::size_t t = 0; t < traj.length(); ++t) {
    if (env->done()) throw ValidationError("trajectory continues past the end of its episode");
    env->step(command_from_row(cfg, traj.action(t)));
    last = state_vector(env->state());
    rep.per_step_max_diff = std::max(rep.per_step_max_diff, l2_diff(last, state_vector(traj.states[t])));
  }
  const SimState& recorded_final = traj.length() ? traj.states.back() : traj.initial_state;
  rep.final_state_diff = l2_diff(last, state_vector(recorded_final));
  return rep;
}

std::vector<HistogramBin> diff_histogram(std::span<const double> diffs) {
  std::vector<HistogramBin> bins = {{"0", 0.0, 0},           {"(0, 1e-12]", 1e-12, 0},  {"(1e-12, 1e-9]", 1e-9, 0},
                                    {"(1e-9, 1e-6]", 1e-6, 0}, {"(1e-6, 1e-3]", 1e-3, 0},
                                    {"> 1e-3", std::numeric_limits<double>::infinity(), 0}};
  for (double d : diffs) {
    auto it = std::find_if(bins.begin(), bins.end(), [&](const HistogramBin& b) { return d <= b.upper; });
    if (it == bins.end()) it = std::prev(bins.end());  // NaN
    ++it->count;
  }
  return bins;
}

ContainerReplayReport replay_container(const std::filesystem::path& path, const std::optional<EnvConfig>& expected) {
  DatasetReader reader(path);
  if (expected && config_digest(*expected) != reader.digest()) {
    throw DatasetError("config digest mismatch: container was written for a different config; refusing to replay");
  }
  ContainerReplayReport rep;
  rep.env_id = reader.config().env_id;
  rep.n_trajectories = reader.size();
  for (std::size_t k = 0; k < reader.size(); ++k) {
    const auto r = replay_trajectory(reader.read(k), reader.config());
    rep.final_state_diffs.push_back(r.final_state_diff);
    rep.per_step_max_diffs.push_back(r.per_step_max_diff);
    rep.max_final_state_diff = std::max(rep.max_final_state_diff, r.final_state_diff);
    rep.max_per_step_diff = std::max(rep.max_per_step_diff, r.per_step_max_diff);
  }
  rep.histogram = diff_histogram(rep.final_state_diffs);
  return rep;
}

std::string ContainerReplayReport::to_json() const {
  nlohmann::ordered_json j;
  j["schema"] = "hivekit.replay/1";
  j["env_id"] = env_id;
  j["n_trajectories"] = n_trajectories;
  j["max_final_state_diff"] = max_final_state_diff;
  j["max_per_step_diff"] = max_per_step_diff;
  auto& h = j["histogram"] = nlohmann::ordered_json::array();
  for (const auto& b : histogram) h.push_back({{"bin", b.label}, {"count", b.count}});
  j["final_state_diffs"] = final_state_diffs;
  j["per_step_max_diffs"] = per_step_max_diffs;
  return j.dump(2);
}

std::string ContainerReplayReport::to_text() const {
  std::ostringstream os;
  os << "env " << env_id << ": " << n_trajectories << " trajectories replayed\n";
  os << "max final_state_diff " << max_final_state_diff << ", max per-step diff " << max_per_step_diff << "\n";
  os << "final_state_diff histogram:\n";
  for (const auto& b : histogram) {
    char line[96];
    std::snprintf(line, sizeof(line), "  %-14s %zu\n", b.label.c_str(), b.count);
    os << line;
  }
  return os.str();
}

// ---------------------------------------------------------------- manifest

std::string source_label(TrajectorySource s) {
  switch (s) {
    case TrajectorySource::ExpertPolicy:
      return "Expert Policy";
    case TrajectorySource::HumanTeleop:
      return "Human TeleOp";
    case TrajectorySource::Scripted:
      return "Scripted";
    case TrajectorySource::Random:
      return "Random";
  }
  return "Unknown";
}

DatasetManifest build_manifest(std::span<const std::filesystem::path> containers) {
  DatasetManifest m;
  std::map<std::pair<std::string, std::string>, std::size_t> row_of;
  for (const auto& path : containers) {
    DatasetReader reader(path);
    const auto& cfg = reader.config();
    std::size_t cams = 0;
    for (const auto& s : cfg.sensors) cams += s.kind == SensorKind::GridCamera ? 1 : 0;
    for (std::size_t k = 0; k < reader.size(); ++k) {
      const auto label = source_label(reader.read(k).source);
      auto key = std::make_pair(cfg.env_id, label);
      auto it = row_of.find(key);
      if (it == row_of.end()) {
        it = row_of.emplace(key, m.rows.size()).first;
        m.rows.push_back({cfg.env_id, 0, 1, cfg.backend == Backend::Sim ? "Sim" : "Real",
                          std::to_string(cams) + " cam", label});
      }
      ++m.rows[it->second].n_trajectories;
    }
  }
  return m;
}

std::string DatasetManifest::to_table() const {
  const std::vector<std::string> head = {"Domain", "# Trajs", "# Tasks", "World", "Visuals", "Source"};
  std::vector<std::vector<std::string>> cells = {head};
  for (const auto& r : rows) {
    cells.push_back({r.domain, std::to_string(r.n_trajectories), std::to_string(r.n_tasks), r.world, r.visuals,
                     r.source});
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  auto rule = [&] {
    for (std::size_t c = 0; c < width.size(); ++c) os << (c ? "-+-" : "") << std::string(width[c], '-');
    os << "\n";
  };
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      os << (c ? " | " : "") << cells[r][c] << std::string(width[c] - cells[r][c].size(), ' ');
    }
    os << "\n";
    if (r == 0) rule();
  }
  return os.str();
}

std::string DatasetManifest::to_json() const {
  nlohmann::ordered_json j;
  j["schema"] = "hivekit.manifest/1";
  auto& arr = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"domain", r.domain},
                   {"n_trajectories", r.n_trajectories},
                   {"n_tasks", r.n_tasks},
                   {"world", r.world},
                   {"visuals", r.visuals},
                   {"source", r.source}});
  }
  return j.dump(2);
}

}  // namespace hivekit
