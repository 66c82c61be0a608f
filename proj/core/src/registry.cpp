#include "hivekit/registry.hpp"

#include <algorithm>

#include "hivekit/config.hpp"
#include "hivekit/error.hpp"

namespace hivekit {

void EnvRegistry::add(EnvConfig cfg) {
  validate_env_config(cfg);
  if (contains(cfg.env_id)) throw RegistryError("environment '" + cfg.env_id + "' is already registered");
  order_.push_back(cfg.env_id);
  const auto id = cfg.env_id;
  configs_.emplace(id, std::move(cfg));
}

const EnvConfig& EnvRegistry::config(const std::string& env_id) const {
  auto it = configs_.find(env_id);
  if (it == configs_.end()) throw RegistryError("unknown environment '" + env_id + "'");
  return it->second;
}

std::unique_ptr<Env> EnvRegistry::make(const std::string& env_id, std::optional<std::uint64_t> seed,
                                       const RobotOptions& options) const {
  EnvConfig cfg = config(env_id);
  if (seed) cfg.seed = *seed;
  return make_env(cfg, options);
}

void EnvRegistry::add_path(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".cfg") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) add(load_env_config(f));
  } else {
    add(load_env_config(path));
  }
}

EnvRegistry EnvRegistry::from_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw RegistryError("config directory not found: " + dir.string());
  EnvRegistry reg;
  reg.add_path(dir);
  return reg;
}

std::unique_ptr<Env> make_env(const EnvConfig& cfg, const RobotOptions& options) {
  return std::make_unique<Env>(cfg, robot_connect(cfg, options));
}

}  // namespace hivekit
