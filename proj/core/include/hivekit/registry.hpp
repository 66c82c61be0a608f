#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hivekit/env.hpp"
#include "hivekit/robot.hpp"
#include "hivekit/types.hpp"

namespace hivekit {

/// env_id -> validated EnvConfig. Every make() builds an independent
/// environment with its own robot; the registry itself is read-only once
/// populated and can be shared across threads.
class EnvRegistry {
 public:
  /// Validates and registers. Throws RegistryError on a duplicate id.
  void add(EnvConfig cfg);

  bool contains(const std::string& env_id) const { return configs_.count(env_id) != 0; }
  const EnvConfig& config(const std::string& env_id) const;
  /// Ids in registration order.
  const std::vector<std::string>& ids() const { return order_; }
  std::size_t size() const { return order_.size(); }

  /// Fresh environment. `seed` overrides the configured seed.
  std::unique_ptr<Env> make(const std::string& env_id, std::optional<std::uint64_t> seed = std::nullopt,
                            const RobotOptions& options = {}) const;

  /// Registers every *.cfg file in `dir`, in file-name order.
  static EnvRegistry from_directory(const std::filesystem::path& dir);
  /// A single .cfg file or a directory of them.
  void add_path(const std::filesystem::path& path);

 private:
  std::map<std::string, EnvConfig> configs_;
  std::vector<std::string> order_;
};

/// Environment built straight from a config, without a registry.
std::unique_ptr<Env> make_env(const EnvConfig& cfg, const RobotOptions& options = {});

}  // namespace hivekit
