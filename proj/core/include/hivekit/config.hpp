#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "hivekit/types.hpp"

namespace hivekit {

/// Parses the line-oriented `[section]` / `key = value` config format
/// (docs/config_format.md). Defaults are filled in and the result is
/// validated before it is returned.
///
/// Throws ConfigSyntaxError (with line number) for malformed text and
/// ValidationError for a well-formed document that violates an invariant.
EnvConfig parse_env_config(std::string_view text);

EnvConfig load_env_config(const std::filesystem::path& path);

/// Canonical text form. Every field is written explicitly and reals use the
/// shortest representation that round-trips, so
/// parse_env_config(serialize_env_config(c)) == c.
std::string serialize_env_config(const EnvConfig& cfg);

/// Throws ValidationError naming the first violated invariant.
void validate_env_config(const EnvConfig& cfg);

bool is_valid_env_id(std::string_view id);

/// "reach-v0" -> "reach_v2d-v0": the id of the camera-equipped variant.
std::string visual_variant_id(std::string_view env_id);

}  // namespace hivekit
