#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "flagtrail/model.hpp"

namespace flagtrail {

/// Flags and auth tokens kept apart from the publishable game definition.
struct Secrets {
  std::map<std::string, std::string> flags;   // challenge_id -> flag
  std::map<std::string, std::string> tokens;  // player_id -> auth token
};

/// Parses a YAML game definition. Throws Error(InvalidArgument) naming the
/// offending key (and line, when yaml-cpp reports one).
GameConfig parse_config(const std::string& yaml_text);
GameConfig load_config(const std::filesystem::path& path);

std::string serialize_config(const GameConfig& config);

Secrets parse_secrets(const std::string& yaml_text);
Secrets load_secrets(const std::filesystem::path& path);
std::string serialize_secrets(const Secrets& secrets);

/// Copies flags and tokens into `config`. Unknown ids are an error.
void apply_secrets(GameConfig& config, const Secrets& secrets);

/// Splits out flags and tokens, leaving them empty in the returned definition.
std::pair<GameConfig, Secrets> split_secrets(const GameConfig& config);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace flagtrail
