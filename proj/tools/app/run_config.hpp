#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "radtrans/solver.hpp"

namespace radtrans::app {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  ProblemConfig problem;
  Mode mode = Mode::kGrey;
  std::optional<DiffusionConfig> diffusion;
  std::filesystem::path out_dir = "radtrans_out";
  /// Every key with the value in effect, in a fixed order.
  std::vector<std::pair<std::string, std::string>> effective;
};

/// Flat "key = value" text, '#' starts a comment. Unknown keys, repeated keys
/// and malformed values raise ConfigError naming the key; origin prefixes
/// the messages.
RunConfig parse_run_config(std::istream& in, const std::string& origin = "config");
RunConfig load_run_config(const std::filesystem::path& path);

/// Keys accepted by the parser, in documentation order.
const std::vector<std::string>& known_config_keys();

}  // namespace radtrans::app
