#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace spcap {

struct CommandOptions {
  std::string config_path;
  std::string config_text;  // used when config_path is empty
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  int workers = 0;                      // 0: all available cores
  std::optional<std::string> format;    // overrides output.formats
  bool timing = false;                  // wall_time_s column instead of NA
  bool conjugate = false;
};

struct CommandResult {
  int exit_code = 0;  // 0 ok, 1 failures with partial output, 2 configuration error
  nlohmann::json summary;
};

/// gen, kernel-audit, field, l2norm, matrix, scales, capacity-sweep.
CommandResult run_command(const std::string& name, const CommandOptions& opts);

}  // namespace spcap
