#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace spcap {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSchemaVersion = "1";

/// Header plus rows of already formatted cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  std::string str() const;
};

struct ReportMeta {
  std::string command;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  bool has_seed = false;
  int workers = 0;
  double wall_time_s = 0.0;
  nlohmann::json extra = nlohmann::json::object();
};

nlohmann::json meta_json(const ReportMeta& meta);

/// Writes `path` and `path.meta.json`; creates parent directories.
void write_csv(const std::string& path, const CsvTable& table, const ReportMeta& meta);
void write_json(const std::string& path, const nlohmann::json& doc);

std::string hex64(std::uint64_t v);

}  // namespace spcap
