#include "spcap/report.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace spcap {

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header.size()) throw std::invalid_argument("row width does not match the header");
  rows.push_back(std::move(row));
}

namespace {

std::string quote(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

void put_line(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + quote(cells[i]);
  out += '\n';
}

void write_file(const std::string& path, const std::string& body) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << body;
}

}  // namespace

std::string CsvTable::str() const {
  std::string out;
  put_line(out, header);
  for (const auto& r : rows) put_line(out, r);
  return out;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[i] = digits[v & 15];
  return out;
}

nlohmann::json meta_json(const ReportMeta& meta) {
  nlohmann::json j;
  j["schema"] = kSchemaVersion;
  j["tool"] = "spcap";
  j["version"] = kVersion;
  j["command"] = meta.command;
  j["config_hash"] = hex64(meta.config_hash);
  if (meta.has_seed) j["seed"] = meta.seed;
  j["workers"] = meta.workers;
  j["wall_time_s"] = meta.wall_time_s;
  for (auto it = meta.extra.begin(); it != meta.extra.end(); ++it) j[it.key()] = it.value();
  return j;
}

void write_csv(const std::string& path, const CsvTable& table, const ReportMeta& meta) {
  write_file(path, table.str());
  nlohmann::json m = meta_json(meta);
  m["file"] = std::filesystem::path(path).filename().string();
  m["rows"] = table.rows.size();
  m["columns"] = table.header;
  write_json(path + ".meta.json", m);
}

void write_json(const std::string& path, const nlohmann::json& doc) { write_file(path, doc.dump(2) + "\n"); }

}  // namespace spcap
