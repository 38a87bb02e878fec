#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rsbm/grid.hpp"

namespace rsbm {

std::string fnv1a_hex(std::string_view text);
std::string code_version();

// Columns prepended to every CSV row.
struct Provenance {
  std::string config_hash;
  std::string code_version;
  std::string grid;
  std::uint64_t seed = 0;
};

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);
  void add_row(std::vector<std::string> cells);
  std::size_t rows() const { return rows_.size(); }
  void write(const std::filesystem::path& path, const Provenance& provenance) const;

  // Shortest round-trip representation.
  static std::string num(double v);

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

nlohmann::json grid_to_json(const GridSpec& grid);
GridSpec grid_from_json(const nlohmann::json& j);

// Magic, header length, JSON header (grid, count, user metadata), raw doubles.
void save_fields(const std::filesystem::path& path, const std::vector<Field>& fields, const nlohmann::json& meta);

struct FieldArchive {
  std::vector<Field> fields;
  nlohmann::json meta;
};
FieldArchive load_fields(const std::filesystem::path& path);

}  // namespace rsbm
