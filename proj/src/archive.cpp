#include "rsbm/archive.hpp"

#include <charconv>
#include <fstream>

#include "rsbm/errors.hpp"

#ifndef RSBM_VERSION
#define RSBM_VERSION "dev"
#endif

namespace rsbm {
namespace {

constexpr char kMagic[8] = {'R', 'S', 'B', 'M', 'F', 'L', 'D', '1'};

std::string escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string code_version() { return RSBM_VERSION; }

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) throw ShapeError("CSV row width does not match the header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void CsvTable::write(const std::filesystem::path& path, const Provenance& p) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string());
  os << "config_hash,code_version,grid,seed";
  for (const auto& c : columns_) os << ',' << escape(c);
  os << '\n';
  for (const auto& row : rows_) {
    os << p.config_hash << ',' << p.code_version << ',' << escape(p.grid) << ',' << p.seed;
    for (const auto& c : row) os << ',' << escape(c);
    os << '\n';
  }
}

nlohmann::json grid_to_json(const GridSpec& g) {
  return {{"L", g.side_length},
          {"N", g.points_per_side},
          {"boundary", g.boundary == Boundary::periodic ? "periodic" : "dirichlet"}};
}

GridSpec grid_from_json(const nlohmann::json& j) {
  GridSpec g;
  g.side_length = j.value("L", 8.0);
  g.points_per_side = j.value("N", 256);
  g.boundary = j.value("boundary", std::string("periodic")) == "dirichlet" ? Boundary::dirichlet : Boundary::periodic;
  g.validate();
  return g;
}

void save_fields(const std::filesystem::path& path, const std::vector<Field>& fields, const nlohmann::json& meta) {
  if (fields.empty()) throw InvalidInputError("nothing to archive");
  for (const auto& f : fields)
    if (!(f.grid() == fields.front().grid())) throw ShapeError("archived fields must share a grid");
  nlohmann::json header = {{"grid", grid_to_json(fields.front().grid())}, {"count", fields.size()}, {"meta", meta}};
  const std::string text = header.dump();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string());
  const std::uint64_t len = text.size();
  os.write(kMagic, sizeof kMagic);
  os.write(reinterpret_cast<const char*>(&len), sizeof len);
  os.write(text.data(), std::streamsize(len));
  for (const auto& f : fields) os.write(reinterpret_cast<const char*>(f.data()), std::streamsize(f.size() * sizeof(double)));
}

FieldArchive load_fields(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  char magic[8];
  std::uint64_t len = 0;
  is.read(magic, sizeof magic);
  is.read(reinterpret_cast<char*>(&len), sizeof len);
  if (!is || !std::equal(magic, magic + 8, kMagic)) throw InvalidInputError(path.string() + " is not a field archive");
  std::string text(len, '\0');
  is.read(text.data(), std::streamsize(len));
  const auto header = nlohmann::json::parse(text);
  FieldArchive out;
  out.meta = header.value("meta", nlohmann::json::object());
  const GridSpec g = grid_from_json(header.at("grid"));
  const std::size_t count = header.at("count").get<std::size_t>();
  for (std::size_t k = 0; k < count; ++k) {
    Field f(g);
    is.read(reinterpret_cast<char*>(f.data()), std::streamsize(f.size() * sizeof(double)));
    if (!is) throw InvalidInputError(path.string() + " is truncated");
    out.fields.push_back(std::move(f));
  }
  return out;
}

}  // namespace rsbm
