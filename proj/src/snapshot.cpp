#include "chemodecay/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace chemo {

namespace {

std::uint64_t to_little_endian(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out |= ((bits >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return out;
  }
  return bits;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const ScalarField& field, double time,
                    const std::string& name) {
  if (name.empty() || name.find_first_of(" \t\n=") != std::string::npos) {
    throw std::invalid_argument("write_snapshot: field name must be a non-empty token");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_snapshot: cannot open " + path.string());
  std::ostringstream header;
  header << std::setprecision(17) << kSnapshotSchema << " dim=" << field.grid.dim()
         << " points=" << field.grid.points() << " length=" << field.grid.length()
         << " time=" << time << " name=" << name << '\n';
  out << header.str();
  for (Eigen::Index i = 0; i < field.values.size(); ++i) {
    const auto bits = to_little_endian(std::bit_cast<std::uint64_t>(field.values[i]));
    char bytes[8];
    std::memcpy(bytes, &bits, 8);
    out.write(bytes, 8);
  }
  if (!out) throw std::runtime_error("write_snapshot: write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_snapshot: cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  std::istringstream header(line);
  std::string schema;
  header >> schema;
  if (schema != kSnapshotSchema) {
    throw std::runtime_error("read_snapshot: " + path.string() + ": unknown schema '" + schema +
                             "'");
  }
  std::map<std::string, std::string> kv;
  std::string token;
  while (header >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("read_snapshot: malformed header token '" + token + "'");
    }
    kv[token.substr(0, eq)] = token.substr(eq + 1);
  }
  for (const char* key : {"dim", "points", "length", "time", "name"}) {
    if (!kv.count(key)) {
      throw std::runtime_error("read_snapshot: " + path.string() + ": header lacks '" + key + "'");
    }
  }
  const Grid grid(std::stoi(kv["dim"]), std::stoi(kv["points"]), std::stod(kv["length"]));
  Snapshot snap{ScalarField(grid), std::stod(kv["time"]), kv["name"]};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    char bytes[8];
    if (!in.read(bytes, 8)) {
      throw std::runtime_error("read_snapshot: " + path.string() + ": truncated payload at value " +
                               std::to_string(i));
    }
    std::uint64_t bits;
    std::memcpy(&bits, bytes, 8);
    snap.field.values[static_cast<Eigen::Index>(i)] = std::bit_cast<double>(to_little_endian(bits));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw std::runtime_error("read_snapshot: " + path.string() + ": trailing bytes after payload");
  }
  return snap;
}

}  // namespace chemo
