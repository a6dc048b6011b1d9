#include "holderlab/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <string>

#include <json.hpp>

#include "holderlab/error.hpp"

namespace holderlab {

namespace {

constexpr const char* kMagic = "HOLDERLAB-FIELD 1";

static_assert(std::numeric_limits<double>::is_iec559, "float64 container needs IEEE-754 doubles");

void put_le(std::ostream& os, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  unsigned char bytes[8];
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xffu);
  os.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_le(const unsigned char* bytes) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | bytes[b];
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_field(const std::filesystem::path& path, const SpaceTimeField& field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  const GridSpec& g = field.grid();
  nlohmann::json h;
  h["dim"] = g.dim;
  h["x"] = {g.x.lo, g.x.hi};
  h["y"] = {g.y.lo, g.y.hi};
  h["nx"] = g.nx;
  h["t"] = {g.t.lo, g.t.hi};
  h["nt"] = g.nt;
  h["name"] = field.name();
  h["provenance"] = field.provenance();
  h["metadata"] = field.metadata();
  h["count"] = field.values().size();
  os << kMagic << '\n' << h.dump() << '\n';
  for (double v : field.values()) put_le(os, v);
  if (!os) throw Error(ErrorKind::IoFailure, "write failed for " + path.string());
}

SpaceTimeField read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  std::string magic, header;
  std::getline(is, magic);
  if (magic != kMagic) throw Error(ErrorKind::IoFailure, path.string() + " is not a field file");
  std::getline(is, header);
  GridSpec g;
  std::size_t count = 0;
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(header);
    g.dim = h.at("dim").get<int>();
    g.x = {h.at("x")[0].get<double>(), h.at("x")[1].get<double>()};
    g.y = {h.at("y")[0].get<double>(), h.at("y")[1].get<double>()};
    g.nx = h.at("nx").get<int>();
    g.t = {h.at("t")[0].get<double>(), h.at("t")[1].get<double>()};
    g.nt = h.at("nt").get<int>();
    count = h.at("count").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::IoFailure, path.string() + ": bad header: " + e.what());
  }
  try {
    g.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::IoFailure, path.string() + ": " + e.what());
  }
  if (count != g.size()) {
    throw Error(ErrorKind::IoFailure, path.string() + ": value count does not match the grid");
  }
  std::vector<unsigned char> raw(count * 8);
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(is.gcount()) != raw.size()) {
    throw Error(ErrorKind::IoFailure, path.string() + ": truncated value block");
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) values[i] = get_le(raw.data() + 8 * i);
  try {
    SpaceTimeField f(g, std::move(values), h.value("name", std::string{}),
                     h.value("provenance", std::string{}));
    if (h.contains("metadata") && h["metadata"].is_object()) {
      for (auto it = h["metadata"].begin(); it != h["metadata"].end(); ++it) {
        if (it.value().is_string()) f.set_metadata(it.key(), it.value().get<std::string>());
      }
    }
    return f;
  } catch (const Error& e) {
    throw Error(ErrorKind::IoFailure, path.string() + ": " + e.what());
  }
}

void write_field_csv(const std::filesystem::path& path, const SpaceTimeField& field) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  const GridSpec& g = field.grid();
  os << (g.dim == 2 ? "t,x,y,u\n" : "t,x,u\n");
  os << std::setprecision(17);
  for (int k = 0; k < g.nt; ++k) {
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx; ++i) {
        os << g.t_at(k) << ',' << g.x_at(i) << ',';
        if (g.dim == 2) os << g.y_at(j) << ',';
        os << field.at(k, i, j) << '\n';
      }
    }
  }
  if (!os) throw Error(ErrorKind::IoFailure, "write failed for " + path.string());
}

}  // namespace holderlab
