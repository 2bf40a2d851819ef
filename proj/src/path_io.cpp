#include "phi4/path_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "phi4/error.hpp"

namespace phi4 {

namespace {

constexpr char kMagic[8] = {'P', 'H', 'I', '4', 'P', 'A', 'T', 'H'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw DomainError("truncated path record");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_path(std::ostream& out, const PathSample& path) {
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kVersion);
  put<double>(out, path.beta);
  put<double>(out, path.dt);
  put<std::uint64_t>(out, path.values.size());
  put<std::uint64_t>(out, path.seed);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(path.kind));
  put<double>(out, path.grid_half_width);
  put<std::uint32_t>(out, path.grid_points);
  if (path.kind == BoundaryKind::sde) {
    for (double x : path.values) put<double>(out, x);
  } else {
    if (path.nodes.size() != path.values.size()) throw DomainError("chain path without node indices");
    for (auto i : path.nodes) put<std::uint16_t>(out, i);
  }
  if (!out) throw DomainError("failed to write path record");
}

PathSample read_path(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw DomainError("not a path record");
  }
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) throw DomainError("unsupported path record version");
  PathSample p;
  p.beta = get<double>(in);
  p.dt = get<double>(in);
  const auto count = get<std::uint64_t>(in);
  p.seed = get<std::uint64_t>(in);
  const auto kind = get<std::uint8_t>(in);
  if (kind > 2) throw DomainError("unknown boundary kind in path record");
  p.kind = static_cast<BoundaryKind>(kind);
  p.grid_half_width = get<double>(in);
  p.grid_points = get<std::uint32_t>(in);
  p.values.reserve(count);
  if (p.kind == BoundaryKind::sde) {
    for (std::uint64_t j = 0; j < count; ++j) p.values.push_back(get<double>(in));
  } else {
    if (p.grid_points < 5 || p.grid_points % 2 == 0) throw DomainError("bad grid in path record");
    const Grid grid(p.grid_half_width, p.grid_points);
    p.nodes.reserve(count);
    for (std::uint64_t j = 0; j < count; ++j) {
      const auto i = get<std::uint16_t>(in);
      if (i >= p.grid_points) throw DomainError("node index outside the grid");
      p.nodes.push_back(i);
      p.values.push_back(grid.x(i));
    }
  }
  p.length = count > 0 ? p.dt * static_cast<double>(count - 1) : 0.0;
  return p;
}

void write_path_file(const std::string& file, const PathSample& path) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw DomainError("cannot open " + file);
  write_path(out, path);
}

PathSample read_path_file(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DomainError("cannot open " + file);
  return read_path(in);
}

void write_path_csv(std::ostream& out, const PathSample& path) {
  out << "t,x\n";
  char buf[64];
  for (std::size_t j = 0; j < path.values.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.17g\n", path.time(j), path.values[j]);
    out << buf;
  }
}

}  // namespace phi4
