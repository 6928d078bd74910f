#include "strz/snapshot.hpp"

#include "strz/error.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace strz {

namespace {

template <class T>
void put_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) fail(ErrorKind::Io, "truncated snapshot");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_snapshot(std::ostream& out, const ComplexField& field) {
  const Grid& g = field.grid();
  out.write("STRZ", 4);
  put_le<std::uint32_t>(out, kSnapshotVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.points()));
  put_le<double>(out, g.half_width());
  for (const auto& v : field.values()) {
    put_le<double>(out, v.real());
    put_le<double>(out, v.imag());
  }
  if (!out) fail(ErrorKind::Io, "failed writing snapshot");
}

ComplexField read_snapshot(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "STRZ", 4) != 0) fail(ErrorKind::Io, "bad snapshot magic");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kSnapshotVersion) fail(ErrorKind::Io, "unsupported snapshot version " + std::to_string(version));
  const auto n = get_le<std::uint32_t>(in);
  const auto points = get_le<std::uint32_t>(in);
  const auto half_width = get_le<double>(in);
  Grid grid(static_cast<int>(n), half_width, static_cast<int>(points));
  std::vector<Complex> values(grid.size());
  for (auto& v : values) {
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    v = Complex(re, im);
  }
  return ComplexField(grid, std::move(values));
}

void save_snapshot(const std::filesystem::path& path, const ComplexField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  write_snapshot(out, field);
}

ComplexField load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  return read_snapshot(in);
}

}  // namespace strz
