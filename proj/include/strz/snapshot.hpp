#pragma once

#include "strz/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>

namespace strz {

/// Binary field snapshot:
///   "STRZ" | u32 version | u32 n | u32 N | f64 L | N^n × (f64 re, f64 im)
/// All integers and floats little-endian, values row-major.
inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(std::ostream& out, const ComplexField& field);
ComplexField read_snapshot(std::istream& in);

void save_snapshot(const std::filesystem::path& path, const ComplexField& field);
ComplexField load_snapshot(const std::filesystem::path& path);

}  // namespace strz
