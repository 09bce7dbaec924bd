#pragma once

#include <filesystem>
#include <iosfwd>

#include "corrgroup/geom3d.hpp"

namespace corrgroup {

enum class PlyFormat { kAscii, kBinaryLittleEndian };

/// Reads the x/y/z vertex properties of an ASCII or binary little-endian PLY
/// file. Other properties and elements are skipped.
PointCloud read_ply(const std::filesystem::path& path);
PointCloud read_ply(std::istream& in);

/// Writes vertices only, x/y/z as 64-bit doubles (binary) or 17-digit text.
void write_ply(const std::filesystem::path& path, const PointCloud& cloud, PlyFormat format = PlyFormat::kBinaryLittleEndian);
void write_ply(std::ostream& out, const PointCloud& cloud, PlyFormat format = PlyFormat::kBinaryLittleEndian);

}  // namespace corrgroup
