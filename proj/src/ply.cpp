#include "corrgroup/ply.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "corrgroup/error.hpp"

namespace corrgroup {

namespace {

static_assert(std::endian::native == std::endian::little, "binary PLY I/O assumes a little-endian host");

enum class Scalar { kInt8, kUInt8, kInt16, kUInt16, kInt32, kUInt32, kFloat32, kFloat64 };

Scalar parse_scalar(const std::string& name) {
  if (name == "char" || name == "int8") return Scalar::kInt8;
  if (name == "uchar" || name == "uint8") return Scalar::kUInt8;
  if (name == "short" || name == "int16") return Scalar::kInt16;
  if (name == "ushort" || name == "uint16") return Scalar::kUInt16;
  if (name == "int" || name == "int32") return Scalar::kInt32;
  if (name == "uint" || name == "uint32") return Scalar::kUInt32;
  if (name == "float" || name == "float32") return Scalar::kFloat32;
  if (name == "double" || name == "float64") return Scalar::kFloat64;
  throw ValidationError("ply: unknown property type '" + name + "'");
}

std::size_t scalar_size(Scalar s) {
  switch (s) {
    case Scalar::kInt8:
    case Scalar::kUInt8:
      return 1;
    case Scalar::kInt16:
    case Scalar::kUInt16:
      return 2;
    case Scalar::kInt32:
    case Scalar::kUInt32:
    case Scalar::kFloat32:
      return 4;
    case Scalar::kFloat64:
      return 8;
  }
  return 0;
}

struct Property {
  std::string name;
  Scalar type = Scalar::kFloat32;
  bool is_list = false;
  Scalar count_type = Scalar::kUInt8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

template <typename T>
T read_raw(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ValidationError("ply: unexpected end of binary data");
  return v;
}

double read_binary_scalar(std::istream& in, Scalar s) {
  switch (s) {
    case Scalar::kInt8:
      return read_raw<std::int8_t>(in);
    case Scalar::kUInt8:
      return read_raw<std::uint8_t>(in);
    case Scalar::kInt16:
      return read_raw<std::int16_t>(in);
    case Scalar::kUInt16:
      return read_raw<std::uint16_t>(in);
    case Scalar::kInt32:
      return read_raw<std::int32_t>(in);
    case Scalar::kUInt32:
      return read_raw<std::uint32_t>(in);
    case Scalar::kFloat32:
      return read_raw<float>(in);
    case Scalar::kFloat64:
      return read_raw<double>(in);
  }
  return 0.0;
}

void skip_binary(std::istream& in, std::size_t bytes) {
  in.ignore(static_cast<std::streamsize>(bytes));
  if (!in) throw ValidationError("ply: unexpected end of binary data");
}

}  // namespace

PointCloud read_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open ply file: " + path.string());
  return read_ply(in);
}

PointCloud read_ply(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) throw ValidationError("ply: missing magic");

  bool binary = false;
  std::vector<Element> elements;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    if (keyword.empty() || keyword == "comment" || keyword == "obj_info") continue;
    if (keyword == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "ascii") {
        binary = false;
      } else if (fmt == "binary_little_endian") {
        binary = true;
      } else {
        throw ValidationError("ply: unsupported format '" + fmt + "'");
      }
    } else if (keyword == "element") {
      Element e;
      ls >> e.name >> e.count;
      if (!ls) throw ValidationError("ply: malformed element line");
      elements.push_back(std::move(e));
    } else if (keyword == "property") {
      if (elements.empty()) throw ValidationError("ply: property before element");
      Property p;
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string count_type;
        std::string item_type;
        ls >> count_type >> item_type;
        p.is_list = true;
        p.count_type = parse_scalar(count_type);
        p.type = parse_scalar(item_type);
      } else {
        p.type = parse_scalar(type);
      }
      ls >> p.name;
      if (!ls) throw ValidationError("ply: malformed property line");
      elements.back().properties.push_back(std::move(p));
    } else if (keyword == "end_header") {
      header_done = true;
      break;
    } else {
      throw ValidationError("ply: unknown header keyword '" + keyword + "'");
    }
  }
  if (!header_done) throw ValidationError("ply: missing end_header");

  Points points;
  for (const Element& e : elements) {
    const bool is_vertex = e.name == "vertex";
    std::array<int, 3> xyz_slot{-1, -1, -1};
    if (is_vertex) {
      for (std::size_t k = 0; k < e.properties.size(); ++k) {
        const auto& p = e.properties[k];
        if (p.is_list) continue;
        if (p.name == "x") xyz_slot[0] = static_cast<int>(k);
        if (p.name == "y") xyz_slot[1] = static_cast<int>(k);
        if (p.name == "z") xyz_slot[2] = static_cast<int>(k);
      }
      for (int slot : xyz_slot) {
        if (slot < 0) throw ValidationError("ply: vertex element lacks x/y/z");
      }
      points.reserve(e.count);
    }

    for (std::size_t row = 0; row < e.count; ++row) {
      Point3 p = Point3::Zero();
      if (binary) {
        for (std::size_t k = 0; k < e.properties.size(); ++k) {
          const auto& prop = e.properties[k];
          if (prop.is_list) {
            const auto n = static_cast<std::size_t>(read_binary_scalar(in, prop.count_type));
            skip_binary(in, n * scalar_size(prop.type));
            continue;
          }
          if (!is_vertex) {
            skip_binary(in, scalar_size(prop.type));
            continue;
          }
          const double v = read_binary_scalar(in, prop.type);
          for (int a = 0; a < 3; ++a) {
            if (xyz_slot[a] == static_cast<int>(k)) p[a] = v;
          }
        }
      } else {
        if (!std::getline(in, line)) throw ValidationError("ply: unexpected end of ascii data");
        if (!is_vertex) continue;
        std::istringstream ls(line);
        for (std::size_t k = 0; k < e.properties.size(); ++k) {
          const auto& prop = e.properties[k];
          if (prop.is_list) {
            std::size_t n = 0;
            ls >> n;
            for (std::size_t j = 0; j < n; ++j) {
              double skipped = 0;
              ls >> skipped;
            }
            continue;
          }
          double v = 0;
          if (!(ls >> v)) throw ValidationError("ply: malformed vertex row " + std::to_string(row));
          for (int a = 0; a < 3; ++a) {
            if (xyz_slot[a] == static_cast<int>(k)) p[a] = v;
          }
        }
      }
      if (is_vertex) points.push_back(p);
    }
    if (is_vertex) break;
  }
  return PointCloud(std::move(points));
}

void write_ply(const std::filesystem::path& path, const PointCloud& cloud, PlyFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write ply file: " + path.string());
  write_ply(out, cloud, format);
  if (!out) throw ComputationError("failed writing ply file: " + path.string());
}

void write_ply(std::ostream& out, const PointCloud& cloud, PlyFormat format) {
  out << "ply\n"
      << (format == PlyFormat::kAscii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n")
      << "element vertex " << cloud.size() << "\n"
      << "property double x\nproperty double y\nproperty double z\nend_header\n";
  if (format == PlyFormat::kAscii) {
    char buf[96];
    for (const auto& p : cloud.points()) {
      std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
      out << buf;
    }
  } else {
    for (const auto& p : cloud.points()) {
      const double xyz[3] = {p.x(), p.y(), p.z()};
      out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
    }
  }
}

}  // namespace corrgroup
