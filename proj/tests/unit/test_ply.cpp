#include <doctest.h>

#include <cstring>
#include <sstream>

#include "corrgroup/error.hpp"
#include "corrgroup/ply.hpp"

using namespace corrgroup;

namespace {

PointCloud sample() {
  return PointCloud({Point3(0.1, -2.5, 3.0), Point3(1.0 / 3.0, 1e-300, -7.25), Point3(123456.789, 0, 1)});
}

void check_equal(const PointCloud& a, const PointCloud& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

}  // namespace

TEST_CASE("ascii and binary round trips are exact") {
  for (PlyFormat f : {PlyFormat::kAscii, PlyFormat::kBinaryLittleEndian}) {
    std::stringstream ss;
    write_ply(ss, sample(), f);
    check_equal(read_ply(ss), sample());
  }
}

TEST_CASE("ascii reader skips extra properties, lists and later elements") {
  std::stringstream ss(
      "ply\nformat ascii 1.0\ncomment made by hand\nelement vertex 2\nproperty float x\nproperty uchar red\n"
      "property float y\nproperty float z\nproperty list uchar int idx\nelement face 1\nproperty list uchar int vertex_indices\n"
      "end_header\n1 255 2 3 2 7 8\n4 0 5 6 0\n3 0 1 1\n");
  const PointCloud c = read_ply(ss);
  REQUIRE(c.size() == 2);
  CHECK(c[0] == Point3(1, 2, 3));
  CHECK(c[1] == Point3(4, 5, 6));
}

TEST_CASE("binary float32 vertices with a leading element") {
  std::string header =
      "ply\nformat binary_little_endian 1.0\nelement camera 1\nproperty int id\nelement vertex 1\n"
      "property float x\nproperty float y\nproperty float z\nproperty uchar flag\nend_header\n";
  std::string body(4 + 13, '\0');
  const std::int32_t id = 9;
  const float xyz[3] = {1.5f, -2.0f, 0.25f};
  std::memcpy(body.data(), &id, 4);
  std::memcpy(body.data() + 4, xyz, 12);
  std::stringstream ss(header + body);
  const PointCloud c = read_ply(ss);
  REQUIRE(c.size() == 1);
  CHECK(c[0] == Point3(1.5, -2.0, 0.25));
}

TEST_CASE("malformed ply input") {
  std::stringstream no_magic("plx\n");
  CHECK_THROWS_AS(read_ply(no_magic), ValidationError);
  std::stringstream big_endian("ply\nformat binary_big_endian 1.0\nelement vertex 0\nend_header\n");
  CHECK_THROWS_AS(read_ply(big_endian), ValidationError);
  std::stringstream truncated("ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\n"
                              "property float z\nend_header\n1 2 3\n");
  CHECK_THROWS_AS(read_ply(truncated), ValidationError);
  std::stringstream no_xyz("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nend_header\n1\n");
  CHECK_THROWS_AS(read_ply(no_xyz), ValidationError);
  CHECK_THROWS_AS(read_ply(std::filesystem::path("/nonexistent/file.ply")), ValidationError);
}
