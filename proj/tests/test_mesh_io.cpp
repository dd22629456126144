#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

#include "archmark/error.hpp"
#include "archmark/mesh_io.hpp"
#include "archmark/random.hpp"
#include "doctest.h"

using namespace archmark;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an archmark::Error");
  return ErrorCode::Io;
}

TriangleMesh tetra() {
  TriangleMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  m.faces = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  return m;
}

std::string sixteen_rows_fcsv() {
  LandmarkSet s;
  for (int i = 1; i <= 16; ++i) s.set(i, Vec3(i, 2.0 * i, -0.5 * i));
  return write_landmarks(s, LandmarkFormat::Fcsv);
}

}  // namespace

TEST_CASE("binary cube parses to 8 vertices and 12 faces") {
  const auto bytes = write_stl(make_box(Vec3::Zero(), Vec3::Ones()), StlMode::Binary);
  const auto m = parse_stl(bytes);
  CHECK(m.vertices.size() == 8);
  CHECK(m.faces.size() == 12);
  const auto again = write_stl(m, StlMode::Binary);
  CHECK(again == bytes);
}

TEST_CASE("ascii single triangle") {
  const std::string text =
      "solid t\n facet normal 0 0 1\n  outer loop\n   vertex 0 0 0\n   vertex 1 0 0\n   vertex 0 1 0\n"
      "  endloop\n endfacet\nendsolid t\n";
  StlInfo info;
  const auto m = parse_stl(std::string_view(text), &info);
  CHECK(info.ascii);
  CHECK(m.vertices.size() == 3);
  CHECK(m.faces.size() == 1);
  const auto out = write_stl(m, StlMode::Ascii);
  CHECK(std::string(out.begin(), out.begin() + 5) == "solid");
}

TEST_CASE("binary round trip keeps float coordinates exactly") {
  Rng rng(4);
  TriangleMesh m;
  for (int f = 0; f < 200; ++f) {
    for (int k = 0; k < 3; ++k) {
      m.vertices.emplace_back(static_cast<float>(rng.uniform(-1e3, 1e3)), static_cast<float>(rng.uniform(-1e3, 1e3)),
                              static_cast<float>(rng.uniform(-1e3, 1e3)));
    }
    m.faces.push_back({static_cast<std::uint32_t>(3 * f), static_cast<std::uint32_t>(3 * f + 1),
                       static_cast<std::uint32_t>(3 * f + 2)});
  }
  const auto bytes = write_stl(m, StlMode::Binary);
  const auto back = parse_stl(bytes);
  REQUIRE(back.faces.size() == m.faces.size());
  for (std::size_t f = 0; f < m.faces.size(); ++f) {
    const auto a = m.corners(f), b = back.corners(f);
    for (int k = 0; k < 3; ++k) CHECK(a[k] == b[k]);
  }
  CHECK(write_stl(back, StlMode::Binary) == bytes);
}

TEST_CASE("malformed STL inputs raise the designated errors") {
  auto bytes = write_stl(make_box(Vec3::Zero(), Vec3::Ones()), StlMode::Binary);

  SUBCASE("header claims one more triangle than present") {
    const std::uint32_t ten = 13;
    std::memcpy(bytes.data() + 80, &ten, 4);
    CHECK(code_of([&] { parse_stl(bytes); }) == ErrorCode::TruncatedFile);
  }
  SUBCASE("cut inside a record") {
    bytes.resize(bytes.size() - 7);
    CHECK(code_of([&] { parse_stl(bytes); }) == ErrorCode::TruncatedFile);
  }
  SUBCASE("shorter than the header") {
    bytes.resize(40);
    CHECK(code_of([&] { parse_stl(bytes); }) == ErrorCode::TruncatedFile);
  }
  SUBCASE("zero declared triangles") {
    bytes.resize(84);
    std::memset(bytes.data() + 80, 0, 4);
    CHECK(code_of([&] { parse_stl(bytes); }) == ErrorCode::EmptyMesh);
  }
  SUBCASE("ascii with a bad number") {
    const std::string t = "solid x\nfacet normal 0 0 1\nouter loop\nvertex 0 0 zero\n";
    CHECK(code_of([&] { parse_stl(std::string_view(t)); }) == ErrorCode::MalformedAscii);
  }
  SUBCASE("ascii without endsolid") {
    const std::string t =
        "solid x\nfacet normal 0 0 1\nouter loop\nvertex 0 0 0\nvertex 1 0 0\nvertex 0 1 0\nendloop\nendfacet\n";
    CHECK(code_of([&] { parse_stl(std::string_view(t)); }) == ErrorCode::MalformedAscii);
  }
  SUBCASE("ascii with two vertices in a loop") {
    const std::string t =
        "solid x\nfacet normal 0 0 1\nouter loop\nvertex 0 0 0\nvertex 1 0 0\nendloop\nendfacet\nendsolid x\n";
    CHECK(code_of([&] { parse_stl(std::string_view(t)); }) == ErrorCode::MalformedAscii);
  }
}

TEST_CASE("writing an empty mesh fails") {
  CHECK(code_of([] { write_stl(TriangleMesh{}, StlMode::Binary); }) == ErrorCode::EmptyMesh);
}

TEST_CASE("mesh metrics of analytic shapes") {
  const auto cube = mesh_metrics(make_box(Vec3::Zero(), Vec3::Ones()));
  CHECK(cube.volume == 1.0);
  CHECK(cube.surface_area == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(cube.watertight);

  CHECK(mesh_metrics(tetra()).volume == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

  const auto sphere = mesh_metrics(make_icosphere(10.0, 3));
  const double v = 4.0 / 3.0 * std::numbers::pi * 1000.0;
  const double a = 4.0 * std::numbers::pi * 100.0;
  CHECK(std::abs(sphere.volume - v) / v < 0.01);
  CHECK(std::abs(sphere.surface_area - a) / a < 0.01);
}

TEST_CASE("volume is invariant under rotation and additive over disjoint shells") {
  const auto sphere = make_icosphere(7.0, 2, Vec3(3, -2, 5));
  const double v0 = mesh_metrics(sphere).volume;
  TriangleMesh rotated = sphere;
  const Eigen::Matrix3d R = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  for (auto& p : rotated.vertices) p = R * p + Vec3(10, 0, -4);
  CHECK(std::abs(mesh_metrics(rotated).volume - v0) <= 1e-9 * v0);

  TriangleMesh both = sphere;
  const auto off = static_cast<std::uint32_t>(both.vertices.size());
  for (const auto& p : sphere.vertices) both.vertices.push_back(Vec3(-p.x(), p.y(), p.z()) + Vec3(100, 0, 0));
  for (const auto& f : sphere.faces) both.faces.push_back({f[0] + off, f[2] + off, f[1] + off});
  CHECK(mesh_metrics(both).volume == doctest::Approx(2.0 * v0).epsilon(1e-12));
}

TEST_CASE("vertex deduplication leaves metrics unchanged") {
  const auto box = make_box(Vec3(-1, 0, 2), Vec3(3, 1, 4));
  TriangleMesh soup;
  for (std::size_t f = 0; f < box.faces.size(); ++f) {
    const auto c = box.corners(f);
    const auto base = static_cast<std::uint32_t>(soup.vertices.size());
    soup.vertices.insert(soup.vertices.end(), c.begin(), c.end());
    soup.faces.push_back({base, base + 1, base + 2});
  }
  const auto a = mesh_metrics(soup), b = mesh_metrics(parse_stl(write_stl(soup, StlMode::Binary)));
  CHECK(a.volume == b.volume);
  CHECK(a.surface_area == b.surface_area);
}

TEST_CASE("landmark files") {
  SUBCASE("16 rows all present and round trip in both formats") {
    const auto s = read_landmarks(sixteen_rows_fcsv(), LandmarkFormat::Fcsv);
    CHECK(s.present_count() == 16);
    CHECK(read_landmarks(write_landmarks(s, LandmarkFormat::Json), LandmarkFormat::Json) == s);
    CHECK(read_landmarks(write_landmarks(s, LandmarkFormat::Fcsv), LandmarkFormat::Fcsv) == s);
  }
  SUBCASE("missing row leaves the slot absent") {
    LandmarkSet s = read_landmarks(sixteen_rows_fcsv(), LandmarkFormat::Fcsv);
    s.clear(7);
    const auto back = read_landmarks(write_landmarks(s, LandmarkFormat::Fcsv), LandmarkFormat::Fcsv);
    CHECK_FALSE(back.present(7));
    CHECK(back.present_count() == 15);
  }
  SUBCASE("duplicate index") {
    std::string text = sixteen_rows_fcsv();
    const auto last_line = text.rfind('\n', text.size() - 2);
    text += text.substr(last_line + 1);
    CHECK(code_of([&] { read_landmarks(text, LandmarkFormat::Fcsv); }) == ErrorCode::DuplicateIndex);
  }
  SUBCASE("format from extension") {
    CHECK(landmark_format_for_path("a/b.json") == LandmarkFormat::Json);
    CHECK(landmark_format_for_path("a/b.fcsv") == LandmarkFormat::Fcsv);
  }
}

TEST_CASE("reference planes") {
  LandmarkSet s;
  s.set(15, Vec3(-13, 0, 0));
  s.set(16, Vec3(14, 0, 0));
  for (int i = 1; i <= 14; ++i) s.set(i, Vec3(0.1 * i, 20.0 + i, 5.0));
  const auto p = reference_planes(s, LargeSegmentSide::L16);
  CHECK((p.sagittal.point - Vec3(0.5, 0, 0)).norm() < 1e-12);
  CHECK(std::abs(std::abs(p.sagittal.normal.dot(Vec3::UnitX())) - 1.0) < 1e-12);
  for (const Plane* q : {&p.coronal, &p.transverse}) CHECK(std::abs((Vec3(14, 0, 0) - q->point).dot(q->normal)) < 1e-12);
  CHECK(std::abs(p.sagittal.normal.dot(p.coronal.normal)) < 1e-12);
  CHECK(std::abs(p.sagittal.normal.dot(p.transverse.normal)) < 1e-12);
  CHECK(std::abs(p.coronal.normal.dot(p.transverse.normal)) < 1e-12);

  s.clear(15);
  CHECK(code_of([&] { reference_planes(s); }) == ErrorCode::MissingLandmark);
}
