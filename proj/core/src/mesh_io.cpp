#include "archmark/mesh_io.hpp"

#include <algorithm>
#include <utility>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <map>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

#include "archmark/error.hpp"
#include "byte_io.hpp"

namespace archmark {
namespace {

struct CoordKey {
  std::uint64_t x, y, z;
  bool operator==(const CoordKey&) const = default;
};

struct CoordKeyHash {
  std::size_t operator()(const CoordKey& k) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::uint64_t v : {k.x, k.y, k.z}) {
      h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

// Adding 0.0 folds -0.0 onto +0.0 so that value equality drives the merge.
CoordKey key_of(const Vec3& p) {
  return {std::bit_cast<std::uint64_t>(p.x() + 0.0), std::bit_cast<std::uint64_t>(p.y() + 0.0),
          std::bit_cast<std::uint64_t>(p.z() + 0.0)};
}

class MeshBuilder {
 public:
  void add_facet(const std::array<Vec3, 3>& corners, const Vec3& file_normal) {
    for (const auto& c : corners) {
      if (!c.allFinite()) throw Error(ErrorCode::InvalidParams, "non-finite STL coordinate");
    }
    Face face{};
    for (int i = 0; i < 3; ++i) face[i] = index_of(corners[i]);
    const Vec3 cross = (corners[1] - corners[0]).cross(corners[2] - corners[0]);
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2] || cross.squaredNorm() == 0.0) {
      ++dropped_;
      return;
    }
    mesh_.faces.push_back(face);
    const double n = file_normal.norm();
    if (std::isfinite(n) && std::abs(n - 1.0) < 1e-5) {
      mesh_.face_normals.push_back(file_normal);  // keeps the float bits for re-writing
    } else {
      mesh_.face_normals.push_back(std::isfinite(n) && n > 0.0 ? Vec3(file_normal / n) : Vec3(cross.normalized()));
    }
  }

  TriangleMesh finish(StlInfo* info, bool ascii, std::size_t in_file) {
    if (mesh_.faces.empty()) throw Error(ErrorCode::EmptyMesh, "STL contains no usable triangles");
    if (info) *info = StlInfo{ascii, in_file, dropped_};
    return std::move(mesh_);
  }

 private:
  std::uint32_t index_of(const Vec3& p) {
    auto [it, inserted] = lookup_.try_emplace(key_of(p), static_cast<std::uint32_t>(mesh_.vertices.size()));
    if (inserted) mesh_.vertices.push_back(p);
    return it->second;
  }

  TriangleMesh mesh_;
  std::unordered_map<CoordKey, std::uint32_t, CoordKeyHash> lookup_;
  std::size_t dropped_ = 0;
};

constexpr std::size_t kStlHeader = 80;
constexpr std::size_t kStlRecord = 50;

TriangleMesh parse_binary(std::span<const std::uint8_t> bytes, StlInfo* info) {
  if (bytes.size() < kStlHeader + 4) throw Error(ErrorCode::TruncatedFile, "binary STL shorter than its header");
  const std::uint32_t count = detail::read_u32_le(bytes.data() + kStlHeader);
  const std::size_t expected = kStlHeader + 4 + std::size_t{count} * kStlRecord;
  if (bytes.size() < expected) {
    throw Error(ErrorCode::TruncatedFile, "header declares " + std::to_string(count) + " triangles but only " +
                                              std::to_string((bytes.size() - kStlHeader - 4) / kStlRecord) +
                                              " records are present");
  }
  if (count == 0) throw Error(ErrorCode::EmptyMesh, "binary STL declares 0 triangles");

  MeshBuilder builder;
  const std::uint8_t* p = bytes.data() + kStlHeader + 4;
  for (std::uint32_t t = 0; t < count; ++t, p += kStlRecord) {
    float f[12];
    for (int i = 0; i < 12; ++i) f[i] = detail::read_f32_le(p + 4 * i);
    builder.add_facet({Vec3(f[3], f[4], f[5]), Vec3(f[6], f[7], f[8]), Vec3(f[9], f[10], f[11])},
                      Vec3(f[0], f[1], f[2]));
  }
  return builder.finish(info, false, count);
}

class AsciiTokens {
 public:
  explicit AsciiTokens(std::string_view text) : text_(text) {}

  std::string_view next() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  void skip_line() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
  }

  void expect(std::string_view word) {
    const auto tok = next();
    if (tok != word) {
      throw Error(ErrorCode::MalformedAscii,
                  "expected '" + std::string(word) + "' but found '" + std::string(tok) + "'");
    }
  }

  double number() {
    const auto tok = next();
    double value = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (tok.empty() || res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
      throw Error(ErrorCode::MalformedAscii, "expected a number but found '" + std::string(tok) + "'");
    }
    return value;
  }

  Vec3 vec3() {
    const double x = number();
    const double y = number();
    const double z = number();
    return {x, y, z};
  }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

  std::string_view text_;
  std::size_t pos_ = 0;
};

TriangleMesh parse_ascii(std::string_view text, StlInfo* info) {
  AsciiTokens tokens(text);
  tokens.expect("solid");
  tokens.skip_line();

  MeshBuilder builder;
  std::size_t in_file = 0;
  bool closed = false;
  for (auto tok = tokens.next(); !tok.empty(); tok = tokens.next()) {
    if (tok == "endsolid") {
      tokens.skip_line();
      closed = true;
      // A following `solid` starts another body in the same file.
      auto again = tokens.next();
      if (again.empty()) break;
      if (again != "solid") throw Error(ErrorCode::MalformedAscii, "content after endsolid");
      tokens.skip_line();
      closed = false;
      continue;
    }
    if (tok != "facet") throw Error(ErrorCode::MalformedAscii, "expected 'facet' but found '" + std::string(tok) + "'");
    tokens.expect("normal");
    const Vec3 normal = tokens.vec3();
    tokens.expect("outer");
    tokens.expect("loop");
    std::array<Vec3, 3> corners;
    for (auto& c : corners) {
      tokens.expect("vertex");
      c = tokens.vec3();
    }
    tokens.expect("endloop");
    tokens.expect("endfacet");
    builder.add_facet(corners, normal);
    ++in_file;
  }
  if (!closed) throw Error(ErrorCode::MalformedAscii, "missing endsolid");
  if (in_file == 0) throw Error(ErrorCode::EmptyMesh, "ASCII STL contains no facets");
  return builder.finish(info, true, in_file);
}

bool looks_ascii(std::span<const std::uint8_t> bytes) {
  std::size_t i = 0;
  while (i < bytes.size() && (bytes[i] == ' ' || bytes[i] == '\t' || bytes[i] == '\r' || bytes[i] == '\n')) ++i;
  if (bytes.size() - i < 5 || std::memcmp(bytes.data() + i, "solid", 5) != 0) return false;
  // Some binary writers start their header with "solid"; trust a consistent
  // binary size over the magic word.
  if (bytes.size() >= kStlHeader + 4) {
    const std::uint32_t count = detail::read_u32_le(bytes.data() + kStlHeader);
    if (bytes.size() == kStlHeader + 4 + std::size_t{count} * kStlRecord) return false;
  }
  return true;
}

void append_number(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

Vec3 TriangleMesh::face_normal(std::size_t face) const {
  const auto c = corners(face);
  return (c[1] - c[0]).cross(c[2] - c[0]).normalized();
}

void validate_mesh(const TriangleMesh& mesh) {
  for (const auto& v : mesh.vertices) {
    if (!v.allFinite()) throw Error(ErrorCode::InvalidParams, "non-finite vertex coordinate");
  }
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    for (auto idx : mesh.faces[f]) {
      if (idx >= mesh.vertices.size()) {
        throw Error(ErrorCode::InvalidParams, "face " + std::to_string(f) + " references a missing vertex");
      }
    }
    const auto c = mesh.corners(f);
    if ((c[1] - c[0]).cross(c[2] - c[0]).squaredNorm() == 0.0) {
      throw Error(ErrorCode::InvalidParams, "face " + std::to_string(f) + " has zero area");
    }
  }
  if (!mesh.face_normals.empty() && mesh.face_normals.size() != mesh.faces.size()) {
    throw Error(ErrorCode::InvalidParams, "face normal count does not match face count");
  }
}

TriangleMesh parse_stl(std::span<const std::uint8_t> bytes, StlInfo* info) {
  if (looks_ascii(bytes)) {
    return parse_ascii(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), info);
  }
  return parse_binary(bytes, info);
}

TriangleMesh parse_stl(std::string_view bytes, StlInfo* info) {
  return parse_stl(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()),
                   info);
}

std::vector<std::uint8_t> write_stl(const TriangleMesh& mesh, StlMode mode) {
  if (mesh.empty()) throw Error(ErrorCode::EmptyMesh, "cannot write a mesh without faces");
  const bool have_normals = mesh.face_normals.size() == mesh.faces.size();
  auto normal_of = [&](std::size_t f) { return have_normals ? mesh.face_normals[f] : mesh.face_normal(f); };

  std::vector<std::uint8_t> out;
  if (mode == StlMode::Binary) {
    out.resize(kStlHeader + 4 + mesh.faces.size() * kStlRecord, 0);
    constexpr std::string_view header = "archmark binary STL, units mm";
    std::memcpy(out.data(), header.data(), header.size());
    detail::write_u32_le(out.data() + kStlHeader, static_cast<std::uint32_t>(mesh.faces.size()));
    std::uint8_t* p = out.data() + kStlHeader + 4;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f, p += kStlRecord) {
      const Vec3 n = normal_of(f);
      const auto c = mesh.corners(f);
      const Vec3* rows[4] = {&n, &c[0], &c[1], &c[2]};
      for (int r = 0; r < 4; ++r) {
        for (int k = 0; k < 3; ++k) detail::write_f32_le(p + 12 * r + 4 * k, static_cast<float>((*rows[r])[k]));
      }
    }
    return out;
  }

  std::string text = "solid archmark\n";
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Vec3 n = normal_of(f);
    text += "  facet normal ";
    for (int k = 0; k < 3; ++k) {
      if (k) text += ' ';
      append_number(text, n[k]);
    }
    text += "\n    outer loop\n";
    for (const auto& c : mesh.corners(f)) {
      text += "      vertex ";
      for (int k = 0; k < 3; ++k) {
        if (k) text += ' ';
        append_number(text, c[k]);
      }
      text += '\n';
    }
    text += "    endloop\n  endfacet\n";
  }
  text += "endsolid archmark\n";
  out.assign(text.begin(), text.end());
  return out;
}

// ---------------------------------------------------------------------------

std::string_view default_landmark_name(int index) {
  static constexpr std::array<std::string_view, kLandmarkCount> names = {
      "Small Anterior Point",       "Small Canine Point",  "Small Posterior Cleft Point",
      "Large Anterior Point",       "Large Anterior Cleft Point", "Small Widest Point",
      "Landmark 7 (unnamed)",       "Large Posterior Cleft Point", "Small Anterior Cleft Point",
      "Large Widest Point",         "Large Canine Point",  "Incisive Papilla",
      "Convex Point",               "Frenum Point",        "Tuberosity Point",
      "Tuberosity Point",
  };
  if (index < 1 || index > kLandmarkCount) {
    throw Error(ErrorCode::IndexOutOfRange, "landmark index " + std::to_string(index));
  }
  return names[static_cast<std::size_t>(index - 1)];
}

LandmarkSet::LandmarkSet(std::string landmark7_name) {
  for (int i = 1; i <= kLandmarkCount; ++i) {
    auto& e = entries_[static_cast<std::size_t>(i - 1)];
    e.index = i;
    e.name = i == 7 ? landmark7_name : std::string(default_landmark_name(i));
  }
}

const Landmark& LandmarkSet::at(int index) const {
  if (index < 1 || index > kLandmarkCount) {
    throw Error(ErrorCode::IndexOutOfRange, "landmark index " + std::to_string(index));
  }
  return entries_[static_cast<std::size_t>(index - 1)];
}

Landmark& LandmarkSet::at(int index) {
  return const_cast<Landmark&>(std::as_const(*this).at(index));
}

void LandmarkSet::set(int index, const Vec3& position) {
  if (!position.allFinite()) throw Error(ErrorCode::UnparseableRow, "non-finite landmark position");
  auto& e = at(index);
  e.position = position;
  e.present = true;
}

void LandmarkSet::clear(int index) {
  auto& e = at(index);
  e.position = Vec3::Zero();
  e.present = false;
}

std::size_t LandmarkSet::present_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [](const Landmark& e) { return e.present; }));
}

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view field, int line_no) {
  field = trim(field);
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || res.ec != std::errc{} || res.ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::UnparseableRow, "line " + std::to_string(line_no) + ": bad number '" +
                                               std::string(field) + "'");
  }
  return v;
}

// First run of decimal digits in the label, e.g. "L12", "F-3", "12".
int index_from_label(std::string_view label, int line_no) {
  const auto first = std::find_if(label.begin(), label.end(), [](char c) { return c >= '0' && c <= '9'; });
  if (first == label.end()) {
    throw Error(ErrorCode::UnparseableRow,
                "line " + std::to_string(line_no) + ": label '" + std::string(label) + "' has no landmark index");
  }
  const auto last = std::find_if(first, label.end(), [](char c) { return c < '0' || c > '9'; });
  int idx = 0;
  const auto res = std::from_chars(&*first, &*first + (last - first), idx);
  if (res.ec != std::errc{}) {
    throw Error(ErrorCode::IndexOutOfRange, "line " + std::to_string(line_no) + ": index too large");
  }
  return idx;
}

void check_slot(int idx, std::array<bool, kLandmarkCount>& seen, int line_no) {
  if (idx < 1 || idx > kLandmarkCount) {
    throw Error(ErrorCode::IndexOutOfRange,
                "line " + std::to_string(line_no) + ": landmark index " + std::to_string(idx) + " not in 1..16");
  }
  auto& flag = seen[static_cast<std::size_t>(idx - 1)];
  if (flag) throw Error(ErrorCode::DuplicateIndex, "landmark index " + std::to_string(idx) + " appears twice");
  flag = true;
}

LandmarkSet read_fcsv(std::string_view text) {
  LandmarkSet set;
  std::array<bool, kLandmarkCount> seen{};
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_csv(line);
    if (fields.size() < 12) {
      throw Error(ErrorCode::UnparseableRow,
                  "line " + std::to_string(line_no) + ": expected at least 12 columns, got " +
                      std::to_string(fields.size()));
    }
    const Vec3 p(parse_double(fields[1], line_no), parse_double(fields[2], line_no),
                 parse_double(fields[3], line_no));
    const int idx = index_from_label(trim(fields[11]), line_no);
    check_slot(idx, seen, line_no);
    set.set(idx, p);
  }
  return set;
}

LandmarkSet read_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::UnparseableRow, std::string("landmark JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("landmarks") || !doc["landmarks"].is_array()) {
    throw Error(ErrorCode::UnparseableRow, "landmark JSON needs a top-level \"landmarks\" array");
  }
  LandmarkSet set;
  std::array<bool, kLandmarkCount> seen{};
  int row = 0;
  for (const auto& entry : doc["landmarks"]) {
    ++row;
    try {
      const int idx = entry.at("index").get<int>();
      check_slot(idx, seen, row);
      const bool present = entry.value("present", true);
      if (entry.contains("name") && idx == 7) set.at(7).name = entry["name"].get<std::string>();
      if (!present) continue;
      const auto& pos = entry.at("position");
      if (!pos.is_array() || pos.size() != 3) throw Error(ErrorCode::UnparseableRow, "position must have 3 numbers");
      const Vec3 p(pos[0].get<double>(), pos[1].get<double>(), pos[2].get<double>());
      if (!p.allFinite()) throw Error(ErrorCode::UnparseableRow, "non-finite position");
      set.set(idx, p);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::UnparseableRow, "landmark JSON row " + std::to_string(row) + ": " + e.what());
    }
  }
  return set;
}

}  // namespace

LandmarkSet read_landmarks(std::string_view text, LandmarkFormat format) {
  return format == LandmarkFormat::Fcsv ? read_fcsv(text) : read_json(text);
}

std::string write_landmarks(const LandmarkSet& landmarks, LandmarkFormat format) {
  if (format == LandmarkFormat::Json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : landmarks.entries()) {
      arr.push_back({{"index", e.index},
                     {"name", e.name},
                     {"position", {e.position.x(), e.position.y(), e.position.z()}},
                     {"present", e.present}});
    }
    return nlohmann::json{{"landmarks", arr}}.dump(2) + "\n";
  }
  std::string out =
      "# Markups fiducial file version = 4.11\n"
      "# units = mm\n"
      "# columns = id,x,y,z,ow,ox,oy,oz,vis,sel,lock,label,desc,associatedNodeID\n";
  for (const auto& e : landmarks.entries()) {
    if (!e.present) continue;
    out += "vtkMRMLMarkupsFiducialNode_" + std::to_string(e.index) + ',';
    for (int k = 0; k < 3; ++k) {
      append_number(out, e.position[k]);
      out += ',';
    }
    out += "0,0,0,1,1,1,0,L" + std::to_string(e.index) + ',' + e.name + ",\n";
  }
  return out;
}

LandmarkFormat landmark_format_for_path(std::string_view path) {
  return path.size() >= 5 && path.substr(path.size() - 5) == ".json" ? LandmarkFormat::Json : LandmarkFormat::Fcsv;
}

// ---------------------------------------------------------------------------

Aabb bounding_box(const TriangleMesh& mesh) {
  if (mesh.vertices.empty()) throw Error(ErrorCode::EmptyMesh, "bounding box of an empty mesh");
  Aabb box{mesh.vertices.front(), mesh.vertices.front()};
  for (const auto& v : mesh.vertices) {
    box.min = box.min.cwiseMin(v);
    box.max = box.max.cwiseMax(v);
  }
  return box;
}

MeshMetrics mesh_metrics(const TriangleMesh& mesh) {
  if (mesh.empty()) throw Error(ErrorCode::EmptyMesh, "metrics of an empty mesh");
  MeshMetrics m;
  double signed_six = 0.0;
  double area_two = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto c = mesh.corners(f);
    signed_six += c[0].dot(c[1].cross(c[2]));
    area_two += (c[1] - c[0]).cross(c[2] - c[0]).norm();
  }
  m.volume = std::abs(signed_six) / 6.0;
  m.surface_area = area_two / 2.0;
  m.aabb = bounding_box(mesh);

  // Each undirected edge must appear exactly once in each direction.
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::array<int, 2>> edges;
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      const std::uint32_t a = f[k];
      const std::uint32_t b = f[(k + 1) % 3];
      auto& count = edges[{std::min(a, b), std::max(a, b)}];
      ++count[a < b ? 0 : 1];
    }
  }
  m.watertight = std::all_of(edges.begin(), edges.end(),
                             [](const auto& kv) { return kv.second[0] == 1 && kv.second[1] == 1; });
  return m;
}

ReferencePlanes reference_planes(const LandmarkSet& landmarks, LargeSegmentSide large_side) {
  for (int idx : {15, 16}) {
    if (!landmarks.present(idx)) {
      throw Error(ErrorCode::MissingLandmark, "reference planes need landmark " + std::to_string(idx));
    }
  }
  const Vec3& l15 = landmarks.at(15).position;
  const Vec3& l16 = landmarks.at(16).position;
  const Vec3& large = large_side == LargeSegmentSide::L16 ? l16 : l15;
  ReferencePlanes planes;
  planes.sagittal = {0.5 * (l15 + l16), Vec3::UnitX()};
  planes.coronal = {large, Vec3::UnitY()};
  planes.transverse = {large, Vec3::UnitZ()};
  return planes;
}

// ---------------------------------------------------------------------------

TriangleMesh make_box(const Vec3& lo, const Vec3& hi) {
  TriangleMesh mesh;
  for (int i = 0; i < 8; ++i) {
    mesh.vertices.emplace_back(i & 1 ? hi.x() : lo.x(), i & 2 ? hi.y() : lo.y(), i & 4 ? hi.z() : lo.z());
  }
  // Outward-facing quads, counter-clockwise seen from outside.
  const std::array<std::array<std::uint32_t, 4>, 6> quads = {{
      {0, 2, 3, 1},  // -z
      {4, 5, 7, 6},  // +z
      {0, 1, 5, 4},  // -y
      {2, 6, 7, 3},  // +y
      {0, 4, 6, 2},  // -x
      {1, 3, 7, 5},  // +x
  }};
  for (const auto& q : quads) {
    mesh.faces.push_back({q[0], q[1], q[2]});
    mesh.faces.push_back({q[0], q[2], q[3]});
  }
  return mesh;
}

TriangleMesh make_icosphere(double radius, int subdivisions, const Vec3& center) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                             {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<Face> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
                             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
                             {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::make_pair(std::min(a, b), std::max(a, b));
      auto it = midpoints.find(key);
      if (it != midpoints.end()) return it->second;
      verts.push_back((0.5 * (verts[a] + verts[b])).normalized());
      const auto id = static_cast<std::uint32_t>(verts.size() - 1);
      midpoints.emplace(key, id);
      return id;
    };
    std::vector<Face> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const auto ab = midpoint(f[0], f[1]);
      const auto bc = midpoint(f[1], f[2]);
      const auto ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  TriangleMesh mesh;
  mesh.vertices.reserve(verts.size());
  for (const auto& v : verts) mesh.vertices.push_back(center + radius * v);
  mesh.faces = std::move(faces);
  return mesh;
}

}  // namespace archmark
