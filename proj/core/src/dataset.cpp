#include "archmark/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "archmark/error.hpp"
#include "archmark/io.hpp"
#include "archmark/random.hpp"

namespace archmark {

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Test: return "test";
    case Split::Unassigned: return "";
  }
  return "";
}

std::string Manifest::resolve(const std::string& relative) const {
  const std::filesystem::path p(relative);
  if (p.is_absolute() || directory.empty()) return p.string();
  return (std::filesystem::path(directory) / p).string();
}

namespace {

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out(1);
  for (char c : line) {
    if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return out;
}

[[noreturn]] void bad_row(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::InvalidValue, "manifest line " + std::to_string(line) + ": " + msg);
}

}  // namespace

Manifest parse_manifest(std::string_view text, std::string directory) {
  Manifest m;
  m.directory = std::move(directory);
  std::set<std::string> ids;
  std::size_t line_no = 0;
  bool header = false;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    if (!header) {
      if (line != kManifestHeader) bad_row(line_no, "expected header '" + std::string(kManifestHeader) + "'");
      header = true;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 6) bad_row(line_no, "expected 6 columns, got " + std::to_string(f.size()));
    ManifestRow r;
    r.id = f[0];
    r.mesh_path = f[1];
    r.landmarks_path = f[2];
    if (r.id.empty() || r.mesh_path.empty() || r.landmarks_path.empty()) bad_row(line_no, "empty id or path");
    if (!ids.insert(r.id).second) bad_row(line_no, "duplicate id '" + r.id + "'");
    if (f[3] == "train") {
      r.split = Split::Train;
    } else if (f[3] == "test") {
      r.split = Split::Test;
    } else if (!f[3].empty()) {
      bad_row(line_no, "split must be train, test or empty");
    }
    if (f[4] == "pre") {
      r.treatment = TreatmentTag::Pre;
    } else if (f[4] == "post") {
      r.treatment = TreatmentTag::Post;
    } else {
      bad_row(line_no, "treatment_tag must be pre or post");
    }
    if (f[5] == "L15") {
      r.large_side = LargeSegmentSide::L15;
    } else if (f[5] == "L16") {
      r.large_side = LargeSegmentSide::L16;
    } else {
      bad_row(line_no, "large_segment_side must be L15 or L16");
    }
    m.rows.push_back(std::move(r));
  }
  if (!header) throw Error(ErrorCode::InvalidValue, "manifest is missing its header row");
  return m;
}

std::string format_manifest(const Manifest& m) {
  std::string out = std::string(kManifestHeader) + "\n";
  for (const auto& r : m.rows) {
    out += r.id + ',' + r.mesh_path + ',' + r.landmarks_path + ',' + std::string(to_string(r.split)) + ',' +
           to_string(r.treatment) + ',' + (r.large_side == LargeSegmentSide::L15 ? "L15" : "L16") + '\n';
  }
  return out;
}

Manifest load_manifest(const std::string& path) {
  const auto dir = std::filesystem::path(path).parent_path().string();
  auto m = parse_manifest(read_text_file(path), dir);
  for (const auto& r : m.rows) {
    for (const auto* rel : {&r.mesh_path, &r.landmarks_path}) {
      const auto full = m.resolve(*rel);
      if (!std::filesystem::is_regular_file(full)) {
        throw Error(ErrorCode::Io, "manifest row '" + r.id + "' references missing file '" + full + "'");
      }
    }
  }
  return m;
}

SplitResult split_dataset(const Manifest& manifest, std::optional<SplitRequest> request, std::uint64_t seed) {
  SplitResult out;
  if (!request) {
    for (const auto& r : manifest.rows) {
      if (r.split == Split::Train) out.train.push_back(r);
      if (r.split == Split::Test) out.test.push_back(r);
    }
    return out;
  }
  const std::size_t total = request->train + request->test;
  if (total > manifest.rows.size()) {
    throw Error(ErrorCode::InvalidValue, "requested " + std::to_string(total) + " rows but the manifest has " +
                                             std::to_string(manifest.rows.size()));
  }
  std::vector<std::size_t> pools[2];
  for (std::size_t i = 0; i < manifest.rows.size(); ++i) {
    pools[manifest.rows[i].treatment == TreatmentTag::Pre ? 0 : 1].push_back(i);
  }
  Rng rng(derive_seed(seed, "split"));
  for (auto& p : pools) {
    rng.shuffle(p.begin(), p.end());
    std::reverse(p.begin(), p.end());  // draw from the back
  }

  auto draw = [&](std::size_t n, std::vector<ManifestRow>& dest, const char* name) {
    std::size_t counts[2] = {0, 0};
    std::vector<std::size_t> picked;
    for (std::size_t k = 0; k < n; ++k) {
      int tag = static_cast<int>(k % 2);
      if (pools[tag].empty()) tag = 1 - tag;
      picked.push_back(pools[tag].back());
      pools[tag].pop_back();
      ++counts[tag];
    }
    if (counts[0] != counts[1]) {
      out.warnings.push_back(std::string(to_string(ErrorCode::UnbalancedRequest)) + ": " + name + " split has " +
                             std::to_string(counts[0]) + " pre and " + std::to_string(counts[1]) + " post rows");
    }
    std::sort(picked.begin(), picked.end());
    for (auto i : picked) {
      dest.push_back(manifest.rows[i]);
      dest.back().split = &dest == &out.train ? Split::Train : Split::Test;
    }
  };
  draw(request->test, out.test, "test");
  draw(request->train, out.train, "train");
  return out;
}

}  // namespace archmark
