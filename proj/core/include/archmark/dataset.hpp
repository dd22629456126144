#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "archmark/mesh_io.hpp"
#include "archmark/synth_arch.hpp"

namespace archmark {

enum class Split { Unassigned, Train, Test };

struct ManifestRow {
  std::string id;
  std::string mesh_path;  // as written; relative to the manifest directory
  std::string landmarks_path;
  Split split = Split::Unassigned;
  TreatmentTag treatment = TreatmentTag::Pre;
  LargeSegmentSide large_side = LargeSegmentSide::L16;
};

struct Manifest {
  std::string directory;  // paths in rows resolve against this
  std::vector<ManifestRow> rows;

  std::string resolve(const std::string& relative) const;
};

inline constexpr std::string_view kManifestHeader =
    "id,mesh_path,landmarks_path,split,treatment_tag,large_segment_side";

/// Header row required. InvalidValue for unknown column values, duplicate ids
/// or a wrong header; split may be empty (unassigned).
Manifest parse_manifest(std::string_view text, std::string directory);
std::string format_manifest(const Manifest& manifest);

/// Parses the file and checks every referenced file exists (Io otherwise).
Manifest load_manifest(const std::string& path);

struct SplitRequest {
  std::size_t train = 0;
  std::size_t test = 0;
};

struct SplitResult {
  std::vector<ManifestRow> train;
  std::vector<ManifestRow> test;
  /// UnbalancedRequest diagnostics when pre/post balance could not be kept.
  std::vector<std::string> warnings;
};

/// Without a request the rows' split tags are used verbatim (unassigned rows
/// are ignored). With one, rows are drawn per treatment tag after a seeded
/// shuffle, alternating pre and post so both splits stay balanced when the
/// counts allow it. InvalidValue if more rows are requested than exist.
SplitResult split_dataset(const Manifest& manifest, std::optional<SplitRequest> request, std::uint64_t seed);

std::string_view to_string(Split split);

}  // namespace archmark
