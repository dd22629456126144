#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>

#include "archmark/consensus.hpp"
#include "archmark/evalstats.hpp"
#include "archmark/heatmap.hpp"
#include "archmark/hourglass.hpp"
#include "archmark/pipeline.hpp"

namespace archmark {

std::string_view library_version();

/// Subset of TOML: [tables], dotted keys, strings, integers, floats,
/// booleans and comments. Keys come back fully qualified ("views.count").
using TomlValue = std::variant<std::string, std::int64_t, double, bool>;
std::map<std::string, TomlValue> parse_toml(std::string_view text);

struct PipelineConfig {
  std::uint64_t seed = 0;
  ViewConfig views;
  HeatmapConfig heatmap;
  NetworkConfig network;  // network.seed is derived from seed
  TrainConfig train;      // train.seed is derived from seed
  ConsensusConfig consensus;
  EvalConfig eval;

  /// Fills the derived sub-seeds from `seed`.
  void derive_seeds();
};

/// Empty text gives the defaults. ParseError for malformed text, UnknownKey
/// for keys outside the schema, InvalidValue for wrong types or values that
/// fail component validation.
PipelineConfig parse_config(std::string_view text);
PipelineConfig load_config(const std::string& path);

/// Every key with its resolved value, in a stable order.
std::string config_to_toml(const PipelineConfig& config);

/// 16 hex digits identifying the resolved configuration.
std::string config_hash(const PipelineConfig& config);

}  // namespace archmark
