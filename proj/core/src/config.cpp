#include "archmark/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "archmark/error.hpp"
#include "archmark/io.hpp"
#include "archmark/random.hpp"

#ifndef ARCHMARK_VERSION
#define ARCHMARK_VERSION "0.0.0"
#endif

namespace archmark {

std::string_view library_version() { return ARCHMARK_VERSION; }

namespace {

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
}

bool bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '-';
}

class LineParser {
 public:
  LineParser(std::string_view s, int line) : s_(s), line_(line) {}

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool at_end_or_comment() {
    skip_ws();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string key() {
    std::string out;
    do {
      skip_ws();
      std::string part;
      if (pos_ < s_.size() && s_[pos_] == '"') {
        part = basic_string();
      } else {
        while (pos_ < s_.size() && bare_key_char(s_[pos_])) part += s_[pos_++];
        if (part.empty()) parse_fail(line_, "expected a key");
      }
      if (!out.empty()) out += '.';
      out += part;
    } while (eat('.'));
    return out;
  }

  TomlValue value() {
    skip_ws();
    if (pos_ >= s_.size()) parse_fail(line_, "missing value");
    const char c = s_[pos_];
    if (c == '"') return basic_string();
    if (c == '\'') {
      const auto end = s_.find('\'', pos_ + 1);
      if (end == std::string_view::npos) parse_fail(line_, "unterminated literal string");
      std::string out(s_.substr(pos_ + 1, end - pos_ - 1));
      pos_ = end + 1;
      return out;
    }
    if (c == '[' || c == '{') parse_fail(line_, "arrays and inline tables are not supported");
    std::string tok;
    while (pos_ < s_.size() && s_[pos_] != '#' && s_[pos_] != ' ' && s_[pos_] != '\t') tok += s_[pos_++];
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::string clean;
    for (std::size_t i = 0; i < tok.size(); ++i) {
      if (tok[i] != '_') {
        clean += tok[i];
      } else if (i == 0 || i + 1 == tok.size() || !std::isdigit(static_cast<unsigned char>(tok[i - 1])) ||
                 !std::isdigit(static_cast<unsigned char>(tok[i + 1]))) {
        parse_fail(line_, "misplaced underscore in '" + tok + "'");
      }
    }
    const bool is_float = clean.find_first_of(".eE") != std::string::npos;
    const char* first = clean.data() + (!clean.empty() && clean[0] == '+' ? 1 : 0);
    const char* last = clean.data() + clean.size();
    if (is_float) {
      double v = 0.0;
      auto [p, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || p != last || !std::isfinite(v)) parse_fail(line_, "bad number '" + tok + "'");
      return v;
    }
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last || first == last) parse_fail(line_, "bad value '" + tok + "'");
    return v;
  }

 private:
  std::string basic_string() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) break;
        const char e = s_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: parse_fail(line_, std::string("unsupported escape \\") + e);
        }
      }
      out += c;
    }
    if (pos_ >= s_.size()) parse_fail(line_, "unterminated string");
    ++pos_;
    return out;
  }

  std::string_view s_;
  int line_;
  std::size_t pos_ = 0;
};

}  // namespace

std::map<std::string, TomlValue> parse_toml(std::string_view text) {
  std::map<std::string, TomlValue> out;
  std::string table;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    start = end + 1;

    LineParser p(line, line_no);
    if (p.at_end_or_comment()) continue;
    if (p.eat('[')) {
      if (p.eat('[')) parse_fail(line_no, "arrays of tables are not supported");
      table = p.key();
      if (!p.eat(']')) parse_fail(line_no, "expected ']'");
    } else {
      const auto key = p.key();
      if (!p.eat('=')) parse_fail(line_no, "expected '='");
      const auto full = table.empty() ? key : table + "." + key;
      auto value = p.value();
      if (!out.emplace(full, std::move(value)).second) parse_fail(line_no, "duplicate key '" + full + "'");
    }
    if (!p.at_end_or_comment()) parse_fail(line_no, "unexpected trailing characters");
  }
  return out;
}

void PipelineConfig::derive_seeds() {
  network.seed = derive_seed(seed, "network");
  train.seed = derive_seed(seed, "train");
}

namespace {

struct Field {
  std::function<void(const TomlValue&)> set;
  std::function<std::string()> get;
};

std::string show(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, r.ptr);
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

[[noreturn]] void bad_type(const std::string& key, const char* want) {
  throw Error(ErrorCode::InvalidValue, "'" + key + "' must be " + want);
}

Field int_field(const std::string& key, int& target, int lo = 0) {
  return {[&target, key, lo](const TomlValue& v) {
            const auto* i = std::get_if<std::int64_t>(&v);
            if (!i) bad_type(key, "an integer");
            if (*i < lo || *i > 1'000'000'000) bad_type(key, ("an integer >= " + std::to_string(lo)).c_str());
            target = static_cast<int>(*i);
          },
          [&target] { return std::to_string(target); }};
}

Field u64_field(const std::string& key, std::uint64_t& target) {
  return {[&target, key](const TomlValue& v) {
            const auto* i = std::get_if<std::int64_t>(&v);
            if (!i || *i < 0) bad_type(key, "a non-negative integer");
            target = static_cast<std::uint64_t>(*i);
          },
          [&target] { return std::to_string(target); }};
}

Field real_field(const std::string& key, double& target) {
  return {[&target, key](const TomlValue& v) {
            if (const auto* d = std::get_if<double>(&v)) {
              target = *d;
            } else if (const auto* i = std::get_if<std::int64_t>(&v)) {
              target = static_cast<double>(*i);
            } else {
              bad_type(key, "a number");
            }
          },
          [&target] { return show(target); }};
}

Field bool_field(const std::string& key, bool& target) {
  return {[&target, key](const TomlValue& v) {
            const auto* b = std::get_if<bool>(&v);
            if (!b) bad_type(key, "a boolean");
            target = *b;
          },
          [&target] { return std::string(target ? "true" : "false"); }};
}

Field projection_field(const std::string& key, Projection& target) {
  return {[&target, key](const TomlValue& v) {
            const auto* s = std::get_if<std::string>(&v);
            if (!s || (*s != "orthographic" && *s != "perspective")) bad_type(key, "\"orthographic\" or \"perspective\"");
            target = *s == "orthographic" ? Projection::Orthographic : Projection::Perspective;
          },
          [&target] {
            return std::string(target == Projection::Orthographic ? "\"orthographic\"" : "\"perspective\"");
          }};
}

// Ordered schema: top-level keys first, then tables in a fixed order.
std::vector<std::pair<std::string, Field>> schema(PipelineConfig& c) {
  return {
      {"seed", u64_field("seed", c.seed)},
      {"views.count", int_field("views.count", c.views.n_views, 2)},
      {"views.image_size", int_field("views.image_size", c.views.camera.image_size, 8)},
      {"views.margin", real_field("views.margin", c.views.camera.margin)},
      {"views.camera", projection_field("views.camera", c.views.camera.projection)},
      {"views.visibility_epsilon_mm", real_field("views.visibility_epsilon_mm", c.heatmap.visibility_epsilon_mm)},
      {"heatmap.sigma_px", real_field("heatmap.sigma_px", c.heatmap.sigma_px)},
      {"heatmap.min_confidence", real_field("heatmap.min_confidence", c.heatmap.min_confidence)},
      {"network.base_feature_width", int_field("network.base_feature_width", c.network.base_feature_width, 1)},
      {"network.hourglass_depth", int_field("network.hourglass_depth", c.network.hourglass_depth, 1)},
      {"network.dropout_rate", real_field("network.dropout_rate", c.network.dropout_rate)},
      {"train.learning_rate", real_field("train.learning_rate", c.train.learning_rate)},
      {"train.batch_size", int_field("train.batch_size", c.train.batch_size, 1)},
      {"train.epochs", int_field("train.epochs", c.train.epochs, 0)},
      {"train.momentum", real_field("train.momentum", c.train.momentum)},
      {"train.max_steps", int_field("train.max_steps", c.train.max_steps, 0)},
      {"consensus.min_rays", int_field("consensus.min_rays", c.consensus.min_rays, 2)},
      {"consensus.outlier_threshold_mm", real_field("consensus.outlier_threshold_mm", c.consensus.outlier_threshold_mm)},
      {"consensus.max_reweight_iterations",
       int_field("consensus.max_reweight_iterations", c.consensus.max_reweight_iterations, 0)},
      {"consensus.snap_to_surface", bool_field("consensus.snap_to_surface", c.consensus.snap_to_surface)},
      {"consensus.condition_floor", real_field("consensus.condition_floor", c.consensus.condition_floor)},
      {"eval.volume_fraction", real_field("eval.volume_fraction", c.eval.volume_fraction)},
      {"eval.normalization_distance_mm",
       real_field("eval.normalization_distance_mm", c.eval.normalization_distance_mm)},
  };
}

void check_values(const PipelineConfig& c) {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw Error(ErrorCode::InvalidValue, msg);
  };
  require(c.views.camera.margin > 1.0, "views.margin must be > 1");
  require(c.heatmap.visibility_epsilon_mm > 0.0, "views.visibility_epsilon_mm must be > 0");
  require(c.heatmap.sigma_px > 0.0, "heatmap.sigma_px must be > 0");
  require(c.heatmap.min_confidence >= 0.0 && c.heatmap.min_confidence <= 1.0,
          "heatmap.min_confidence must be in [0, 1]");
  require(c.views.camera.image_size % (1 << c.network.hourglass_depth) == 0,
          "views.image_size must be divisible by 2^network.hourglass_depth");
  require(c.train.learning_rate > 0.0, "train.learning_rate must be > 0");
  require(c.train.momentum >= 0.0 && c.train.momentum < 1.0, "train.momentum must be in [0, 1)");
  require(c.eval.volume_fraction > 0.0, "eval.volume_fraction must be > 0");
  require(c.eval.normalization_distance_mm >= 0.0, "eval.normalization_distance_mm must be >= 0");
  try {
    validate(c.network);
    validate(c.consensus);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidValue, e.what());
  }
}

}  // namespace

PipelineConfig parse_config(std::string_view text) {
  PipelineConfig c;
  const auto values = parse_toml(text);
  auto fields = schema(c);
  for (const auto& [key, value] : values) {
    auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& f) { return f.first == key; });
    if (it == fields.end()) throw Error(ErrorCode::UnknownKey, "unknown config key '" + key + "'");
    it->second.set(value);
  }
  check_values(c);
  c.derive_seeds();
  return c;
}

PipelineConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

std::string config_to_toml(const PipelineConfig& config) {
  PipelineConfig copy = config;
  std::string out;
  std::string table;
  for (const auto& [key, field] : schema(copy)) {
    const auto dot = key.find('.');
    const std::string t = dot == std::string::npos ? "" : key.substr(0, dot);
    if (t != table) {
      out += "\n[" + t + "]\n";
      table = t;
    }
    out += key.substr(dot == std::string::npos ? 0 : dot + 1) + " = " + field.get() + "\n";
  }
  return out;
}

std::string config_hash(const PipelineConfig& config) {
  const auto h = derive_seed(0, config_to_toml(config));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace archmark
