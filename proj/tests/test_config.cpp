#include "archmark/config.hpp"
#include "archmark/error.hpp"
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

}  // namespace

TEST_CASE("empty config gives the defaults") {
  const auto c = parse_config("");
  CHECK(c.views.n_views == ViewConfig{}.n_views);
  CHECK(c.network.base_feature_width == NetworkConfig{}.base_feature_width);
  CHECK(config_hash(c) == config_hash(parse_config("# nothing here\n")));
}

TEST_CASE("keys are read") {
  const auto c = parse_config("seed = 5\n[views]\ncount = 12\nimage_size = 64\n");
  CHECK(c.seed == 5);
  CHECK(c.views.n_views == 12);
  CHECK(c.views.camera.image_size == 64);
  CHECK(parse_config("views.count = 12").views.n_views == 12);
  CHECK(config_hash(c) != config_hash(parse_config("")));
}

TEST_CASE("the echoed config parses back to the same configuration") {
  const auto c = parse_config("seed = 9\n[views]\ncount = 8\n");
  const auto text = config_to_toml(c);
  CHECK(config_to_toml(parse_config(text)) == text);
  CHECK(config_hash(parse_config(text)) == config_hash(c));
}

TEST_CASE("bad configs") {
  CHECK(code_of([] { parse_config("[views]\ncuont = 12\n"); }) == ErrorCode::UnknownKey);
  CHECK(code_of([] { parse_config("views.count = \"many\""); }) == ErrorCode::InvalidValue);
  CHECK(code_of([] { parse_config("views.count = 1"); }) == ErrorCode::InvalidValue);
  CHECK(code_of([] { parse_config("views.count = "); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_config("[views\n"); }) == ErrorCode::ParseError);
}
