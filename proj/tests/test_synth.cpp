#include <cmath>

#include "archmark/consensus.hpp"
#include "archmark/error.hpp"
#include "archmark/synth_arch.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace archmark;

TEST_CASE("default arch: open shell, 16 landmarks on the surface, volume in the design range") {
  const auto arch = generate_arch(ArchParams{});
  const auto m = mesh_metrics(arch.mesh);
  CHECK_FALSE(m.watertight);
  CHECK(arch.landmarks.present_count() == 16);
  for (int i = 1; i <= 16; ++i) {
    CHECK(oracle::linear_scan_snap(arch.mesh, arch.landmarks.at(i).position).distance <= 1e-6);
  }
  CHECK(m.volume > 20000.0);
  CHECK(m.volume < 31000.0);
}

TEST_CASE("generation is deterministic") {
  ArchParams p;
  p.random_seed = 42;
  const auto a = generate_arch(p), b = generate_arch(p);
  CHECK(a.mesh.vertices == b.mesh.vertices);
  CHECK(a.mesh.faces == b.mesh.faces);
  CHECK(a.landmarks == b.landmarks);
}

TEST_CASE("closed cleft makes the facing cleft points coincide") {
  ArchParams p;
  p.cleft_gap_width = 0.0;
  const auto arch = generate_arch(p);
  const auto& L = arch.landmarks;
  CHECK((L.at(5).position - L.at(9).position).norm() <= 1e-6);
  CHECK((L.at(3).position - L.at(8).position).norm() <= 1e-6);
}

TEST_CASE("inter-tuberosity distance follows arch_width") {
  for (double w : {36.0, 40.0, 44.0}) {
    ArchParams p;
    p.arch_width = w;
    const auto arch = generate_arch(p);
    const double d = (arch.landmarks.at(15).position - arch.landmarks.at(16).position).norm();
    CHECK(std::abs(d - w) <= 0.01 * w);
  }
}

TEST_CASE("volume grows with ridge height") {
  double last = 0.0;
  for (double h : {12.0, 14.0, 16.0, 18.0, 20.0}) {
    ArchParams p;
    p.ridge_height = h;
    const double v = mesh_metrics(generate_arch(p).mesh).volume;
    CHECK(v > last);
    last = v;
  }
}

TEST_CASE("population sampling") {
  const auto pop = sample_population(90, PopulationSpec{}, 3);
  int pre = 0;
  for (const auto& s : pop) pre += s.tag == TreatmentTag::Pre;
  CHECK(pre == 45);
  CHECK(pop.size() == 90);

  const PopulationSpec spec;
  const auto one = sample_population(1, spec, 9);
  REQUIRE(one.size() == 1);
  CHECK(one[0].params.arch_width >= spec.arch_width.min);
  CHECK(one[0].params.arch_width <= spec.arch_width.max);
  CHECK(one[0].params.ridge_height >= spec.ridge_height.min);
  CHECK(one[0].params.ridge_height <= spec.ridge_height.max);

  PopulationSpec bad;
  bad.arch_width = {50.0, 40.0};
  CHECK_THROWS_AS(sample_population(3, bad, 1), Error);
  try {
    sample_population(3, bad, 1);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidRange);
  }
}

TEST_CASE("invalid arch parameters are rejected") {
  ArchParams p;
  p.ridge_height = -1.0;
  CHECK_THROWS_AS(generate_arch(p), Error);
}
