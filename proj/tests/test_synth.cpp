#include <catch2/catch_amalgamated.hpp>

#include <set>

#include <sfd/image.hpp>
#include <sfd/postprocess.hpp>
#include <sfd/preprocess.hpp>
#include <sfd/synth.hpp>

#include "support/test_util.hpp"

using sfd::BinaryMask;
using sfd::Error;
using sfd::SynthCase;
using sfd::SynthSpec;

TEST_CASE("noiseless featureless case has exactly two intensity levels") {
  SynthSpec spec;
  spec.size = 96;
  spec.noise_sigma = 0.0;
  spec.n_filaments = 0;
  spec.n_patches = 0;
  const SynthCase c = sfd::generate(spec);
  std::set<double> levels(c.image.data().begin(), c.image.data().end());
  CHECK(levels == std::set<double>{spec.background_level, spec.disk_level});
  CHECK(c.truth.count() == 0);
  CHECK(c.patches.count() == 0);
}

TEST_CASE("filament count equals the number of truth components") {
  for (int n : {1, 3, 6}) {
    SynthSpec spec;
    spec.size = 256;
    spec.seed = 100 + n;
    spec.noise_sigma = 0.0;
    spec.n_filaments = n;
    spec.n_patches = 0;
    const SynthCase c = sfd::generate(spec);
    const auto labels = sfd::label_components(c.truth);
    CHECK(labels.num_components == n);
  }
}

TEST_CASE("identical specs generate bit-identical cases") {
  SynthSpec spec;
  spec.size = 128;
  spec.seed = 9;
  spec.n_filaments = 3;
  spec.n_patches = 2;
  const SynthCase a = sfd::generate(spec);
  const SynthCase b = sfd::generate(spec);
  CHECK(a.image.data() == b.image.data());
  CHECK(a.truth == b.truth);
  CHECK(a.disk == b.disk);
  CHECK(a.patches == b.patches);
}

TEST_CASE("masks are nested and disjoint as documented") {
  SynthSpec spec;
  spec.size = 200;
  spec.seed = 5;
  spec.n_filaments = 4;
  spec.n_patches = 3;
  const SynthCase c = sfd::generate(spec);
  REQUIRE(c.truth.count() > 0);
  REQUIRE(c.patches.count() > 0);
  for (int y = 0; y < spec.size; ++y)
    for (int x = 0; x < spec.size; ++x) {
      if (c.truth.get(x, y)) REQUIRE(c.disk.get(x, y));
      if (c.patches.get(x, y)) REQUIRE(c.disk.get(x, y));
      REQUIRE_FALSE(c.truth.get(x, y) && c.patches.get(x, y));
    }
}

TEST_CASE("filaments are darker than the rest of the disk by a wide margin") {
  SynthSpec spec;
  spec.size = 256;
  spec.seed = 17;
  spec.n_filaments = 5;
  spec.n_patches = 1;
  spec.noise_sigma = 5.0;
  const SynthCase c = sfd::generate(spec);

  double truth_sum = 0.0, rest_sum = 0.0;
  size_t truth_n = 0, rest_n = 0;
  for (int y = 0; y < spec.size; ++y)
    for (int x = 0; x < spec.size; ++x) {
      if (!c.disk.get(x, y)) continue;
      if (c.truth.get(x, y)) {
        truth_sum += c.image.at(x, y);
        ++truth_n;
      } else {
        rest_sum += c.image.at(x, y);
        ++rest_n;
      }
    }
  const double gap = rest_sum / rest_n - truth_sum / truth_n;
  CHECK(gap >= (spec.disk_level - spec.filament_level) / 2.0);
}

TEST_CASE("white patch mask recovers at least 90% of patch pixels") {
  SynthSpec spec;
  spec.size = 256;
  spec.seed = 23;
  spec.n_filaments = 3;
  spec.n_patches = 3;
  spec.noise_sigma = 5.0;
  const SynthCase c = sfd::generate(spec);

  sfd::InpaintConfig cfg;
  cfg.white_patch_percentile = 0.99;
  const BinaryMask mask = sfd::build_white_patch_mask(c.image, cfg, &c.disk);

  size_t covered = 0;
  for (int y = 0; y < spec.size; ++y)
    for (int x = 0; x < spec.size; ++x)
      if (c.patches.get(x, y) && mask.get(x, y)) ++covered;
  CHECK(static_cast<double>(covered) >= 0.9 * static_cast<double>(c.patches.count()));
}

TEST_CASE("degenerate specs are rejected") {
  SynthSpec spec;
  spec.size = 32;
  CHECK_THROWS_AS(sfd::generate(spec), Error);

  spec = SynthSpec{};
  spec.filament_level = spec.disk_level + 1;
  CHECK_THROWS_AS(sfd::generate(spec), Error);

  spec = SynthSpec{};
  spec.disk_radius_fraction = 0.7;
  CHECK_THROWS_AS(sfd::generate(spec), Error);
}
