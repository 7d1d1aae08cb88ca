#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <sfd/acwe.hpp>
#include <sfd/image.hpp>
#include <sfd/synth.hpp>

#include "support/oracles.hpp"
#include "support/test_util.hpp"

using sfd::AcweConfig;
using sfd::AcweResult;
using sfd::BinaryMask;
using sfd::Error;
using sfd::GrayImage;
using sfd::InitScheme;
using sfd::LevelSetField;

namespace {

/// Dark disk on bright background, exact truth = the disk.
struct TwoRegion {
  GrayImage image;
  BinaryMask disk;
};

TwoRegion two_region_case(int size, double disk_level, double bg_level,
                          double noise_sigma, uint64_t seed) {
  sfd::SynthSpec spec;
  spec.size = size;
  spec.seed = seed;
  spec.n_filaments = 0;
  spec.n_patches = 0;
  spec.disk_level = disk_level;
  spec.background_level = bg_level;
  spec.filament_level = disk_level - 1.0;
  spec.patch_level = disk_level + 1.0;
  spec.noise_sigma = noise_sigma;
  sfd::SynthCase c = sfd::generate(spec);
  return {std::move(c.image), std::move(c.disk)};
}

}  // namespace

// ---------------------------------------------------------------------------
// init_level_set
// ---------------------------------------------------------------------------

TEST_CASE("checkerboard init matches its closed form") {
  const LevelSetField f = sfd::init_level_set(16, 16, InitScheme::Checkerboard);
  CHECK(f.at(0, 0) == 0.0);
  const double expect = std::sin(3 * std::numbers::pi / 5) * std::sin(7 * std::numbers::pi / 5);
  CHECK(f.at(3, 7) == Catch::Approx(expect).epsilon(1e-15));
  CHECK(expect == Catch::Approx(-0.9045084971874737).margin(1e-12));
}

TEST_CASE("circle init is a signed distance, positive inside") {
  const LevelSetField f = sfd::init_level_set(100, 100, InitScheme::Circle);
  CHECK(f.at(50, 50) == Catch::Approx(100.0 / 3.0).epsilon(1e-12));
  CHECK(f.at(0, 0) == Catch::Approx(100.0 / 3.0 - std::hypot(50.0, 50.0)).epsilon(1e-12));
  CHECK(f.at(0, 0) < 0.0);
}

TEST_CASE("empty roi forces the whole field to -1") {
  const BinaryMask roi(12, 12);  // all false
  const LevelSetField f = sfd::init_level_set(12, 12, InitScheme::Checkerboard, &roi);
  for (double v : f.phi) REQUIRE(v == -1.0);
  CHECK(f.inside_mask().count() == 0);
}

// ---------------------------------------------------------------------------
// region_means
// ---------------------------------------------------------------------------

TEST_CASE("region means of an exact partition") {
  GrayImage img(8, 8);
  LevelSetField phi(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      img.at(x, y) = x < 4 ? 0.0 : 1.0;
      phi.at(x, y) = x < 4 ? -1.0 : 1.0;
    }
  const auto [c1, c2] = sfd::region_means(img, phi);
  CHECK(c1 == 1.0);
  CHECK(c2 == 0.0);
}

TEST_CASE("empty region falls back to the global mean") {
  testutil::Rng rng(11);
  const GrayImage img = testutil::random_image(rng, 6, 6);
  LevelSetField phi(6, 6, 1.0);  // everything inside
  const auto [c1, c2] = sfd::region_means(img, phi);
  CHECK(c1 == Catch::Approx(img.mean()).epsilon(1e-12));
  CHECK(c2 == Catch::Approx(img.mean()).epsilon(1e-12));
}

TEST_CASE("region means agree with the two-pass oracle") {
  testutil::Rng rng(12);
  for (int rep = 0; rep < 20; ++rep) {
    const GrayImage img = testutil::random_image(rng, 8, 8);
    LevelSetField phi(8, 8);
    for (double& v : phi.phi) v = rng.uniform(-2.0, 2.0);
    const auto [c1, c2] = sfd::region_means(img, phi);
    const auto [o1, o2] = oracle::region_means_two_pass(img, phi);
    CHECK(c1 == Catch::Approx(o1).margin(1e-12));
    CHECK(c2 == Catch::Approx(o2).margin(1e-12));
  }
}

// ---------------------------------------------------------------------------
// energy
// ---------------------------------------------------------------------------

TEST_CASE("energy vanishes without length/area terms on constant images") {
  AcweConfig cfg;
  cfg.mu = 0.0;
  cfg.nu = 0.0;
  const GrayImage img(10, 10, 0.5);  // dyadic value: region means are exact
  const LevelSetField phi = sfd::init_level_set(10, 10, InitScheme::Checkerboard);
  CHECK(sfd::energy(img, phi, cfg) == 0.0);
}

TEST_CASE("energy vanishes on a perfectly partitioned two-level image") {
  AcweConfig cfg;
  cfg.mu = 0.0;
  cfg.nu = 0.0;
  GrayImage img(8, 8);
  LevelSetField phi(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      img.at(x, y) = y < 4 ? 0.25 : 0.75;
      phi.at(x, y) = y < 4 ? 3.0 : -3.0;
    }
  CHECK(sfd::energy(img, phi, cfg) == 0.0);
}

TEST_CASE("energy matches the brute-force oracle") {
  testutil::Rng rng(13);
  for (int rep = 0; rep < 30; ++rep) {
    const int w = rng.uniform_int(4, 16), h = rng.uniform_int(4, 16);
    const GrayImage img = testutil::random_image(rng, w, h, 0.0, 1.0);
    LevelSetField phi(w, h);
    for (double& v : phi.phi) v = rng.uniform(-3.0, 3.0);
    AcweConfig cfg;
    cfg.mu = rng.uniform(0.0, 1.0);
    cfg.nu = rng.uniform(0.0, 0.5);
    cfg.lambda1 = rng.uniform(0.1, 2.0);
    cfg.lambda2 = rng.uniform(0.1, 2.0);
    cfg.epsilon = rng.uniform(0.5, 2.0);
    const double got = sfd::energy(img, phi, cfg);
    const double expect = oracle::energy_brute(img, phi, cfg);
    REQUIRE(got == Catch::Approx(expect).epsilon(1e-9));
  }
}

// ---------------------------------------------------------------------------
// evolve
// ---------------------------------------------------------------------------

TEST_CASE("evolve recovers a two-region image") {
  for (uint64_t seed : {21ull, 22ull, 23ull}) {
    const TwoRegion tr = two_region_case(64, 51.0, 204.0, 4.0, seed);
    const AcweResult res = sfd::evolve(tr.image, AcweConfig{});
    const BinaryMask fil = sfd::filament_mask(res, tr.image);

    size_t agree = 0, disk_px = 0;
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x) {
        if (tr.disk.get(x, y)) {
          ++disk_px;
          agree += fil.get(x, y);
        }
      }
    CHECK(static_cast<double>(agree) / disk_px >= 0.99);
    CHECK(res.energy_trace.back() <= res.energy_trace.front());
    CHECK(res.energy_trace.size() == static_cast<size_t>(res.iterations_run) + 1);
  }
}

TEST_CASE("constant image with zero weights leaves phi frozen") {
  AcweConfig cfg;
  cfg.mu = 0.0;
  cfg.nu = 0.0;
  cfg.max_iters = 10;
  const GrayImage img(16, 16, 120.0);
  const AcweResult res = sfd::evolve(img, cfg);
  const LevelSetField init = sfd::init_level_set(16, 16, cfg.init);
  CHECK(res.phi.phi == init.phi);
  CHECK(res.c1 == res.c2);
}

TEST_CASE("constant image under defaults stays degenerate but finite") {
  const GrayImage img(16, 16, 120.0);
  AcweConfig cfg;
  cfg.max_iters = 50;
  const AcweResult res = sfd::evolve(img, cfg);
  CHECK(res.c1 == res.c2);
  for (double v : res.phi.phi) REQUIRE(std::isfinite(v));
}

TEST_CASE("a huge tolerance stops after exactly one iteration") {
  testutil::Rng rng(14);
  const GrayImage img = testutil::random_image(rng, 12, 12);
  AcweConfig cfg;
  cfg.tol = 1e9;
  const AcweResult res = sfd::evolve(img, cfg);
  CHECK(res.iterations_run == 1);
  CHECK(res.converged);
  CHECK(res.energy_trace.size() == 2);
}

TEST_CASE("per-iteration c1/c2 equal the region means of the pre-update field") {
  const TwoRegion tr = two_region_case(32, 60.0, 200.0, 3.0, 31);
  AcweConfig cfg;
  cfg.max_iters = 25;

  GrayImage norm(32, 32);
  const double lo = tr.image.min_value(), hi = tr.image.max_value();
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) norm.at(x, y) = (tr.image.at(x, y) - lo) / (hi - lo);

  int checked = 0;
  sfd::evolve(tr.image, cfg, nullptr, [&](const sfd::EvolveIterationInfo& info) {
    const auto [o1, o2] = oracle::region_means_two_pass(norm, info.phi_before);
    REQUIRE(info.c1 == Catch::Approx(o1).margin(1e-9));
    REQUIRE(info.c2 == Catch::Approx(o2).margin(1e-9));
    ++checked;
  });
  CHECK(checked == 25);
}

TEST_CASE("evolve is deterministic") {
  const TwoRegion tr = two_region_case(48, 51.0, 204.0, 5.0, 77);
  AcweConfig cfg;
  cfg.max_iters = 60;
  const AcweResult a = sfd::evolve(tr.image, cfg);
  const AcweResult b = sfd::evolve(tr.image, cfg);
  CHECK(a.phi.phi == b.phi.phi);
  CHECK(a.mask == b.mask);
  CHECK(a.energy_trace == b.energy_trace);
}

TEST_CASE("filament mask is invariant under affine intensity maps") {
  const TwoRegion tr = two_region_case(48, 51.0, 204.0, 4.0, 78);
  GrayImage mapped(48, 48);
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 48; ++x) mapped.at(x, y) = 2.0 * tr.image.at(x, y) + 10.0;

  AcweConfig cfg;
  cfg.max_iters = 120;
  const BinaryMask fa = sfd::filament_mask(sfd::evolve(tr.image, cfg), tr.image);
  const BinaryMask fb = sfd::filament_mask(sfd::evolve(mapped, cfg), mapped);
  CHECK(fa == fb);
}

TEST_CASE("swapping foreground/background complements the filament mask") {
  // symmetric config, exact two-level image, no normalization: the phi
  // trajectory is identical for both images and only the darker-region rule
  // flips
  GrayImage img(40, 40, 1.0);
  for (int y = 12; y < 28; ++y)
    for (int x = 10; x < 30; ++x) img.at(x, y) = 0.0;
  GrayImage swapped(40, 40);
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 40; ++x) swapped.at(x, y) = 1.0 - img.at(x, y);

  AcweConfig cfg;
  cfg.mu = 0.0;
  cfg.nu = 0.0;
  cfg.lambda1 = 1.0;
  cfg.lambda2 = 1.0;
  cfg.normalize_input = false;
  cfg.max_iters = 200;

  const AcweResult ra = sfd::evolve(img, cfg);
  const AcweResult rb = sfd::evolve(swapped, cfg);
  CHECK(ra.mask == rb.mask);  // phi-level result does not depend on the swap
  const BinaryMask fa = sfd::filament_mask(ra, img);
  const BinaryMask fb = sfd::filament_mask(rb, swapped);
  CHECK(fb == fa.complement());
}

TEST_CASE("roi confines the inside region") {
  const TwoRegion tr = two_region_case(48, 51.0, 204.0, 3.0, 79);
  BinaryMask roi(48, 48);
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 24; ++x) roi.set(x, y, true);
  AcweConfig cfg;
  cfg.max_iters = 80;
  const AcweResult res = sfd::evolve(tr.image, cfg, &roi);
  for (int y = 0; y < 48; ++y)
    for (int x = 24; x < 48; ++x) REQUIRE_FALSE(res.mask.get(x, y));
}

TEST_CASE("evolve rejects non-finite input") {
  GrayImage img(8, 8, 1.0);
  img.at(3, 3) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(sfd::evolve(img, AcweConfig{}), Error);
}

// ---------------------------------------------------------------------------
// filament_mask
// ---------------------------------------------------------------------------

TEST_CASE("filament mask picks the darker region") {
  GrayImage img(8, 8);
  AcweResult res;
  res.mask = BinaryMask(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      img.at(x, y) = x < 4 ? 0.2 : 0.8;
      res.mask.set(x, y, x < 4);  // inside = dark half
    }
  CHECK(sfd::filament_mask(res, img) == res.mask);

  AcweResult flipped;
  flipped.mask = res.mask.complement();  // inside = bright half
  CHECK(sfd::filament_mask(flipped, img) == res.mask);

  const GrayImage flat(8, 8, 0.5);
  CHECK(sfd::filament_mask(res, flat) == res.mask);  // tie -> inside
}
