#include <catch2/catch_amalgamated.hpp>

#include <sfd/image.hpp>
#include <sfd/postprocess.hpp>

#include "support/oracles.hpp"
#include "support/test_util.hpp"

using sfd::BinaryMask;
using sfd::ComponentLabels;
using sfd::PostprocessConfig;

namespace {

BinaryMask with_block(BinaryMask m, int x0, int y0, int w, int h) {
  for (int y = y0; y < y0 + h; ++y)
    for (int x = x0; x < x0 + w; ++x) m.set(x, y, true);
  return m;
}

}  // namespace

TEST_CASE("empty mask has no components") {
  const ComponentLabels cl = sfd::label_components(BinaryMask(10, 10));
  CHECK(cl.num_components == 0);
  CHECK(cl.areas.empty());
}

TEST_CASE("two separated blocks get two labels in scan order") {
  BinaryMask m(12, 8);
  m = with_block(m, 1, 2, 3, 3);
  m = with_block(m, 7, 2, 3, 3);
  const ComponentLabels cl = sfd::label_components(m);
  REQUIRE(cl.num_components == 2);
  CHECK(cl.areas[0] == 9);
  CHECK(cl.areas[1] == 9);
  CHECK(cl.label_at(1, 2) == 1);  // first encountered in row-major order
  CHECK(cl.label_at(7, 2) == 2);
}

TEST_CASE("diagonal touch merges under 8-connectivity") {
  BinaryMask m(10, 10);
  m = with_block(m, 1, 1, 3, 3);
  m = with_block(m, 4, 4, 3, 3);  // corners touch at (3,3)-(4,4)
  const ComponentLabels cl = sfd::label_components(m);
  CHECK(cl.num_components == 1);
  CHECK(cl.areas[0] == 18);
}

TEST_CASE("labeling agrees with the flood-fill oracle") {
  testutil::Rng rng(21);
  for (int rep = 0; rep < 200; ++rep) {
    const int w = rng.uniform_int(3, 32), h = rng.uniform_int(3, 32);
    const BinaryMask m = testutil::random_mask(rng, w, h, rng.uniform(0.2, 0.8));
    const ComponentLabels cl = sfd::label_components(m);
    int oracle_n = 0;
    const std::vector<int> expect = oracle::flood_labels(m, &oracle_n);
    REQUIRE(cl.num_components == oracle_n);
    REQUIRE(cl.labels == expect);  // both use first-encounter order
    size_t total = 0;
    for (size_t a : cl.areas) total += a;
    REQUIRE(total == m.count());
  }
}

TEST_CASE("area filter keeps only components above threshold") {
  BinaryMask m(20, 10);
  m = with_block(m, 1, 1, 5, 1);    // area 5
  m = with_block(m, 8, 1, 10, 10 - 2);  // area 80
  PostprocessConfig cfg;
  cfg.min_area = 10;
  const BinaryMask out = sfd::filter_by_area(m, cfg);
  CHECK_FALSE(out.get(1, 1));
  CHECK(out.get(8, 1));
  CHECK(out.count() == 80);
}

TEST_CASE("min_area 0 is the identity") {
  testutil::Rng rng(22);
  const BinaryMask m = testutil::random_mask(rng, 16, 16, 0.4);
  CHECK(sfd::filter_by_area(m, PostprocessConfig{0}) == m);
}

TEST_CASE("min_area above the pixel count empties the mask") {
  testutil::Rng rng(23);
  const BinaryMask m = testutil::random_mask(rng, 16, 16, 0.4);
  PostprocessConfig cfg;
  cfg.min_area = m.count() + 1;
  CHECK(sfd::filter_by_area(m, cfg).count() == 0);
}

TEST_CASE("area filter is idempotent, antitone and non-expanding") {
  testutil::Rng rng(24);
  for (int rep = 0; rep < 200; ++rep) {
    const int w = rng.uniform_int(3, 32), h = rng.uniform_int(3, 32);
    const BinaryMask m = testutil::random_mask(rng, w, h, rng.uniform(0.2, 0.8));
    const size_t a = rng.uniform_int(0, 12);
    const size_t b = a + rng.uniform_int(1, 12);

    const BinaryMask fa = sfd::filter_by_area(m, PostprocessConfig{a});
    const BinaryMask fb = sfd::filter_by_area(m, PostprocessConfig{b});

    REQUIRE(sfd::filter_by_area(fa, PostprocessConfig{a}) == fa);  // idempotent
    for (size_t i = 0; i < m.size(); ++i) {
      REQUIRE((!fb.data()[i] || fa.data()[i]));  // antitone: fb subset of fa
      REQUIRE((!fa.data()[i] || m.data()[i]));   // output subset of input
    }
  }
}

TEST_CASE("component stats report area, bbox and centroid") {
  BinaryMask m(10, 10);
  m = with_block(m, 2, 3, 4, 2);  // 4x2 block
  const auto stats = sfd::component_stats(sfd::label_components(m));
  REQUIRE(stats.size() == 1);
  CHECK(stats[0].label == 1);
  CHECK(stats[0].area == 8);
  CHECK(stats[0].min_x == 2);
  CHECK(stats[0].max_x == 5);
  CHECK(stats[0].min_y == 3);
  CHECK(stats[0].max_y == 4);
  CHECK(stats[0].centroid_x == Catch::Approx(3.5));
  CHECK(stats[0].centroid_y == Catch::Approx(3.5));
}
