#ifndef SFD_SYNTH_HPP
#define SFD_SYNTH_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "sfd/error.hpp"
#include "sfd/image.hpp"

namespace sfd {

/// Recipe for a synthetic full-disk image with exact ground truth.
struct SynthSpec {
  int size = 512;
  double disk_radius_fraction = 0.45;
  double background_level = 10.0;
  double disk_level = 180.0;
  double filament_level = 60.0;
  double patch_level = 250.0;
  int n_filaments = 4;
  int n_patches = 2;
  double noise_sigma = 3.0;
  uint64_t seed = 1;

  void validate() const {
    if (size < 64) throw Error(ErrorCode::InvalidArgument, "synth size must be >= 64");
    if (!(disk_radius_fraction > 0.0 && disk_radius_fraction < 0.5))
      throw Error(ErrorCode::InvalidArgument, "disk_radius_fraction must be in (0, 0.5)");
    if (!(filament_level < disk_level && disk_level < patch_level))
      throw Error(ErrorCode::InvalidArgument,
                  "levels must satisfy filament < disk < patch");
    if (n_filaments < 0 || n_patches < 0)
      throw Error(ErrorCode::InvalidArgument, "feature counts must be >= 0");
    if (noise_sigma < 0.0)
      throw Error(ErrorCode::InvalidArgument, "noise_sigma must be >= 0");
    if ((n_filaments > 0 || n_patches > 0) && disk_radius_fraction * size < 16.0)
      throw Error(ErrorCode::InvalidArgument,
                  "disk too small to place filaments/patches");
  }
};

/// Generated image plus the noiseless geometry masks it was built from.
struct SynthCase {
  GrayImage image;
  BinaryMask truth;    // filament pixels
  BinaryMask disk;
  BinaryMask patches;
};

namespace detail {

/// Deterministic draws on top of the standard-pinned mt19937_64 stream.
/// Distributions are written out explicitly (std:: distributions are
/// implementation-defined, which would break cross-platform fixtures).
class SynthRng {
public:
  explicit SynthRng(uint64_t seed) : engine_(seed) {}

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(uniform01() * (hi - lo + 1.0));
  }

  /// Irwin-Hall(12) approximation to N(0,1): a sum of uniforms needs no
  /// transcendental calls, so byte-identical fixtures survive libm changes.
  double gaussian() {
    double s = 0.0;
    for (int i = 0; i < 12; ++i) s += uniform01();
    return s - 6.0;
  }

private:
  std::mt19937_64 engine_;
};

struct StrokePixels {
  std::vector<std::pair<int, int>> pixels;
};

/// Chebyshev-dilates pts by `margin` into `out` (bounds-clipped).
inline void stamp_dilated(const std::vector<std::pair<int, int>>& pts, int margin,
                          BinaryMask& out) {
  for (const auto& [px, py] : pts)
    for (int dy = -margin; dy <= margin; ++dy)
      for (int dx = -margin; dx <= margin; ++dx) {
        const int x = px + dx, y = py + dy;
        if (x >= 0 && y >= 0 && x < out.width() && y < out.height()) out.set(x, y, true);
      }
}

inline bool overlaps(const std::vector<std::pair<int, int>>& pts, int margin,
                     const BinaryMask& occupied) {
  for (const auto& [px, py] : pts)
    for (int dy = -margin; dy <= margin; ++dy)
      for (int dx = -margin; dx <= margin; ++dx) {
        const int x = px + dx, y = py + dy;
        if (x >= 0 && y >= 0 && x < occupied.width() && y < occupied.height() &&
            occupied.get(x, y))
          return true;
      }
  return false;
}

/// Walks a curved polyline and stamps a round brush along it. All stamped
/// pixels stay within max_r of the disk center.
inline StrokePixels draw_stroke(SynthRng& rng, int grid, double cx, double cy,
                                double max_r, double length, int thickness) {
  const double brush = thickness / 2.0;
  const double keep_r = max_r - brush - 1.0;

  const double rr = keep_r * 0.8 * std::sqrt(rng.uniform01());
  const double th = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
  double px = cx + rr * std::cos(th);
  double py = cy + rr * std::sin(th);

  double dir = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
  StrokePixels out;
  BinaryMask seen(grid, grid);

  const double step = 0.5;
  const int n_steps = static_cast<int>(length / step);
  for (int s = 0; s < n_steps; ++s) {
    // stamp the brush at the current point
    const int ix0 = static_cast<int>(std::floor(px - brush)) - 1;
    const int iy0 = static_cast<int>(std::floor(py - brush)) - 1;
    const int ix1 = static_cast<int>(std::ceil(px + brush)) + 1;
    const int iy1 = static_cast<int>(std::ceil(py + brush)) + 1;
    for (int y = iy0; y <= iy1; ++y)
      for (int x = ix0; x <= ix1; ++x) {
        if (x < 0 || y < 0 || x >= seen.width() || y >= seen.height()) continue;
        const double dx = x - px, dy = y - py;
        if (dx * dx + dy * dy <= brush * brush && !seen.get(x, y)) {
          seen.set(x, y, true);
          out.pixels.emplace_back(x, y);
        }
      }

    dir += rng.gaussian() * 0.12;
    double nx = px + step * std::cos(dir);
    double ny = py + step * std::sin(dir);
    // steer back toward the center before drifting out of the safe band
    const double dcx = nx - cx, dcy = ny - cy;
    if (std::sqrt(dcx * dcx + dcy * dcy) > keep_r) {
      dir = std::atan2(cy - py, cx - px) + rng.uniform(-0.5, 0.5);
      nx = px + step * std::cos(dir);
      ny = py + step * std::sin(dir);
    }
    px = nx;
    py = ny;
  }
  return out;
}

}  // namespace detail

/// Renders a deterministic synthetic case: a bright disk on dark background
/// carrying dark elongated filament strokes and small bright patches, all
/// strictly inside the disk and mutually disjoint, plus seeded Gaussian
/// noise. Masks describe the noiseless geometry. Identical specs produce
/// bit-identical cases.
inline SynthCase generate(const SynthSpec& spec) {
  spec.validate();
  detail::SynthRng rng(spec.seed);

  const int n = spec.size;
  const double c = (n - 1) / 2.0;
  const double radius = spec.disk_radius_fraction * n;

  BinaryMask disk(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const double dx = x - c, dy = y - c;
      disk.set(x, y, dx * dx + dy * dy <= radius * radius);
    }

  BinaryMask truth(n, n);
  BinaryMask occupied(n, n);  // stroke/patch footprints with safety margin

  for (int f = 0; f < spec.n_filaments; ++f) {
    double length = rng.uniform(0.5, 1.0) * radius;
    const int thickness = rng.uniform_int(2, 4);
    bool placed = false;
    for (int attempt = 0; attempt < 300 && !placed; ++attempt) {
      const auto stroke = detail::draw_stroke(rng, n, c, c, radius * 0.88, length, thickness);
      if (stroke.pixels.empty()) continue;
      if (detail::overlaps(stroke.pixels, 2, occupied)) {
        if (attempt % 40 == 39) length = std::max(8.0, length * 0.75);
        continue;
      }
      for (const auto& [x, y] : stroke.pixels) truth.set(x, y, true);
      detail::stamp_dilated(stroke.pixels, 2, occupied);
      placed = true;
    }
    if (!placed)
      throw Error(ErrorCode::InvalidArgument,
                  "could not place all filaments; disk too crowded");
  }

  BinaryMask patches(n, n);
  for (int p = 0; p < spec.n_patches; ++p) {
    bool placed = false;
    for (int attempt = 0; attempt < 300 && !placed; ++attempt) {
      const double pr = rng.uniform(4.0, 9.0);
      const double rr = (radius * 0.8 - pr) * std::sqrt(rng.uniform01());
      const double th = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
      const double pcx = c + rr * std::cos(th);
      const double pcy = c + rr * std::sin(th);

      std::vector<std::pair<int, int>> blob;
      for (int y = static_cast<int>(pcy - pr) - 1; y <= static_cast<int>(pcy + pr) + 1; ++y)
        for (int x = static_cast<int>(pcx - pr) - 1; x <= static_cast<int>(pcx + pr) + 1; ++x) {
          if (x < 0 || y < 0 || x >= n || y >= n) continue;
          const double dx = x - pcx, dy = y - pcy;
          if (dx * dx + dy * dy <= pr * pr) blob.emplace_back(x, y);
        }
      if (blob.empty() || detail::overlaps(blob, 3, occupied)) continue;
      for (const auto& [x, y] : blob) patches.set(x, y, true);
      detail::stamp_dilated(blob, 3, occupied);
      placed = true;
    }
    if (!placed)
      throw Error(ErrorCode::InvalidArgument,
                  "could not place all patches; disk too crowded");
  }

  GrayImage img(n, n, spec.background_level);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      if (!disk.get(x, y)) continue;
      double v = spec.disk_level;
      if (truth.get(x, y)) v = spec.filament_level;
      if (patches.get(x, y)) v = spec.patch_level;
      img.at(x, y) = v;
    }

  if (spec.noise_sigma > 0.0) {
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x)
        img.at(x, y) = std::clamp(img.at(x, y) + spec.noise_sigma * rng.gaussian(),
                                  0.0, 255.0);
  }

  return SynthCase{std::move(img), std::move(truth), std::move(disk), std::move(patches)};
}

}  // namespace sfd

#endif
