#ifndef SFD_PREPROCESS_HPP
#define SFD_PREPROCESS_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "sfd/error.hpp"
#include "sfd/image.hpp"

namespace sfd {

struct InpaintConfig {
  double dt = 0.1;
  int iterations = 500;
  double white_patch_percentile = 0.995;
  int dilation_radius = 2;

  void validate() const {
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "inpaint dt must be > 0");
    if (iterations < 1) throw Error(ErrorCode::InvalidArgument, "inpaint iterations must be >= 1");
    if (!(white_patch_percentile > 0.0 && white_patch_percentile < 1.0))
      throw Error(ErrorCode::InvalidArgument, "white_patch_percentile must be in (0,1)");
    if (dilation_radius < 0)
      throw Error(ErrorCode::InvalidArgument, "dilation_radius must be >= 0");
  }
};

/// Derived parameters of the log enhancement: r = 255 / log(1 + i_max).
struct LogTransformParams {
  double r = 0.0;
  double i_max = 0.0;
};

namespace detail {

/// Quantile of a sample with linear interpolation between order statistics
/// (the numpy default). q in (0,1).
inline double sample_quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

/// Dilation by a (2r+1)x(2r+1) square structuring element, applied as r
/// rounds of one-pixel 8-neighborhood growth.
inline BinaryMask dilate(const BinaryMask& mask, int radius) {
  BinaryMask cur = mask;
  for (int r = 0; r < radius; ++r) {
    BinaryMask next = cur;
    for (int y = 0; y < cur.height(); ++y)
      for (int x = 0; x < cur.width(); ++x) {
        if (next.get(x, y)) continue;
        bool hit = false;
        for (int dy = -1; dy <= 1 && !hit; ++dy)
          for (int dx = -1; dx <= 1 && !hit; ++dx) {
            const int nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= cur.width() || ny >= cur.height()) continue;
            hit = cur.get(nx, ny);
          }
        if (hit) next.set(x, y, true);
      }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace detail

/// Builds the inpaint region: pixels at or above the configured intensity
/// quantile, dilated by cfg.dilation_radius. When a disk mask is given the
/// quantile is computed over on-disk pixels only (off-limb background would
/// otherwise drag it down), but thresholding still marks any qualifying
/// pixel. On a constant image the quantile equals that constant and the
/// comparison is >=, so every pixel qualifies.
inline BinaryMask build_white_patch_mask(const GrayImage& img, const InpaintConfig& cfg,
                                         const BinaryMask* disk = nullptr) {
  cfg.validate();
  if (disk) require_mask_matches(img, *disk, "disk mask dimensions differ from image");

  std::vector<double> sample;
  if (disk) {
    sample.reserve(disk->count());
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x)
        if (disk->get(x, y)) sample.push_back(img.at(x, y));
  }
  if (sample.empty()) sample = img.data();

  const double thr = detail::sample_quantile(std::move(sample), cfg.white_patch_percentile);

  BinaryMask mask(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      mask.set(x, y, img.at(x, y) >= thr);
  return detail::dilate(mask, cfg.dilation_radius);
}

/// Isophote-propagation inpainting. Each iteration first transports the
/// image Laplacian along the local isophote direction,
///
///   I <- I + dt * (dL . N)
///
/// where L is the 4-neighbor Laplacian of the current image, dL its
/// forward-difference gradient, and N the unit vector perpendicular to the
/// intensity gradient (zero where the gradient vanishes, since flat regions
/// carry nothing to transport), and then applies one damped-Jacobi smoothing
/// substep (weight 0.15) inside omega. Forward Euler on the transport term
/// alone is unconditionally unstable (the operator is purely dispersive), so
/// the substep supplies the dissipation the iteration needs; harmonic fills
/// are exact fixed points of both substeps. Updates are Jacobi-style: every
/// substep reads the previous grid. Only pixels of omega change; the region
/// is shrunk off the one-pixel image border first. Updated values are
/// clamped to [0, 255]. Keep dt at or below ~0.15.
inline GrayImage inpaint(const GrayImage& img, const BinaryMask& omega,
                         const InpaintConfig& cfg = {}) {
  cfg.validate();
  require_mask_matches(img, omega, "omega dimensions differ from image");

  const int w = img.width(), h = img.height();

  std::vector<std::pair<int, int>> region;
  for (int y = 1; y < h - 1; ++y)
    for (int x = 1; x < w - 1; ++x)
      if (omega.get(x, y)) region.emplace_back(x, y);
  if (region.empty()) return img;

  GrayImage cur = img;
  GrayImage next = img;
  std::vector<double> lap(static_cast<size_t>(w) * h, 0.0);

  // (a-v)+(b-v)+... rather than a+b+..-4v: exactly zero on constant data
  auto laplacian_at = [&](int x, int y) {
    const double v = cur.at(x, y);
    return (cur.at_clamped(x + 1, y) - v) + (cur.at_clamped(x - 1, y) - v) +
           (cur.at_clamped(x, y + 1) - v) + (cur.at_clamped(x, y - 1) - v);
  };

  constexpr double kSmoothWeight = 0.15;

  for (int it = 0; it < cfg.iterations; ++it) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        lap[static_cast<size_t>(y) * w + x] = laplacian_at(x, y);

    for (const auto& [x, y] : region) {
      const double gx = 0.5 * (cur.at(x + 1, y) - cur.at(x - 1, y));
      const double gy = 0.5 * (cur.at(x, y + 1) - cur.at(x, y - 1));
      const double norm = std::sqrt(gx * gx + gy * gy);
      double it_term = 0.0;
      if (norm >= 1e-12) {
        const double nx = -gy / norm;
        const double ny = gx / norm;
        const size_t i = static_cast<size_t>(y) * w + x;
        const double dlx = lap[i + 1] - lap[i];
        const double dly = lap[i + w] - lap[i];
        it_term = dlx * nx + dly * ny;
      }
      next.at(x, y) = std::clamp(cur.at(x, y) + cfg.dt * it_term, 0.0, 255.0);
    }
    for (const auto& [x, y] : region) cur.at(x, y) = next.at(x, y);

    for (const auto& [x, y] : region)
      next.at(x, y) = std::clamp(cur.at(x, y) + kSmoothWeight * laplacian_at(x, y),
                                 0.0, 255.0);
    for (const auto& [x, y] : region) cur.at(x, y) = next.at(x, y);
  }
  return cur;
}

/// Log enhancement: v -> r*log(1+v) with r = 255/log(1+max), which expands
/// dark-pixel contrast and pins the maximum input to exactly 255.
inline std::pair<GrayImage, LogTransformParams> log_transform(const GrayImage& img) {
  double mx = 0.0;
  for (double v : img.data()) {
    if (v < 0.0)
      throw Error(ErrorCode::InvalidArgument, "log_transform requires nonnegative intensities");
    mx = std::max(mx, v);
  }
  if (mx == 0.0)
    throw Error(ErrorCode::AllZeroImage, "log_transform undefined on all-zero image");

  LogTransformParams params;
  params.i_max = mx;
  params.r = 255.0 / std::log1p(mx);

  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      out.at(x, y) = params.r * std::log1p(img.at(x, y));
  return {std::move(out), params};
}

/// 5-point sharpening stencil
///
///   I_s(x,y) = 5*I(x,y) - [I(x+1,y) + I(x-1,y) + I(x,y+1) + I(x,y-1)]
///
/// with replicate padding at the border and the result clamped to [0, 255].
/// Constant images pass through unchanged (5c - 4c = c).
inline GrayImage sharpen(const GrayImage& img) {
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const double v = 5.0 * img.at(x, y) -
                       (img.at_clamped(x + 1, y) + img.at_clamped(x - 1, y) +
                        img.at_clamped(x, y + 1) + img.at_clamped(x, y - 1));
      out.at(x, y) = std::clamp(v, 0.0, 255.0);
    }
  return out;
}

}  // namespace sfd

#endif
