#ifndef SFD_ACWE_HPP
#define SFD_ACWE_HPP

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "sfd/error.hpp"
#include "sfd/image.hpp"

namespace sfd {

/// Two-phase active-contours-without-edges segmentation.
///
/// The contour C is the zero level set of a scalar field phi and is evolved
/// to minimize the region-based energy
///
///   F(c1, c2, C) = mu*Length(C) + nu*Area(inside(C))
///                + lambda1 * sum_{phi>0} (I - c1)^2
///                + lambda2 * sum_{phi<=0} (I - c2)^2
///
/// where c1, c2 are the mean intensities inside and outside the contour.
/// Length and Area use the regularized Heaviside
/// H_eps(t) = (1 + (2/pi) atan(t/eps)) / 2; the gradient-descent update uses
/// the matching delta delta_eps(t) = eps / (pi (eps^2 + t^2)).

enum class InitScheme { Checkerboard, Circle };

struct AcweConfig {
  double mu = 0.003;
  double nu = 0.0;
  double lambda1 = 1.000001;
  double lambda2 = 0.1;
  double dt = 0.5;
  double epsilon = 1.0;
  int max_iters = 500;
  double tol = 1e-4;
  InitScheme init = InitScheme::Checkerboard;
  bool normalize_input = true;

  void validate() const {
    if (mu < 0.0) throw Error(ErrorCode::InvalidArgument, "mu must be >= 0");
    if (!(lambda1 > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda1 must be > 0");
    if (!(lambda2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda2 must be > 0");
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be > 0");
    if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be > 0");
    if (max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 1");
    if (tol < 0.0) throw Error(ErrorCode::InvalidArgument, "tol must be >= 0");
  }
};

/// Signed level-set field; the contour is its zero set, inside = {phi > 0}.
struct LevelSetField {
  int width = 0;
  int height = 0;
  std::vector<double> phi;

  LevelSetField() = default;
  LevelSetField(int w, int h, double fill = 0.0)
      : width(w), height(h), phi(static_cast<size_t>(w) * h, fill) {
    if (w < 3 || h < 3)
      throw Error(ErrorCode::ImageTooSmall, "level set needs at least 3x3");
  }

  double& at(int x, int y) { return phi[static_cast<size_t>(y) * width + x]; }
  double at(int x, int y) const { return phi[static_cast<size_t>(y) * width + x]; }

  double at_clamped(int x, int y) const {
    x = std::clamp(x, 0, width - 1);
    y = std::clamp(y, 0, height - 1);
    return at(x, y);
  }

  BinaryMask inside_mask() const {
    BinaryMask m(width, height);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) m.set(x, y, at(x, y) > 0.0);
    return m;
  }
};

struct AcweResult {
  BinaryMask mask;                  // final inside region {phi > 0}
  double c1 = 0.0;                  // mean over mask, in evolution units
  double c2 = 0.0;                  // mean over complement
  int iterations_run = 0;
  std::vector<double> energy_trace; // [initial, after iter 1, ...]
  bool converged = false;
  LevelSetField phi;
};

inline double heaviside_reg(double t, double eps) {
  return 0.5 * (1.0 + (2.0 / std::numbers::pi) * std::atan(t / eps));
}

inline double delta_reg(double t, double eps) {
  return eps / (std::numbers::pi * (eps * eps + t * t));
}

/// Initial level set. Checkerboard: phi(x,y) = sin(pi x/5) sin(pi y/5),
/// which seeds many small contours and lets disjoint objects be found
/// quickly. Circle: signed distance to a centered circle of radius
/// min(w,h)/3, positive inside. If roi is given, phi is forced to -1
/// outside it.
inline LevelSetField init_level_set(int width, int height, InitScheme scheme,
                                    const BinaryMask* roi = nullptr) {
  LevelSetField f(width, height);
  if (roi && !roi->same_dims(width, height))
    throw Error(ErrorCode::DimensionMismatch, "roi dimensions differ");

  if (scheme == InitScheme::Checkerboard) {
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        f.at(x, y) = std::sin(std::numbers::pi * x / 5.0) *
                     std::sin(std::numbers::pi * y / 5.0);
  } else {
    const double cx = width / 2;   // integer center pixel: phi there == +radius
    const double cy = height / 2;
    const double radius = std::min(width, height) / 3.0;
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        f.at(x, y) = radius - std::hypot(x - cx, y - cy);
  }

  if (roi)
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        if (!roi->get(x, y)) f.at(x, y) = -1.0;
  return f;
}

/// Mean intensities of {phi > 0} and {phi <= 0}. An empty region's mean is
/// defined as the global image mean.
inline std::pair<double, double> region_means(const GrayImage& img, const LevelSetField& phi) {
  if (!img.same_dims(phi.width, phi.height))
    throw Error(ErrorCode::DimensionMismatch, "phi dimensions differ from image");
  double sum_in = 0.0, sum_out = 0.0;
  size_t n_in = 0, n_out = 0;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const double v = img.at(x, y);
      if (phi.at(x, y) > 0.0) {
        sum_in += v;
        ++n_in;
      } else {
        sum_out += v;
        ++n_out;
      }
    }
  const double global = (sum_in + sum_out) / static_cast<double>(n_in + n_out);
  return {n_in ? sum_in / static_cast<double>(n_in) : global,
          n_out ? sum_out / static_cast<double>(n_out) : global};
}

/// Means of img over a mask and its complement, same empty-region convention.
inline std::pair<double, double> region_means_over(const GrayImage& img, const BinaryMask& mask) {
  require_mask_matches(img, mask, "mask dimensions differ from image");
  double sum_in = 0.0, sum_out = 0.0;
  size_t n_in = 0, n_out = 0;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const double v = img.at(x, y);
      if (mask.get(x, y)) {
        sum_in += v;
        ++n_in;
      } else {
        sum_out += v;
        ++n_out;
      }
    }
  const double global = (sum_in + sum_out) / static_cast<double>(n_in + n_out);
  return {n_in ? sum_in / static_cast<double>(n_in) : global,
          n_out ? sum_out / static_cast<double>(n_out) : global};
}

/// Discrete energy F(c1, c2, C) of the current state. Length(C) is
/// approximated as sum |grad H_eps(phi)| with central differences and
/// replicate borders, Area as sum H_eps(phi); the fidelity terms sum over
/// the sharp partition.
inline double energy(const GrayImage& img, const LevelSetField& phi, const AcweConfig& cfg) {
  const auto [c1, c2] = region_means(img, phi);
  const int w = phi.width, h = phi.height;

  std::vector<double> hfield(static_cast<size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      hfield[static_cast<size_t>(y) * w + x] = heaviside_reg(phi.at(x, y), cfg.epsilon);
  auto hat = [&](int x, int y) {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return hfield[static_cast<size_t>(y) * w + x];
  };

  double length = 0.0, area = 0.0, fid1 = 0.0, fid2 = 0.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double hx = 0.5 * (hat(x + 1, y) - hat(x - 1, y));
      const double hy = 0.5 * (hat(x, y + 1) - hat(x, y - 1));
      length += std::sqrt(hx * hx + hy * hy);
      area += hat(x, y);
      const double v = img.at(x, y);
      if (phi.at(x, y) > 0.0)
        fid1 += (v - c1) * (v - c1);
      else
        fid2 += (v - c2) * (v - c2);
    }
  return cfg.mu * length + cfg.nu * area + cfg.lambda1 * fid1 + cfg.lambda2 * fid2;
}

/// Per-iteration snapshot passed to an evolve observer. phi_before is the
/// field c1/c2 were computed from; phi_after is the updated field the
/// energy refers to.
struct EvolveIterationInfo {
  int iteration = 0;
  double c1 = 0.0;
  double c2 = 0.0;
  double energy = 0.0;
  double mean_abs_delta = 0.0;
  const LevelSetField& phi_before;
  const LevelSetField& phi_after;
};

using EvolveObserver = std::function<void(const EvolveIterationInfo&)>;

/// Gradient-descent level-set evolution of the energy above. Per iteration:
///
///   1. c1, c2  <- region means of the current partition
///   2. phi     <- phi + dt * delta_eps(phi) * [ mu*kappa - nu
///                  - lambda1*(I - c1)^2 + lambda2*(I - c2)^2 ]
///   3. if roi given, phi <- min(phi, -1) outside roi
///
/// kappa = div(grad phi / |grad phi|) with central differences and a 1e-8
/// denominator guard. The update is Jacobi-style (reads the old field,
/// writes a new one), phi is kept in [-1e6, 1e6], and iteration stops when
/// mean |delta phi| < tol or max_iters is reached. Intensities are first
/// mapped affinely onto [0, 1] when cfg.normalize_input is set; c1/c2 and
/// the energy trace are in those units.
inline AcweResult evolve(const GrayImage& img, const AcweConfig& cfg = {},
                         const BinaryMask* roi = nullptr,
                         const EvolveObserver& observer = {}) {
  cfg.validate();
  if (!img.all_finite())
    throw Error(ErrorCode::NonFiniteValues, "evolve input contains NaN/Inf");
  if (roi) require_mask_matches(img, *roi, "roi dimensions differ from image");

  const int w = img.width(), h = img.height();

  GrayImage work(w, h);
  if (cfg.normalize_input) {
    const double lo = img.min_value(), hi = img.max_value();
    if (hi > lo) {
      const double scale = 1.0 / (hi - lo);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) work.at(x, y) = (img.at(x, y) - lo) * scale;
    }
    // constant image maps to all zeros; fidelity forces vanish either way
  } else {
    work = img;
  }

  LevelSetField cur = init_level_set(w, h, cfg.init, roi);
  LevelSetField next(w, h);
  std::vector<double> nx_field(static_cast<size_t>(w) * h);
  std::vector<double> ny_field(static_cast<size_t>(w) * h);

  AcweResult result;
  result.energy_trace.push_back(energy(work, cur, cfg));

  constexpr double kPhiClamp = 1e6;
  const double inv_n = 1.0 / static_cast<double>(static_cast<size_t>(w) * h);

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const auto [c1, c2] = region_means(work, cur);

    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double gx = 0.5 * (cur.at_clamped(x + 1, y) - cur.at_clamped(x - 1, y));
        const double gy = 0.5 * (cur.at_clamped(x, y + 1) - cur.at_clamped(x, y - 1));
        const double norm = std::sqrt(gx * gx + gy * gy) + 1e-8;
        nx_field[static_cast<size_t>(y) * w + x] = gx / norm;
        ny_field[static_cast<size_t>(y) * w + x] = gy / norm;
      }
    auto nxat = [&](int x, int y) {
      x = std::clamp(x, 0, w - 1);
      y = std::clamp(y, 0, h - 1);
      return nx_field[static_cast<size_t>(y) * w + x];
    };
    auto nyat = [&](int x, int y) {
      x = std::clamp(x, 0, w - 1);
      y = std::clamp(y, 0, h - 1);
      return ny_field[static_cast<size_t>(y) * w + x];
    };

    double delta_sum = 0.0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double kappa = 0.5 * (nxat(x + 1, y) - nxat(x - 1, y)) +
                             0.5 * (nyat(x, y + 1) - nyat(x, y - 1));
        const double v = work.at(x, y);
        const double force = cfg.mu * kappa - cfg.nu -
                             cfg.lambda1 * (v - c1) * (v - c1) +
                             cfg.lambda2 * (v - c2) * (v - c2);
        const double old = cur.at(x, y);
        double updated = old + cfg.dt * delta_reg(old, cfg.epsilon) * force;
        updated = std::clamp(updated, -kPhiClamp, kPhiClamp);
        if (roi && !roi->get(x, y)) updated = std::min(updated, -1.0);
        next.at(x, y) = updated;
        delta_sum += std::abs(updated - old);
      }

    const double mean_delta = delta_sum * inv_n;
    const double e = energy(work, next, cfg);
    if (!std::isfinite(mean_delta) || !std::isfinite(e))
      throw Error(ErrorCode::NonFiniteValues,
                  "evolve diverged at iteration " + std::to_string(iter));

    result.energy_trace.push_back(e);
    result.iterations_run = iter;
    if (observer)
      observer(EvolveIterationInfo{iter, c1, c2, e, mean_delta, cur, next});

    std::swap(cur, next);
    if (mean_delta < cfg.tol) {
      result.converged = true;
      break;
    }
  }

  result.mask = cur.inside_mask();
  const auto [fc1, fc2] = region_means(work, cur);
  result.c1 = fc1;
  result.c2 = fc2;
  result.phi = std::move(cur);
  return result;
}

/// Picks the darker of the two segmented regions: filaments are cooler and
/// darker than their surroundings. Ties go to the inside region.
inline BinaryMask filament_mask(const AcweResult& result, const GrayImage& img) {
  require_mask_matches(img, result.mask, "result mask dimensions differ from image");
  const auto [c1, c2] = region_means_over(img, result.mask);
  return c1 <= c2 ? result.mask : result.mask.complement();
}

}  // namespace sfd

#endif
