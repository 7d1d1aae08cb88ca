#ifndef SFD_BASELINES_HPP
#define SFD_BASELINES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "sfd/error.hpp"
#include "sfd/image.hpp"

namespace sfd {

/// 256-bin intensity histogram; real intensities are rounded to the nearest
/// integer level and clamped to [0, 255].
struct Histogram256 {
  std::array<int64_t, 256> bins{};
  int64_t total = 0;

  int distinct_levels() const {
    int n = 0;
    for (int64_t b : bins) n += b > 0;
    return n;
  }
};

inline int intensity_level(double v) {
  return static_cast<int>(std::lround(std::clamp(v, 0.0, 255.0)));
}

inline Histogram256 build_histogram(const GrayImage& img, const BinaryMask* roi = nullptr) {
  if (roi) require_mask_matches(img, *roi, "roi dimensions differ from image");
  Histogram256 h;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      if (roi && !roi->get(x, y)) continue;
      ++h.bins[intensity_level(img.at(x, y))];
      ++h.total;
    }
  return h;
}

/// Otsu's method: the threshold t* maximizing the between-class variance
///
///   sigma_B^2(t) = w0 w1 (mu0 - mu1)^2
///
/// over the histogram, with the dark class {level <= t}. Class weights and
/// sums are exact 64-bit integers; ties break toward the smaller t. Returns
/// the threshold and the mask of dark (filament-candidate) pixels; pixels
/// outside roi are always false.
inline std::pair<int, BinaryMask> otsu_threshold(const GrayImage& img,
                                                 const BinaryMask* roi = nullptr) {
  const Histogram256 hist = build_histogram(img, roi);
  if (hist.distinct_levels() < 2)
    throw Error(ErrorCode::DegenerateHistogram,
                "otsu needs at least two distinct intensity levels");

  int64_t total_sum = 0;
  for (int i = 0; i < 256; ++i) total_sum += static_cast<int64_t>(i) * hist.bins[i];

  int best_t = -1;
  double best_score = -1.0;
  int64_t w0 = 0, sum0 = 0;
  for (int t = 0; t < 256; ++t) {
    w0 += hist.bins[t];
    sum0 += static_cast<int64_t>(t) * hist.bins[t];
    const int64_t w1 = hist.total - w0;
    if (w0 == 0 || w1 == 0) continue;
    const int64_t sum1 = total_sum - sum0;
    // sigma_B^2 up to the constant N^2: (sum0*w1 - sum1*w0)^2 / (w0*w1)
    const double num = static_cast<double>(sum0 * w1 - sum1 * w0);
    const double score = num * num / static_cast<double>(w0 * w1);
    if (score > best_score) {
      best_score = score;
      best_t = t;
    }
  }

  BinaryMask mask(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      if (roi && !roi->get(x, y)) continue;
      mask.set(x, y, intensity_level(img.at(x, y)) <= best_t);
    }
  return {best_t, mask};
}

struct KMeansConfig {
  int k = 2;
  int max_iters = 100;
  double tol = 1e-6;
  uint64_t seed = 0;  // reserved; initialization is quantile-based and deterministic

  void validate() const {
    if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be >= 2");
    if (max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 1");
  }
};

/// Result of 1-D Lloyd clustering, exposed for inspection by tests and the
/// segmentation wrapper.
struct KMeans1DResult {
  std::vector<double> centroids;        // final, in initialization order
  std::vector<int> assignment;          // per input value
  std::vector<double> objective_trace;  // within-cluster SSE per iteration
  int iterations_run = 0;
};

/// Lloyd's algorithm on scalar values. Centroids start at the (i+0.5)/k
/// quantiles of the data; assignment ties break toward the lower cluster
/// index and an empty cluster keeps its centroid, so the procedure is fully
/// deterministic.
inline KMeans1DResult kmeans_cluster(const std::vector<double>& values,
                                     const KMeansConfig& cfg) {
  cfg.validate();
  {
    std::set<double> distinct(values.begin(), values.end());
    if (static_cast<int>(distinct.size()) < cfg.k)
      throw Error(ErrorCode::TooFewDistinctValues,
                  "kmeans needs at least k distinct values");
  }

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const size_t n = sorted.size();

  KMeans1DResult res;
  res.centroids.resize(cfg.k);
  for (int i = 0; i < cfg.k; ++i) {
    const double q = (i + 0.5) / static_cast<double>(cfg.k);
    const double hpos = q * static_cast<double>(n - 1);
    const size_t lo = static_cast<size_t>(hpos);
    const double frac = hpos - static_cast<double>(lo);
    res.centroids[i] = lo + 1 < n ? sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
                                  : sorted[lo];
  }

  res.assignment.assign(values.size(), 0);
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    double sse = 0.0;
    std::vector<double> sums(cfg.k, 0.0);
    std::vector<size_t> counts(cfg.k, 0);
    for (size_t i = 0; i < values.size(); ++i) {
      int best = 0;
      double best_d = std::abs(values[i] - res.centroids[0]);
      for (int c = 1; c < cfg.k; ++c) {
        const double d = std::abs(values[i] - res.centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      res.assignment[i] = best;
      sse += best_d * best_d;
      sums[best] += values[i];
      ++counts[best];
    }
    res.objective_trace.push_back(sse);
    res.iterations_run = iter;

    double max_move = 0.0;
    for (int c = 0; c < cfg.k; ++c) {
      if (counts[c] == 0) continue;
      const double updated = sums[c] / static_cast<double>(counts[c]);
      max_move = std::max(max_move, std::abs(updated - res.centroids[c]));
      res.centroids[c] = updated;
    }
    if (max_move < cfg.tol) break;
  }
  return res;
}

/// Clusters region intensities with k-means and marks the cluster with the
/// lowest centroid (the dark, filament-candidate class). Pixels outside roi
/// are always false.
inline BinaryMask kmeans_segment(const GrayImage& img, const KMeansConfig& cfg = {},
                                 const BinaryMask* roi = nullptr) {
  if (roi) require_mask_matches(img, *roi, "roi dimensions differ from image");

  std::vector<double> values;
  std::vector<size_t> positions;
  const size_t npix = img.size();
  values.reserve(roi ? roi->count() : npix);
  for (size_t i = 0; i < npix; ++i) {
    if (roi && !roi->data()[i]) continue;
    values.push_back(img.data()[i]);
    positions.push_back(i);
  }
  if (values.empty())
    throw Error(ErrorCode::TooFewDistinctValues, "kmeans region is empty");

  const KMeans1DResult res = kmeans_cluster(values, cfg);

  int dark = 0;
  for (int c = 1; c < cfg.k; ++c)
    if (res.centroids[c] < res.centroids[dark]) dark = c;

  BinaryMask mask(img.width(), img.height());
  for (size_t i = 0; i < values.size(); ++i)
    if (res.assignment[i] == dark) mask.data()[positions[i]] = 1;
  return mask;
}

}  // namespace sfd

#endif
