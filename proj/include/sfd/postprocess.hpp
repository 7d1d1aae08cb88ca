#ifndef SFD_POSTPROCESS_HPP
#define SFD_POSTPROCESS_HPP

#include <cstdint>
#include <numeric>
#include <vector>

#include "sfd/error.hpp"
#include "sfd/image.hpp"

namespace sfd {

/// 8-connected component labeling of a binary mask. Label 0 is background;
/// foreground labels are consecutive 1..num_components in order of first
/// encounter during a row-major scan, which makes outputs reproducible.
struct ComponentLabels {
  int width = 0;
  int height = 0;
  std::vector<int> labels;        // row-major, 0 = background
  int num_components = 0;
  std::vector<size_t> areas;      // areas[k-1] = pixel count of label k

  int label_at(int x, int y) const { return labels[static_cast<size_t>(y) * width + x]; }
};

struct PostprocessConfig {
  size_t min_area = 50;
};

/// Two-pass union-find labeling, 8-connectivity.
inline ComponentLabels label_components(const BinaryMask& mask) {
  const int w = mask.width(), h = mask.height();
  ComponentLabels out;
  out.width = w;
  out.height = h;
  out.labels.assign(static_cast<size_t>(w) * h, 0);

  std::vector<int> parent(1, 0);  // provisional labels, parent[0] unused
  auto find = [&](int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };

  // First pass: assign provisional labels, merging across the four
  // already-visited 8-neighbors (W, NW, N, NE).
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.get(x, y)) continue;
      int lab = 0;
      const int nx[4] = {x - 1, x - 1, x, x + 1};
      const int ny[4] = {y, y - 1, y - 1, y - 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || nx[k] >= w || ny[k] < 0) continue;
        const int nl = out.labels[static_cast<size_t>(ny[k]) * w + nx[k]];
        if (nl == 0) continue;
        if (lab == 0) lab = nl;
        else unite(lab, nl);
      }
      if (lab == 0) {
        lab = static_cast<int>(parent.size());
        parent.push_back(lab);
      }
      out.labels[static_cast<size_t>(y) * w + x] = lab;
    }
  }

  // Second pass: map roots to final labels in first-encounter order.
  std::vector<int> final_label(parent.size(), 0);
  for (size_t i = 0; i < out.labels.size(); ++i) {
    int lab = out.labels[i];
    if (lab == 0) continue;
    const int root = find(lab);
    if (final_label[root] == 0) {
      final_label[root] = ++out.num_components;
      out.areas.push_back(0);
    }
    out.labels[i] = final_label[root];
    ++out.areas[out.labels[i] - 1];
  }
  return out;
}

/// Keeps exactly the pixels of components whose area is >= cfg.min_area.
inline BinaryMask filter_by_area(const BinaryMask& mask, const PostprocessConfig& cfg) {
  const ComponentLabels cl = label_components(mask);
  BinaryMask out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x) {
      const int lab = cl.label_at(x, y);
      if (lab != 0 && cl.areas[lab - 1] >= cfg.min_area) out.set(x, y, true);
    }
  return out;
}

/// Per-component statistics for reporting.
struct ComponentStats {
  int label = 0;
  size_t area = 0;
  int min_x = 0, min_y = 0, max_x = 0, max_y = 0;
  double centroid_x = 0.0, centroid_y = 0.0;
};

inline std::vector<ComponentStats> component_stats(const ComponentLabels& cl) {
  std::vector<ComponentStats> stats(cl.num_components);
  for (int k = 0; k < cl.num_components; ++k) {
    stats[k].label = k + 1;
    stats[k].min_x = cl.width;
    stats[k].min_y = cl.height;
    stats[k].max_x = -1;
    stats[k].max_y = -1;
  }
  for (int y = 0; y < cl.height; ++y)
    for (int x = 0; x < cl.width; ++x) {
      const int lab = cl.label_at(x, y);
      if (lab == 0) continue;
      ComponentStats& s = stats[lab - 1];
      ++s.area;
      s.min_x = std::min(s.min_x, x);
      s.min_y = std::min(s.min_y, y);
      s.max_x = std::max(s.max_x, x);
      s.max_y = std::max(s.max_y, y);
      s.centroid_x += x;
      s.centroid_y += y;
    }
  for (ComponentStats& s : stats) {
    s.centroid_x /= static_cast<double>(s.area);
    s.centroid_y /= static_cast<double>(s.area);
  }
  return stats;
}

}  // namespace sfd

#endif
