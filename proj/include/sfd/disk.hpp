#ifndef SFD_DISK_HPP
#define SFD_DISK_HPP

#include <cmath>
#include <numbers>
#include <utility>

#include "sfd/error.hpp"
#include "sfd/image.hpp"
#include "sfd/postprocess.hpp"

namespace sfd {

/// Circle fitted to the solar disk, sub-pixel center and radius in pixels.
struct DiskGeometry {
  double center_x = 0.0;
  double center_y = 0.0;
  double radius = 0.0;

  bool contains(int x, int y) const {
    const double dx = x - center_x, dy = y - center_y;
    return dx * dx + dy * dy <= radius * radius;
  }
};

/// Finds the solar disk as the largest 8-connected component of pixels at or
/// above threshold_fraction times the maximum intensity, then fits a circle
/// from its centroid and equivalent-area radius sqrt(area/pi). The returned
/// mask is true exactly on pixels inside the fitted circle; intensity dips
/// inside the disk (filaments, sunspots) therefore do not punch holes in it.
///
/// The threshold is relative, so the result is invariant under global
/// intensity scaling.
inline std::pair<DiskGeometry, BinaryMask> detect_disk(const GrayImage& img,
                                                       double threshold_fraction = 0.5) {
  if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0))
    throw Error(ErrorCode::InvalidArgument, "threshold_fraction must be in (0,1)");

  const double mx = img.max_value();
  if (!(mx > 0.0))
    throw Error(ErrorCode::NoDiskFound, "no disk found: image has no positive pixel");
  const double thr = threshold_fraction * mx;

  BinaryMask bright(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      bright.set(x, y, img.at(x, y) >= thr);

  const ComponentLabels cl = label_components(bright);
  if (cl.num_components == 0)
    throw Error(ErrorCode::NoDiskFound, "no disk found: no pixel above threshold");

  int best = 1;
  for (int k = 2; k <= cl.num_components; ++k)
    if (cl.areas[k - 1] > cl.areas[best - 1]) best = k;

  double sx = 0.0, sy = 0.0;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      if (cl.label_at(x, y) == best) {
        sx += x;
        sy += y;
      }
  const double area = static_cast<double>(cl.areas[best - 1]);

  DiskGeometry geom;
  geom.center_x = sx / area;
  geom.center_y = sy / area;
  geom.radius = std::sqrt(area / std::numbers::pi);

  BinaryMask mask(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      mask.set(x, y, geom.contains(x, y));
  return {geom, mask};
}

}  // namespace sfd

#endif
