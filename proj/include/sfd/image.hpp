#ifndef SFD_IMAGE_HPP
#define SFD_IMAGE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "sfd/error.hpp"

namespace sfd {

/// Row-major grayscale raster with double-precision intensities.
///
/// Intensities are nominally in [0, 255]; stages that need [0, 1] normalize
/// explicitly. Minimum size is 3x3 so that every stencil in the library has
/// a one-pixel interior to stand on.
class GrayImage {
public:
  GrayImage() = default;

  GrayImage(int width, int height, double fill = 0.0)
      : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<size_t>(width) * height, fill);
  }

  GrayImage(int width, int height, std::vector<double> data)
      : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<size_t>(width) * height)
      throw Error(ErrorCode::DimensionMismatch,
                  "pixel buffer does not match width*height");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  size_t size() const noexcept { return data_.size(); }

  double& at(int x, int y) { return data_[static_cast<size_t>(y) * width_ + x]; }
  double at(int x, int y) const { return data_[static_cast<size_t>(y) * width_ + x]; }

  /// Reads with replicate padding: out-of-range coordinates clamp to the
  /// nearest edge pixel.
  double at_clamped(int x, int y) const {
    x = std::clamp(x, 0, width_ - 1);
    y = std::clamp(y, 0, height_ - 1);
    return at(x, y);
  }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  double max_value() const { return *std::max_element(data_.begin(), data_.end()); }
  double min_value() const { return *std::min_element(data_.begin(), data_.end()); }

  double mean() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s / static_cast<double>(data_.size());
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](double v) { return std::isfinite(v); });
  }

  bool same_dims(int w, int h) const noexcept { return width_ == w && height_ == h; }

private:
  static void check_dims(int width, int height) {
    if (width == 0 || height == 0)
      throw Error(ErrorCode::ZeroSizedImage, "image has zero pixels");
    if (width < 3 || height < 3)
      throw Error(ErrorCode::ImageTooSmall, "images must be at least 3x3");
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Row-major boolean grid. Used for inpaint regions, segmentation results,
/// ground truth and regions of interest.
class BinaryMask {
public:
  BinaryMask() = default;

  BinaryMask(int width, int height, bool fill = false)
      : width_(width), height_(height) {
    if (width <= 0 || height <= 0)
      throw Error(ErrorCode::ZeroSizedImage, "mask has zero pixels");
    data_.assign(static_cast<size_t>(width) * height, fill ? 1 : 0);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  size_t size() const noexcept { return data_.size(); }

  bool get(int x, int y) const { return data_[static_cast<size_t>(y) * width_ + x] != 0; }
  void set(int x, int y, bool v) { data_[static_cast<size_t>(y) * width_ + x] = v ? 1 : 0; }

  const std::vector<uint8_t>& data() const noexcept { return data_; }
  std::vector<uint8_t>& data() noexcept { return data_; }

  size_t count() const {
    size_t n = 0;
    for (uint8_t v : data_) n += v;
    return n;
  }

  BinaryMask complement() const {
    BinaryMask out(width_, height_);
    for (size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] ? 0 : 1;
    return out;
  }

  BinaryMask intersect(const BinaryMask& other) const {
    require_same_dims(other);
    BinaryMask out(width_, height_);
    for (size_t i = 0; i < data_.size(); ++i)
      out.data_[i] = (data_[i] && other.data_[i]) ? 1 : 0;
    return out;
  }

  bool same_dims(int w, int h) const noexcept { return width_ == w && height_ == h; }

  void require_same_dims(const BinaryMask& other) const {
    if (width_ != other.width_ || height_ != other.height_)
      throw Error(ErrorCode::DimensionMismatch, "mask dimensions differ");
  }

  bool operator==(const BinaryMask& other) const = default;

private:
  int width_ = 0;
  int height_ = 0;
  std::vector<uint8_t> data_;
};

inline void require_mask_matches(const GrayImage& img, const BinaryMask& m,
                                 const char* what) {
  if (!m.same_dims(img.width(), img.height()))
    throw Error(ErrorCode::DimensionMismatch, what);
}

}  // namespace sfd

#endif
