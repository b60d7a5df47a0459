#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <vector>

namespace hazemvs {

using Color = Eigen::Vector3d;

/// Row-major RGB image, channels stored as doubles in [0,1].
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int width, int height, double fill = 0.0)
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * height * 3, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

  double& at(int x, int y, int c) { return data_[index(x, y) * 3 + c]; }
  double at(int x, int y, int c) const { return data_[index(x, y) * 3 + c]; }

  Color pixel(int x, int y) const {
    const double* p = &data_[index(x, y) * 3];
    return {p[0], p[1], p[2]};
  }
  void set_pixel(int x, int y, const Color& c) {
    double* p = &data_[index(x, y) * 3];
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }

  const double* row(int y) const { return &data_[static_cast<std::size_t>(y) * width_ * 3]; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const ImageBuffer&) const = default;

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Per-pixel depth with an explicit validity mask. Invalid pixels hold NaN.
class DepthMap {
 public:
  DepthMap() = default;
  DepthMap(int width, int height)
      : width_(width), height_(height),
        depth_(static_cast<std::size_t>(width) * height, std::nan("")),
        valid_(static_cast<std::size_t>(width) * height, 0) {}
  DepthMap(int width, int height, double fill) : DepthMap(width, height) {
    for (std::size_t i = 0; i < depth_.size(); ++i) set(i, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return depth_.size(); }

  double at(int x, int y) const { return depth_[index(x, y)]; }
  bool valid(int x, int y) const { return valid_[index(x, y)] != 0; }
  double at(std::size_t i) const { return depth_[i]; }
  bool valid(std::size_t i) const { return valid_[i] != 0; }

  /// Stores z; the pixel becomes valid iff z is finite and positive.
  void set(int x, int y, double z) { set(index(x, y), z); }
  void set(std::size_t i, double z) {
    const bool ok = std::isfinite(z) && z > 0.0;
    depth_[i] = ok ? z : std::nan("");
    valid_[i] = ok ? 1 : 0;
  }
  void invalidate(int x, int y) { set(index(x, y), std::nan("")); }

  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  const std::vector<double>& depths() const { return depth_; }

  bool operator==(const DepthMap& o) const {
    if (width_ != o.width_ || height_ != o.height_ || valid_ != o.valid_) return false;
    for (std::size_t i = 0; i < depth_.size(); ++i)
      if (valid_[i] && depth_[i] != o.depth_[i]) return false;
    return true;
  }

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> depth_;
  std::vector<unsigned char> valid_;
};

}  // namespace hazemvs
