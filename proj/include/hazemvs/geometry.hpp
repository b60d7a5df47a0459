#pragma once

#include "hazemvs/image.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace hazemvs {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

/// Pinhole camera: intrinsics plus the pose mapping reference-frame points
/// into this camera's frame, X_cam = R * X_ref + t. The reference camera
/// itself carries the identity pose.
class CameraModel {
 public:
  CameraModel() = default;
  /// Throws InvalidArgument when an invariant is violated; `tolerance`
  /// bounds the orthonormality / determinant error of `rotation`.
  CameraModel(const Mat3& intrinsics, const Mat3& rotation, const Vec3& translation,
              int width, int height, double tolerance = 1e-9);

  /// Ideal camera with principal point and identity pose.
  static CameraModel pinhole(double focal, double cx, double cy, int width, int height);

  const Mat3& intrinsics() const { return k_; }
  const Mat3& intrinsics_inverse() const { return k_inv_; }
  const Mat3& rotation() const { return r_; }
  const Vec3& translation() const { return t_; }
  int width() const { return width_; }
  int height() const { return height_; }

  /// Camera center in the reference frame.
  Vec3 center() const { return -r_.transpose() * t_; }

  /// Same intrinsics, new pose.
  CameraModel with_pose(const Mat3& rotation, const Vec3& translation) const;

 private:
  Mat3 k_ = Mat3::Identity();
  Mat3 k_inv_ = Mat3::Identity();
  Mat3 r_ = Mat3::Identity();
  Vec3 t_ = Vec3::Zero();
  int width_ = 1;
  int height_ = 1;
};

/// Relative geometry between a reference and a source camera.
struct ViewPair {
  ViewPair(const CameraModel& reference, const CameraModel& source);

  Mat3 k_ref_inv;
  Mat3 k_src;
  Mat3 k_src_inv;
  Mat3 rotation;     // reference -> source
  Vec3 translation;  // reference -> source
  int src_width;
  int src_height;
};

/// Plane depths sampled uniformly in inverse depth. Index 0 holds the
/// smallest disparity (farthest plane).
class HypothesisSet {
 public:
  HypothesisSet() = default;

  std::size_t size() const { return depths_.size(); }
  double depth(std::size_t i) const { return depths_[i]; }
  double disparity(std::size_t i) const { return disparities_[i]; }
  const std::vector<double>& depths() const { return depths_; }
  double disparity_min() const { return d_min_; }
  double disparity_max() const { return d_max_; }
  /// Disparity increment between neighbouring planes.
  double step() const { return (d_max_ - d_min_) / static_cast<double>(depths_.size() - 1); }

  friend HypothesisSet make_hypotheses(std::size_t n, double d_min, double d_max);

 private:
  std::vector<double> depths_;
  std::vector<double> disparities_;
  double d_min_ = 0.0;
  double d_max_ = 0.0;
};

HypothesisSet make_hypotheses(std::size_t n, double d_min, double d_max);

enum class WarpStatus { kOk, kBehindCamera, kNoIntersection };

struct Warp {
  Vec2 pixel = Vec2::Zero();
  /// Source-frame z of the warped point.
  double source_depth = 0.0;
  WarpStatus status = WarpStatus::kOk;

  bool ok() const { return status == WarpStatus::kOk; }
};

/// Projects reference pixel (u,v) at depth z into the source image. No bounds
/// check; callers test visibility themselves.
Warp project_to_source(const Vec2& pixel, double depth, const ViewPair& pair);
Warp project_to_source(const Vec2& pixel, double depth, const CameraModel& reference,
                       const CameraModel& source);

struct PlaneDepth {
  double depth = 0.0;
  WarpStatus status = WarpStatus::kOk;
  bool ok() const { return status == WarpStatus::kOk; }
};

/// Depth, in the source frame, where the ray through source pixel `src_pixel`
/// meets the reference-frame plane {X : X_z = plane_depth}.
PlaneDepth source_view_plane_depth(double plane_depth, const ViewPair& pair, const Vec2& src_pixel);

/// Bilinear lookup on [0,W-1]x[0,H-1]; nullopt outside that domain.
std::optional<Color> bilinear_sample(const ImageBuffer& image, const Vec2& pixel);

/// Reference-frame point seen at `pixel` with camera-frame depth `depth`.
Vec3 back_project(const CameraModel& camera, const Vec2& pixel, double depth);

}  // namespace hazemvs
