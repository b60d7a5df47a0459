#include "hazemvs/geometry.hpp"

#include "hazemvs/errors.hpp"

#include <Eigen/LU>

#include <cmath>
#include <string>

namespace hazemvs {

CameraModel::CameraModel(const Mat3& intrinsics, const Mat3& rotation, const Vec3& translation,
                         int width, int height, double tolerance)
    : k_(intrinsics), r_(rotation), t_(translation), width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw InvalidArgument("camera dimensions must be positive");
  if (k_(1, 0) != 0.0 || k_(2, 0) != 0.0 || k_(2, 1) != 0.0)
    throw InvalidArgument("intrinsics must be upper triangular");
  if (!(k_(0, 0) > 0.0) || !(k_(1, 1) > 0.0) || !(k_(2, 2) > 0.0))
    throw InvalidArgument("intrinsics must have positive diagonal entries");
  const double ortho = (r_ * r_.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
  const double det = r_.determinant();
  if (!(ortho <= tolerance) || !(std::abs(det - 1.0) <= tolerance))
    throw InvalidArgument("rotation must be orthonormal with determinant +1 (error " +
                          std::to_string(std::max(ortho, std::abs(det - 1.0))) + ")");
  if (!t_.allFinite()) throw InvalidArgument("translation must be finite");
  k_inv_ = k_.inverse();
}

CameraModel CameraModel::pinhole(double focal, double cx, double cy, int width, int height) {
  Mat3 k;
  k << focal, 0.0, cx, 0.0, focal, cy, 0.0, 0.0, 1.0;
  return CameraModel(k, Mat3::Identity(), Vec3::Zero(), width, height);
}

CameraModel CameraModel::with_pose(const Mat3& rotation, const Vec3& translation) const {
  return CameraModel(k_, rotation, translation, width_, height_);
}

ViewPair::ViewPair(const CameraModel& reference, const CameraModel& source)
    : k_ref_inv(reference.intrinsics_inverse()),
      k_src(source.intrinsics()),
      k_src_inv(source.intrinsics_inverse()),
      rotation(source.rotation() * reference.rotation().transpose()),
      translation(source.translation() - rotation * reference.translation()),
      src_width(source.width()),
      src_height(source.height()) {}

HypothesisSet make_hypotheses(std::size_t n, double d_min, double d_max) {
  if (n < 2) throw InvalidArgument("need at least two hypotheses");
  if (!(d_min > 0.0) || !(d_max > d_min) || !std::isfinite(d_max))
    throw InvalidArgument("disparity bounds must satisfy 0 < d_min < d_max");
  HypothesisSet h;
  h.d_min_ = d_min;
  h.d_max_ = d_max;
  h.depths_.resize(n);
  h.disparities_.resize(n);
  const double last = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    // Interpolate from both ends so the endpoints are exact.
    const double a = static_cast<double>(i) / last;
    const double d = i + 1 == n ? d_max : d_min * (1.0 - a) + d_max * a;
    h.disparities_[i] = d;
    h.depths_[i] = 1.0 / d;
  }
  return h;
}

Warp project_to_source(const Vec2& pixel, double depth, const ViewPair& pair) {
  if (!(depth > 0.0)) throw InvalidArgument("projection depth must be positive");
  const Vec3 ray = pair.k_ref_inv * Vec3(pixel.x(), pixel.y(), 1.0);
  const Vec3 x_src = depth * (pair.rotation * ray) + pair.translation;
  const Vec3 h = pair.k_src * x_src;
  Warp w;
  w.source_depth = x_src.z();
  if (!(x_src.z() > 0.0) || !(h.z() > 0.0)) {
    w.status = WarpStatus::kBehindCamera;
    return w;
  }
  w.pixel = Vec2(h.x() / h.z(), h.y() / h.z());
  return w;
}

Warp project_to_source(const Vec2& pixel, double depth, const CameraModel& reference,
                       const CameraModel& source) {
  return project_to_source(pixel, depth, ViewPair(reference, source));
}

PlaneDepth source_view_plane_depth(double plane_depth, const ViewPair& pair, const Vec2& src_pixel) {
  if (!(plane_depth > 0.0)) throw InvalidArgument("plane depth must be positive");
  // Source ray X_s = lambda * d_s; in the reference frame X_r = R^T (X_s - t).
  const Vec3 d_s = pair.k_src_inv * Vec3(src_pixel.x(), src_pixel.y(), 1.0);
  const Vec3 d_r = pair.rotation.transpose() * d_s;
  const Vec3 origin_r = -pair.rotation.transpose() * pair.translation;
  PlaneDepth out;
  if (std::abs(d_r.z()) < 1e-12) {
    out.status = WarpStatus::kNoIntersection;
    return out;
  }
  const double lambda = (plane_depth - origin_r.z()) / d_r.z();
  const double zeta = lambda * d_s.z();
  if (!(lambda > 0.0) || !(zeta > 0.0)) {
    out.status = WarpStatus::kNoIntersection;
    return out;
  }
  out.depth = zeta;
  return out;
}

std::optional<Color> bilinear_sample(const ImageBuffer& image, const Vec2& pixel) {
  const double u = pixel.x();
  const double v = pixel.y();
  const double max_u = image.width() - 1;
  const double max_v = image.height() - 1;
  if (!(u >= 0.0 && u <= max_u && v >= 0.0 && v <= max_v)) return std::nullopt;
  const int x0 = std::min(static_cast<int>(u), image.width() - 1);
  const int y0 = std::min(static_cast<int>(v), image.height() - 1);
  const int x1 = std::min(x0 + 1, image.width() - 1);
  const int y1 = std::min(y0 + 1, image.height() - 1);
  const double fx = u - x0;
  const double fy = v - y0;
  Color out;
  for (int c = 0; c < 3; ++c) {
    const double top = image.at(x0, y0, c) * (1.0 - fx) + image.at(x1, y0, c) * fx;
    const double bottom = image.at(x0, y1, c) * (1.0 - fx) + image.at(x1, y1, c) * fx;
    out[c] = top * (1.0 - fy) + bottom * fy;
  }
  return out;
}

Vec3 back_project(const CameraModel& camera, const Vec2& pixel, double depth) {
  const Vec3 ray = camera.intrinsics_inverse() * Vec3(pixel.x(), pixel.y(), 1.0);
  const Vec3 x_cam = ray * (depth / ray.z());
  return camera.rotation().transpose() * (x_cam - camera.translation());
}

}  // namespace hazemvs
