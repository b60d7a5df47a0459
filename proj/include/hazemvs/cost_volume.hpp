#pragma once

#include "hazemvs/geometry.hpp"
#include "hazemvs/image.hpp"
#include "hazemvs/scattering.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hazemvs {

inline constexpr double kDefaultGamma = 3.0;

/// A source view: its image and its camera (pose relative to the reference).
struct SourceView {
  ImageBuffer image;
  CameraModel camera;
};

/// W x H x N photometric costs stored plane-major: plane i is a contiguous
/// row-major W x H tile.
class CostVolume {
 public:
  CostVolume() = default;
  CostVolume(int width, int height, std::size_t n_hypotheses, double gamma = kDefaultGamma,
             double fill = 0.0)
      : width_(width), height_(height), n_(n_hypotheses), gamma_(gamma),
        costs_(static_cast<std::size_t>(width) * height * n_hypotheses, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t n_hypotheses() const { return n_; }
  double gamma() const { return gamma_; }
  std::size_t plane_size() const { return static_cast<std::size_t>(width_) * height_; }

  double& at(int x, int y, std::size_t i) { return costs_[i * plane_size() + static_cast<std::size_t>(y) * width_ + x]; }
  double at(int x, int y, std::size_t i) const { return costs_[i * plane_size() + static_cast<std::size_t>(y) * width_ + x]; }

  std::span<double> plane(std::size_t i) { return {costs_.data() + i * plane_size(), plane_size()}; }
  std::span<const double> plane(std::size_t i) const { return {costs_.data() + i * plane_size(), plane_size()}; }

  const std::vector<double>& data() const { return costs_; }
  std::vector<double>& data() { return costs_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::size_t n_ = 0;
  double gamma_ = kDefaultGamma;
  std::vector<double> costs_;
};

struct VolumeOptions {
  double gamma = kDefaultGamma;
  unsigned workers = 1;  // 0: one per hardware thread
};

/// Plane-sweep photometric cost: mean over sources of the L1 colour
/// difference between the reference pixel and the warped source sample.
/// Invalid warps (out of view, behind camera) contribute gamma.
CostVolume build_ordinary(const ImageBuffer& reference, const CameraModel& ref_camera,
                          std::span<const SourceView> sources, const HypothesisSet& hyps,
                          const VolumeOptions& options = {});

/// Dehazing cost volume. For plane z_i the reference is dehazed with z_i and
/// the warped source sample with the plane's depth seen from the source; a
/// source contributes gamma when any dehazed channel leaves [0,1] or the warp
/// is invalid.
CostVolume build_dehazing(const ImageBuffer& reference, const CameraModel& ref_camera,
                          std::span<const SourceView> sources, const HypothesisSet& hyps,
                          const ScatteringParams& params, const VolumeOptions& options = {});

/// The N (depth, cost) pairs at one pixel. Throws InvalidArgument when the
/// pixel or hypothesis count does not fit the volume.
std::vector<std::pair<double, double>> cost_profile(const CostVolume& volume,
                                                    const HypothesisSet& hyps, int x, int y);

}  // namespace hazemvs
