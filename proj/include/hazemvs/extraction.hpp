#pragma once

#include "hazemvs/cost_volume.hpp"
#include "hazemvs/geometry.hpp"
#include "hazemvs/image.hpp"
#include "hazemvs/scattering.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace hazemvs {

struct DepthEstimate {
  DepthMap depth;
  std::vector<double> confidence;       // second-best minus best cost
  std::vector<std::uint32_t> argmin_index;
};

/// Box-filters every plane with a (2r+1)^2 window; border windows shrink to
/// their in-bounds part. Radius 0 returns a copy.
CostVolume aggregate(const CostVolume& volume, int radius, unsigned workers = 1);

/// Per-pixel argmin; ties go to the lower hypothesis index.
DepthEstimate winner_take_all(const CostVolume& volume, const HypothesisSet& hyps,
                              unsigned workers = 1);

/// Parabola through the three costs around `index`, fitted in disparity.
/// Falls back to the unrefined depth at the ends of the set or when the fit
/// is flat or concave.
double subpixel_refine(std::array<double, 3> costs, const HypothesisSet& hyps, std::size_t index);

struct DepthOptions {
  double gamma = kDefaultGamma;
  int radius = 2;
  bool refine = true;
  unsigned workers = 1;
};

/// Full classical pipeline: build the volume (dehazing when params are
/// given, ordinary otherwise), aggregate, winner-take-all, refine.
DepthEstimate estimate_depth(const ImageBuffer& reference, const CameraModel& ref_camera,
                             std::span<const SourceView> sources, const HypothesisSet& hyps,
                             const std::optional<ScatteringParams>& params,
                             const DepthOptions& options = {});

/// Extraction half of estimate_depth, for callers that already hold a volume.
DepthEstimate extract_depth(const CostVolume& volume, const HypothesisSet& hyps,
                            const DepthOptions& options = {});

}  // namespace hazemvs
