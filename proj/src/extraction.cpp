#include "hazemvs/extraction.hpp"

#include "hazemvs/errors.hpp"
#include "hazemvs/parallel.hpp"

#include <algorithm>
#include <limits>

namespace hazemvs {

CostVolume aggregate(const CostVolume& volume, int radius, unsigned workers) {
  if (radius < 0) throw InvalidArgument("aggregation radius must be non-negative");
  if (radius == 0) return volume;
  const int w = volume.width();
  const int h = volume.height();
  CostVolume out(w, h, volume.n_hypotheses(), volume.gamma());
  parallel_for(volume.n_hypotheses(), workers, [&](std::size_t i) {
    const auto src = volume.plane(i);
    auto dst = out.plane(i);
    std::vector<double> row_sums(src.size());
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double s = 0.0;
        for (int k = std::max(0, x - radius); k <= std::min(w - 1, x + radius); ++k)
          s += src[static_cast<std::size_t>(y) * w + k];
        row_sums[static_cast<std::size_t>(y) * w + x] = s;
      }
    }
    for (int y = 0; y < h; ++y) {
      const int y0 = std::max(0, y - radius);
      const int y1 = std::min(h - 1, y + radius);
      for (int x = 0; x < w; ++x) {
        const int count_x = std::min(w - 1, x + radius) - std::max(0, x - radius) + 1;
        double s = 0.0;
        for (int k = y0; k <= y1; ++k) s += row_sums[static_cast<std::size_t>(k) * w + x];
        dst[static_cast<std::size_t>(y) * w + x] = s / static_cast<double>(count_x * (y1 - y0 + 1));
      }
    }
  });
  return out;
}

DepthEstimate winner_take_all(const CostVolume& volume, const HypothesisSet& hyps, unsigned workers) {
  if (hyps.size() != volume.n_hypotheses()) throw InvalidArgument("hypothesis count mismatch");
  const int w = volume.width();
  const int h = volume.height();
  const std::size_t n = hyps.size();
  DepthEstimate est{DepthMap(w, h), std::vector<double>(volume.plane_size(), 0.0),
                    std::vector<std::uint32_t>(volume.plane_size(), 0)};
  parallel_for(static_cast<std::size_t>(h), workers, [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < w; ++x) {
      double best = std::numeric_limits<double>::infinity();
      double second = std::numeric_limits<double>::infinity();
      std::size_t best_i = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double c = volume.at(x, y, i);
        if (c < best) {
          second = best;
          best = c;
          best_i = i;
        } else if (c < second) {
          second = c;
        }
      }
      const std::size_t p = static_cast<std::size_t>(y) * w + x;
      est.argmin_index[p] = static_cast<std::uint32_t>(best_i);
      est.confidence[p] = std::isfinite(second) ? second - best : 0.0;
      est.depth.set(x, y, hyps.depth(best_i));
    }
  });
  return est;
}

double subpixel_refine(std::array<double, 3> costs, const HypothesisSet& hyps, std::size_t index) {
  const double unrefined = hyps.depth(index);
  if (index == 0 || index + 1 >= hyps.size()) return unrefined;
  const auto [prev, mid, next] = costs;
  if (!std::isfinite(prev) || !std::isfinite(mid) || !std::isfinite(next)) return unrefined;
  const double curvature = prev - 2.0 * mid + next;
  if (!(curvature > 0.0)) return unrefined;
  // Vertex offset in index units; disparities are uniform so this maps
  // linearly onto disparity.
  const double offset = std::clamp(0.5 * (prev - next) / curvature, -1.0, 1.0);
  const double d = offset < 0.0
                       ? hyps.disparity(index) + offset * (hyps.disparity(index) - hyps.disparity(index - 1))
                       : hyps.disparity(index) + offset * (hyps.disparity(index + 1) - hyps.disparity(index));
  return 1.0 / d;
}

DepthEstimate extract_depth(const CostVolume& volume, const HypothesisSet& hyps,
                            const DepthOptions& options) {
  const CostVolume aggregated = aggregate(volume, options.radius, options.workers);
  DepthEstimate est = winner_take_all(aggregated, hyps, options.workers);
  if (!options.refine) return est;
  const int w = volume.width();
  parallel_for(static_cast<std::size_t>(volume.height()), options.workers, [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < w; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * w + x;
      const std::size_t i = est.argmin_index[p];
      if (i == 0 || i + 1 >= hyps.size()) continue;
      est.depth.set(x, y, subpixel_refine({aggregated.at(x, y, i - 1), aggregated.at(x, y, i),
                                           aggregated.at(x, y, i + 1)},
                                          hyps, i));
    }
  });
  return est;
}

DepthEstimate estimate_depth(const ImageBuffer& reference, const CameraModel& ref_camera,
                             std::span<const SourceView> sources, const HypothesisSet& hyps,
                             const std::optional<ScatteringParams>& params,
                             const DepthOptions& options) {
  const VolumeOptions vo{options.gamma, options.workers};
  const CostVolume volume = params ? build_dehazing(reference, ref_camera, sources, hyps, *params, vo)
                                   : build_ordinary(reference, ref_camera, sources, hyps, vo);
  return extract_depth(volume, hyps, options);
}

}  // namespace hazemvs
