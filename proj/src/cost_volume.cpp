#include "hazemvs/cost_volume.hpp"

#include "hazemvs/errors.hpp"
#include "hazemvs/parallel.hpp"

#include <cmath>
#include <optional>

namespace hazemvs {
namespace {

void check_inputs(const ImageBuffer& reference, const CameraModel& ref_camera,
                  std::span<const SourceView> sources, const HypothesisSet& hyps) {
  if (sources.empty()) throw InvalidArgument("cost volume needs at least one source view");
  if (hyps.size() == 0) throw InvalidArgument("empty hypothesis set");
  if (reference.empty() || reference.width() != ref_camera.width() ||
      reference.height() != ref_camera.height())
    throw InvalidArgument("reference image does not match its camera");
  for (const auto& s : sources)
    if (s.image.empty() || s.image.width() != s.camera.width() || s.image.height() != s.camera.height())
      throw InvalidArgument("source image does not match its camera");
}

// Per-source tables shared by every plane. For reference pixel p the warped
// homogeneous source point at depth z is z * ray[p] + offset.
struct SourceTables {
  const ImageBuffer* image;
  std::vector<Vec3> ray;  // K_s R K_r^-1 (u,v,1)
  Vec3 offset;            // K_s t
};

std::vector<SourceTables> make_tables(const CameraModel& ref_camera,
                                      std::span<const SourceView> sources) {
  std::vector<SourceTables> tables;
  tables.reserve(sources.size());
  const int w = ref_camera.width();
  const int h = ref_camera.height();
  for (const auto& s : sources) {
    const ViewPair pair(ref_camera, s.camera);
    const Mat3 m = pair.k_src * pair.rotation * pair.k_ref_inv;
    SourceTables t{&s.image, {}, pair.k_src * pair.translation};
    t.ray.resize(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) t.ray[static_cast<std::size_t>(y) * w + x] = m * Vec3(x, y, 1.0);
    tables.push_back(std::move(t));
  }
  return tables;
}

struct Sample {
  Color color;
  double source_depth;
};

// Warps and samples one source. The third homogeneous coordinate equals the
// source-frame z of the plane point, which is also the depth at which the
// source pixel's ray meets the swept plane.
std::optional<Sample> warp_sample(const SourceTables& t, std::size_t pixel, double depth) {
  const Vec3 h = depth * t.ray[pixel] + t.offset;
  if (!(h.z() > 0.0)) return std::nullopt;
  const auto color = bilinear_sample(*t.image, Vec2(h.x() / h.z(), h.y() / h.z()));
  if (!color) return std::nullopt;
  return Sample{*color, h.z()};
}

bool in_unit_range(const Color& c) {
  return c[0] >= 0.0 && c[0] <= 1.0 && c[1] >= 0.0 && c[1] <= 1.0 && c[2] >= 0.0 && c[2] <= 1.0;
}

double l1(const Color& a, const Color& b) {
  return std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2]);
}

}  // namespace

CostVolume build_ordinary(const ImageBuffer& reference, const CameraModel& ref_camera,
                          std::span<const SourceView> sources, const HypothesisSet& hyps,
                          const VolumeOptions& options) {
  check_inputs(reference, ref_camera, sources, hyps);
  const auto tables = make_tables(ref_camera, sources);
  const int w = reference.width();
  const int h = reference.height();
  const double n_sources = static_cast<double>(sources.size());
  CostVolume volume(w, h, hyps.size(), options.gamma);

  parallel_for(hyps.size(), options.workers, [&](std::size_t i) {
    const double z = hyps.depth(i);
    auto plane = volume.plane(i);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t p = static_cast<std::size_t>(y) * w + x;
        const Color ref = reference.pixel(x, y);
        double sum = 0.0;
        for (const auto& t : tables) {
          const auto s = warp_sample(t, p, z);
          sum += s ? l1(ref, s->color) : options.gamma;
        }
        plane[p] = sum / n_sources;
      }
    }
  });
  return volume;
}

CostVolume build_dehazing(const ImageBuffer& reference, const CameraModel& ref_camera,
                          std::span<const SourceView> sources, const HypothesisSet& hyps,
                          const ScatteringParams& params, const VolumeOptions& options) {
  check_inputs(reference, ref_camera, sources, hyps);
  params.validate();
  const auto tables = make_tables(ref_camera, sources);
  const int w = reference.width();
  const int h = reference.height();
  const double n_sources = static_cast<double>(sources.size());
  const double a = params.airlight;
  CostVolume volume(w, h, hyps.size(), options.gamma);

  parallel_for(hyps.size(), options.workers, [&](std::size_t i) {
    const double z = hyps.depth(i);
    const double t_ref = std::exp(-params.beta * z);
    auto plane = volume.plane(i);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t p = static_cast<std::size_t>(y) * w + x;
        const Color hazy_ref = reference.pixel(x, y);
        const Color ref(dehaze_channel(hazy_ref[0], a, t_ref), dehaze_channel(hazy_ref[1], a, t_ref),
                        dehaze_channel(hazy_ref[2], a, t_ref));
        const bool ref_ok = in_unit_range(ref);
        double sum = 0.0;
        for (const auto& t : tables) {
          const auto s = warp_sample(t, p, z);
          if (!s || !ref_ok) {
            sum += options.gamma;
            continue;
          }
          const double t_src = std::exp(-params.beta * s->source_depth);
          const Color src(dehaze_channel(s->color[0], a, t_src), dehaze_channel(s->color[1], a, t_src),
                          dehaze_channel(s->color[2], a, t_src));
          sum += in_unit_range(src) ? l1(ref, src) : options.gamma;
        }
        plane[p] = sum / n_sources;
      }
    }
  });
  return volume;
}

std::vector<std::pair<double, double>> cost_profile(const CostVolume& volume,
                                                    const HypothesisSet& hyps, int x, int y) {
  if (x < 0 || y < 0 || x >= volume.width() || y >= volume.height())
    throw InvalidArgument("profile pixel out of range");
  if (hyps.size() != volume.n_hypotheses()) throw InvalidArgument("hypothesis count mismatch");
  std::vector<std::pair<double, double>> out;
  out.reserve(hyps.size());
  for (std::size_t i = 0; i < hyps.size(); ++i) out.emplace_back(hyps.depth(i), volume.at(x, y, i));
  return out;
}

}  // namespace hazemvs
