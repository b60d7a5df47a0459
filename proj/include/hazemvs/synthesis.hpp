#pragma once

#include "hazemvs/estimation.hpp"
#include "hazemvs/geometry.hpp"
#include "hazemvs/image.hpp"
#include "hazemvs/scattering.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace hazemvs {

/// Plane through `point` with normal `normal`. When `bounded`, hits are kept
/// only inside [x_min,x_max] x [y_min,y_max] of the reference frame.
struct PlanePrimitive {
  Vec3 point = Vec3(0, 0, 1);
  Vec3 normal = Vec3(0, 0, 1);
  bool bounded = false;
  double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
};

struct SpherePrimitive {
  Vec3 center = Vec3(0, 0, 4);
  double radius = 1.0;
};

using Primitive = std::variant<PlanePrimitive, SpherePrimitive>;

/// Multi-octave value noise evaluated on 3D surface points, so every view
/// sees the same colour at the same point.
struct TextureSpec {
  std::uint64_t seed = 1;
  int octaves = 3;
  double base_frequency = 2.0;  // lattice cells per scene unit
  double persistence = 0.5;
  double albedo_min = 0.05;
  double albedo_max = 0.7;
};

struct SceneSpec {
  std::vector<Primitive> primitives;
  TextureSpec texture;
  /// Infinite fronto-parallel plane behind everything; <= 0 disables it.
  double background_depth = 10.0;
};

struct RenderResult {
  ImageBuffer image;
  DepthMap depth;
  /// Index of the primitive hit per pixel; the background has index == primitives.size().
  std::vector<int> surface;
};

/// Ray-casts the scene from `camera`. Throws InvalidSpecError when a pixel
/// ray hits nothing.
RenderResult render(const SceneSpec& spec, const CameraModel& camera, std::uint64_t seed = 0);

/// Albedo at a reference-frame point.
Color texture_color(const TextureSpec& texture, const Vec3& point, std::uint64_t seed = 0);

/// Nearest hit along a ray in the reference frame; nullopt when nothing is hit.
std::optional<std::pair<double, int>> cast_ray(const SceneSpec& spec, const Vec3& origin,
                                               const Vec3& direction);

/// Reference pixels whose surface point is inside the source image and not
/// occluded there.
std::vector<unsigned char> visibility_mask(const SceneSpec& spec, const CameraModel& reference,
                                           const DepthMap& ref_depth, const CameraModel& source);

/// Beta range giving median transmission in [0.2, 0.4].
std::pair<double, double> sample_beta_range_from_depth(double median_depth);

struct SampleConfig {
  double airlight_min = 0.7;
  double airlight_max = 1.0;
  double beta_min = 0.4;
  double beta_max = 0.8;
  /// Share of eligible pixels that receive a sparse observation. By default
  /// every pixel is eligible; the two filters below mimic what a two-view
  /// reconstruction can actually triangulate.
  double sparse_fraction = 0.1;
  bool sparse_visible_only = false;
  double sparse_min_transmission = 0.0;
  /// Fraction of sparse observations moved onto background pixels next to a
  /// depth edge, carrying the foreground depth found within `jitter_delta_px`.
  double edge_jitter_fraction = 0.0;
  int jitter_delta_px = 5;
  /// Fixed parameters instead of random draws.
  std::optional<ScatteringParams> params;
};

struct DatasetSample {
  ImageBuffer reference;
  ImageBuffer source;
  ImageBuffer clear_reference;
  ImageBuffer clear_source;
  DepthMap gt_depth;
  DepthMap gt_source_depth;
  CameraModel ref_camera;
  CameraModel src_camera;
  ScatteringParams params;
  SparseDepth sparse;
  std::vector<unsigned char> visible;
  std::uint64_t seed = 0;

  std::vector<SourceView> sources() const { return {SourceView{source, src_camera}}; }
};

DatasetSample make_sample(const SceneSpec& spec, const CameraModel& ref_camera,
                          const CameraModel& src_camera, const SampleConfig& config,
                          std::uint64_t seed);

/// Scales depth and camera translation by k and beta by 1/k; images unchanged.
DatasetSample augment_scale(const DatasetSample& sample, double k);

/// The benchmark rig: a reference camera and a source camera displaced
/// sideways and backwards with a slight inward yaw.
std::pair<CameraModel, CameraModel> standard_rig(int width = 96, int height = 72);

/// Random layered scene: far background plus a handful of bounded planes,
/// a slanted plane and a sphere at 2-6 scene units.
SceneSpec random_scene(std::uint64_t seed);

/// Single textured fronto-parallel plane.
SceneSpec plane_scene(double depth, std::uint64_t seed);

/// Median of the valid pixels of a depth map.
double median_depth(const DepthMap& depth);

}  // namespace hazemvs
