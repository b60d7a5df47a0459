#include "hazemvs/synthesis.hpp"

#include "hazemvs/errors.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace hazemvs {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double lattice(std::int64_t ix, std::int64_t iy, std::int64_t iz, std::uint64_t seed) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(ix));
  h = splitmix64(h ^ static_cast<std::uint64_t>(iy));
  h = splitmix64(h ^ static_cast<std::uint64_t>(iz));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

double value_noise(const Vec3& p, std::uint64_t seed) {
  const double fx = std::floor(p.x()), fy = std::floor(p.y()), fz = std::floor(p.z());
  const auto ix = static_cast<std::int64_t>(fx), iy = static_cast<std::int64_t>(fy),
             iz = static_cast<std::int64_t>(fz);
  const double tx = fade(p.x() - fx), ty = fade(p.y() - fy), tz = fade(p.z() - fz);
  double acc = 0.0;
  for (int dz = 0; dz < 2; ++dz)
    for (int dy = 0; dy < 2; ++dy)
      for (int dx = 0; dx < 2; ++dx) {
        const double wgt = (dx ? tx : 1 - tx) * (dy ? ty : 1 - ty) * (dz ? tz : 1 - tz);
        acc += wgt * lattice(ix + dx, iy + dy, iz + dz, seed);
      }
  return acc;
}

double fractal(const TextureSpec& tex, const Vec3& p, std::uint64_t seed) {
  double amp = 1.0, freq = tex.base_frequency, sum = 0.0, norm = 0.0;
  for (int o = 0; o < tex.octaves; ++o) {
    sum += amp * value_noise(p * freq, seed + 0x51ed27ULL * static_cast<std::uint64_t>(o + 1));
    norm += amp;
    amp *= tex.persistence;
    freq *= 2.0;
  }
  return sum / norm;
}

std::optional<double> intersect(const PlanePrimitive& plane, const Vec3& o, const Vec3& d) {
  const double denom = plane.normal.dot(d);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const double lambda = plane.normal.dot(plane.point - o) / denom;
  if (!(lambda > 1e-9)) return std::nullopt;
  if (plane.bounded) {
    const Vec3 x = o + lambda * d;
    if (x.x() < plane.x_min || x.x() > plane.x_max || x.y() < plane.y_min || x.y() > plane.y_max)
      return std::nullopt;
  }
  return lambda;
}

std::optional<double> intersect(const SpherePrimitive& s, const Vec3& o, const Vec3& d) {
  const Vec3 oc = o - s.center;
  const double a = d.squaredNorm();
  const double b = oc.dot(d);
  const double c = oc.squaredNorm() - s.radius * s.radius;
  const double disc = b * b - a * c;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  for (const double lambda : {(-b - root) / a, (-b + root) / a})
    if (lambda > 1e-9) return lambda;
  return std::nullopt;
}

}  // namespace

Color texture_color(const TextureSpec& texture, const Vec3& point, std::uint64_t seed) {
  const std::uint64_t s = splitmix64(texture.seed ^ splitmix64(seed));
  const double shared = fractal(texture, point, s);
  Color c;
  for (int ch = 0; ch < 3; ++ch) {
    const double own = fractal(texture, point + Vec3(17.3, -5.1, 9.7) * (ch + 1), s + 101 * (ch + 1));
    // Stretch the noise around its mean to recover contrast lost to averaging.
    const double v = std::clamp(0.5 + 2.0 * (0.6 * shared + 0.4 * own - 0.5), 0.0, 1.0);
    c[ch] = texture.albedo_min + (texture.albedo_max - texture.albedo_min) * v;
  }
  return c;
}

std::optional<std::pair<double, int>> cast_ray(const SceneSpec& spec, const Vec3& origin,
                                               const Vec3& direction) {
  double best = std::numeric_limits<double>::infinity();
  int best_id = -1;
  for (std::size_t k = 0; k < spec.primitives.size(); ++k) {
    const auto hit = std::visit([&](const auto& prim) { return intersect(prim, origin, direction); },
                                spec.primitives[k]);
    if (hit && *hit < best) {
      best = *hit;
      best_id = static_cast<int>(k);
    }
  }
  if (spec.background_depth > 0.0) {
    PlanePrimitive bg;
    bg.point = Vec3(0, 0, spec.background_depth);
    if (const auto hit = intersect(bg, origin, direction); hit && *hit < best) {
      best = *hit;
      best_id = static_cast<int>(spec.primitives.size());
    }
  }
  if (best_id < 0) return std::nullopt;
  return std::pair{best, best_id};
}

RenderResult render(const SceneSpec& spec, const CameraModel& camera, std::uint64_t seed) {
  const int w = camera.width(), h = camera.height();
  RenderResult out{ImageBuffer(w, h), DepthMap(w, h), std::vector<int>(static_cast<std::size_t>(w) * h, -1)};
  const Vec3 origin = camera.center();
  const Mat3 rt = camera.rotation().transpose();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Vec3 d_cam = camera.intrinsics_inverse() * Vec3(x, y, 1.0);
      const Vec3 d_ref = rt * d_cam;
      const auto hit = cast_ray(spec, origin, d_ref);
      if (!hit) throw InvalidSpecError("ray through pixel (" + std::to_string(x) + ", " +
                                       std::to_string(y) + ") hits no surface");
      const Vec3 point = origin + hit->first * d_ref;
      out.depth.set(x, y, hit->first * d_cam.z());
      out.image.set_pixel(x, y, texture_color(spec.texture, point, seed));
      out.surface[static_cast<std::size_t>(y) * w + x] = hit->second;
    }
  }
  return out;
}

std::vector<unsigned char> visibility_mask(const SceneSpec& spec, const CameraModel& reference,
                                           const DepthMap& ref_depth, const CameraModel& source) {
  const int w = reference.width(), h = reference.height();
  std::vector<unsigned char> mask(static_cast<std::size_t>(w) * h, 0);
  const Vec3 src_center = source.center();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!ref_depth.valid(x, y)) continue;
      const Vec3 point = back_project(reference, Vec2(x, y), ref_depth.at(x, y));
      const Vec3 x_src = source.rotation() * point + source.translation();
      if (!(x_src.z() > 0.0)) continue;
      const Vec3 px = source.intrinsics() * x_src;
      const double u = px.x() / px.z(), v = px.y() / px.z();
      if (!(u >= 0.0 && u <= source.width() - 1 && v >= 0.0 && v <= source.height() - 1)) continue;
      const Vec3 dir = point - src_center;
      const auto hit = cast_ray(spec, src_center, dir);
      if (hit && std::abs(hit->first - 1.0) < 1e-6) mask[static_cast<std::size_t>(y) * w + x] = 1;
    }
  }
  return mask;
}

std::pair<double, double> sample_beta_range_from_depth(double median_depth) {
  if (!(median_depth > 0.0)) throw InvalidArgument("median depth must be positive");
  return {-std::log(0.4) / median_depth, -std::log(0.2) / median_depth};
}

double median_depth(const DepthMap& depth) {
  std::vector<double> v;
  for (std::size_t i = 0; i < depth.size(); ++i)
    if (depth.valid(i)) v.push_back(depth.at(i));
  if (v.empty()) throw InvalidArgument("depth map has no valid pixels");
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  return 0.5 * (upper + *std::max_element(v.begin(), mid));
}

DatasetSample make_sample(const SceneSpec& spec, const CameraModel& ref_camera,
                          const CameraModel& src_camera, const SampleConfig& config,
                          std::uint64_t seed) {
  if (!(config.sparse_fraction > 0.0 && config.sparse_fraction <= 1.0))
    throw InvalidArgument("sparse fraction must lie in (0,1]");
  if (config.edge_jitter_fraction < 0.0 || config.edge_jitter_fraction > 1.0)
    throw InvalidArgument("edge jitter fraction must lie in [0,1]");
  if (!(config.sparse_min_transmission >= 0.0 && config.sparse_min_transmission <= 1.0))
    throw InvalidArgument("sparse transmission floor must lie in [0,1]");
  std::mt19937_64 rng(seed);
  DatasetSample s;
  s.seed = seed;
  s.ref_camera = ref_camera;
  s.src_camera = src_camera;
  if (config.params) {
    s.params = *config.params;
  } else {
    s.params.airlight = std::uniform_real_distribution<double>(config.airlight_min, config.airlight_max)(rng);
    s.params.beta = std::uniform_real_distribution<double>(config.beta_min, config.beta_max)(rng);
  }
  s.params.validate();

  const RenderResult ref = render(spec, ref_camera, seed);
  const RenderResult src = render(spec, src_camera, seed);
  s.clear_reference = ref.image;
  s.clear_source = src.image;
  s.gt_depth = ref.depth;
  s.gt_source_depth = src.depth;
  s.reference = apply_haze(ref.image, ref.depth, s.params);
  s.source = apply_haze(src.image, src.depth, s.params);
  s.visible = visibility_mask(spec, ref_camera, ref.depth, src_camera);

  const int w = ref_camera.width(), h = ref_camera.height();
  const std::size_t n_pixels = static_cast<std::size_t>(w) * h;
  std::vector<std::size_t> order;
  for (std::size_t p = 0; p < n_pixels; ++p)
    if ((!config.sparse_visible_only || s.visible[p]) && transmission(ref.depth.at(p), s.params) >= config.sparse_min_transmission)
      order.push_back(p);
  if (order.empty()) throw NoObservationsError("no pixel qualifies for a sparse observation");
  const auto n_obs = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(config.sparse_fraction * static_cast<double>(order.size()) - 1e-9)));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_obs));
  std::vector<double> obs_depth(n_obs);
  for (std::size_t k = 0; k < n_obs; ++k) obs_depth[k] = ref.depth.at(chosen[k]);

  if (config.edge_jitter_fraction > 0.0) {
    // Background pixels with a nearer surface among their delta probes.
    const int d = config.jitter_delta_px;
    std::vector<std::pair<std::size_t, double>> candidates;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double z = ref.depth.at(x, y);
        double fg = z;
        for (const auto& [px, py] : {std::pair{x + d, y}, {x - d, y}, {x, y + d}, {x, y - d}})
          if (ref.depth.in_bounds(px, py)) fg = std::min(fg, ref.depth.at(px, py));
        if (fg < 0.9 * z) candidates.emplace_back(static_cast<std::size_t>(y) * w + x, fg);
      }
    }
    std::vector<unsigned char> taken(n_pixels, 0);
    for (const auto p : chosen) taken[p] = 1;
    std::shuffle(candidates.begin(), candidates.end(), rng);
    const auto n_jit = static_cast<std::size_t>(std::llround(config.edge_jitter_fraction * static_cast<double>(n_obs)));
    std::vector<unsigned char> jittered(n_obs, 0);
    std::size_t replaced = 0;
    std::size_t tail = n_obs;
    for (const auto& [p, fg] : candidates) {
      if (replaced == n_jit) break;
      std::size_t slot;
      if (taken[p]) {
        // Already observed: overwrite in place.
        slot = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), p) - chosen.begin());
      } else {
        // Swap out the last observation of the shuffled list not yet jittered.
        do --tail;
        while (jittered[tail]);
        slot = tail;
        taken[chosen[slot]] = 0;
        chosen[slot] = p;
        taken[p] = 1;
      }
      obs_depth[slot] = fg;
      jittered[slot] = 1;
      ++replaced;
    }
  }

  s.sparse = SparseDepth(w, h);
  for (std::size_t k = 0; k < n_obs; ++k)
    s.sparse.add({static_cast<int>(chosen[k] % w), static_cast<int>(chosen[k] / w), obs_depth[k]});
  return s;
}

DatasetSample augment_scale(const DatasetSample& sample, double k) {
  if (!(k > 0.0)) throw InvalidArgument("scale factor must be positive");
  DatasetSample out = sample;
  auto scale_map = [k](const DepthMap& m) {
    DepthMap r(m.width(), m.height());
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m.valid(i)) r.set(i, m.at(i) * k);
    return r;
  };
  out.gt_depth = scale_map(sample.gt_depth);
  out.gt_source_depth = scale_map(sample.gt_source_depth);
  out.ref_camera = sample.ref_camera.with_pose(sample.ref_camera.rotation(), sample.ref_camera.translation() * k);
  out.src_camera = sample.src_camera.with_pose(sample.src_camera.rotation(), sample.src_camera.translation() * k);
  out.params.beta = sample.params.beta / k;
  out.sparse = SparseDepth(sample.sparse.width(), sample.sparse.height());
  for (auto o : sample.sparse.observations()) {
    o.depth *= k;
    out.sparse.add(o);
  }
  return out;
}

std::pair<CameraModel, CameraModel> standard_rig(int width, int height) {
  const double focal = 80.0 * width / 96.0;
  const CameraModel ref = CameraModel::pinhole(focal, 0.5 * (width - 1), 0.5 * (height - 1), width, height);
  const Mat3 r = Eigen::AngleAxisd(-4.0 * M_PI / 180.0, Vec3::UnitY()).toRotationMatrix();
  const Vec3 center(0.6, 0.05, -0.6);
  return {ref, ref.with_pose(r, -r * center)};
}

SceneSpec random_scene(std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed ^ 0x5ce7e5ULL));
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  SceneSpec spec;
  spec.texture.seed = splitmix64(seed);
  // Far plane seen through a window in the top-right corner of a back wall.
  spec.background_depth = uni(15.0, 25.0);
  const double wall = uni(3.0, 4.5);
  const double big = 1e3;
  const double win_x = uni(0.25, 0.4) * wall, win_y = -uni(0.2, 0.3) * wall;
  auto rect = [](Vec3 point, Vec3 normal, double x0, double x1, double y0, double y1) {
    PlanePrimitive p;
    p.point = point;
    p.normal = normal.normalized();
    p.bounded = true;
    p.x_min = x0;
    p.x_max = x1;
    p.y_min = y0;
    p.y_max = y1;
    return p;
  };
  spec.primitives.emplace_back(rect(Vec3(0, 0, wall), Vec3::UnitZ(), -big, win_x, -big, big));
  spec.primitives.emplace_back(rect(Vec3(0, 0, wall), Vec3::UnitZ(), win_x, big, win_y, big));

  const int n_rects = 2 + static_cast<int>(rng() % 2);
  for (int k = 0; k < n_rects; ++k) {
    const double z = uni(1.3, 0.85 * wall);
    const double cx = uni(-0.5, 0.4) * z, cy = uni(-0.3, 0.35) * z;
    const double hw = uni(0.15, 0.3) * z, hh = uni(0.12, 0.25) * z;
    spec.primitives.emplace_back(rect(Vec3(cx, cy, z), Vec3::UnitZ(), cx - hw, cx + hw, cy - hh, cy + hh));
  }
  {
    // Floor rising toward the wall in the lower part of the view.
    const double z = uni(0.7, 0.9) * wall;
    spec.primitives.emplace_back(rect(Vec3(0, 0.3 * z, z), Vec3(0, 1.0, uni(0.4, 0.8)), -big, big, 0.1 * z, big));
  }
  {
    SpherePrimitive s;
    const double z = uni(1.5, 0.8 * wall);
    s.center = Vec3(uni(-0.4, 0.3) * z, uni(-0.2, 0.2) * z, z);
    s.radius = uni(0.12, 0.2) * z;
    spec.primitives.emplace_back(s);
  }
  return spec;
}

SceneSpec plane_scene(double depth, std::uint64_t seed) {
  SceneSpec spec;
  spec.texture.seed = splitmix64(seed);
  spec.background_depth = depth;
  return spec;
}

}  // namespace hazemvs
