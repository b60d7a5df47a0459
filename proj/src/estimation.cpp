#include "hazemvs/estimation.hpp"

#include "hazemvs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace hazemvs {

SparseDepth::SparseDepth(int width, int height)
    : width_(width), height_(height), mask_(static_cast<std::size_t>(width) * height, 0) {
  if (width <= 0 || height <= 0) throw ValidationError("sparse depth dimensions must be positive");
}

SparseDepth::SparseDepth(int width, int height, std::vector<SparseObservation> observations)
    : SparseDepth(width, height) {
  observations_.reserve(observations.size());
  for (const auto& o : observations) add(o);
}

void SparseDepth::add(const SparseObservation& o) {
  if (o.x < 0 || o.y < 0 || o.x >= width_ || o.y >= height_)
    throw ValidationError("sparse observation (" + std::to_string(o.x) + ", " + std::to_string(o.y) +
                          ") out of bounds");
  if (!std::isfinite(o.depth) || !(o.depth > 0.0))
    throw ValidationError("sparse depth must be finite and positive");
  auto& m = mask_[static_cast<std::size_t>(o.y) * width_ + o.x];
  if (m) throw ValidationError("duplicate sparse observation");
  m = 1;
  observations_.push_back(o);
}

bool SparseDepth::observed(int x, int y) const {
  return mask_[static_cast<std::size_t>(y) * width_ + x] != 0;
}

void SearchConfig::validate() const {
  if (!(beta_min < beta_max) || beta_min < 0.0) throw InvalidArgument("need 0 <= beta_min < beta_max");
  if (beta_steps < 1 || refine_steps_airlight < 1 || refine_steps_beta < 1)
    throw InvalidArgument("grid step counts must be >= 1");
  if (delta_airlight < 0.0 || delta_beta < 0.0) throw InvalidArgument("search half-widths must be >= 0");
  if (delta_px < 0) throw InvalidArgument("delta_px must be >= 0");
}

double estimate_airlight(const ImageBuffer& hazy) {
  if (hazy.empty()) throw InvalidArgument("empty image");
  const std::size_t n = hazy.pixel_count();
  const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.001 * n)));
  const auto& d = hazy.data();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto dark = [&](std::size_t p) { return std::min({d[3 * p], d[3 * p + 1], d[3 * p + 2]}); };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double da = dark(a), db = dark(b);
                      return da != db ? da > db : a < b;
                    });
  double sum = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t p = order[j];
    sum += (d[3 * p] + d[3 * p + 1] + d[3 * p + 2]) / 3.0;
  }
  return std::clamp(sum / static_cast<double>(k), 0.0, 1.0);
}

std::optional<double> robust_residual(double sparse_depth, int x, int y, const DepthMap& dense,
                                      int delta_px) {
  const int probes[5][2] = {{x, y}, {x + delta_px, y}, {x - delta_px, y}, {x, y + delta_px}, {x, y - delta_px}};
  std::optional<double> best;
  for (const auto& [px, py] : probes) {
    if (!dense.in_bounds(px, py) || !dense.valid(px, py)) continue;
    const double r = std::abs(sparse_depth - dense.at(px, py));
    if (!best || r < *best) best = r;
  }
  return best;
}

double objective(const SparseDepth& sparse, const DepthMap& dense, int delta_px) {
  if (sparse.empty()) throw NoObservationsError("sparse depth has no observations");
  if (sparse.width() != dense.width() || sparse.height() != dense.height())
    throw InvalidArgument("sparse and dense depth dimensions differ");
  double sum = 0.0;
  bool any = false;
  for (const auto& o : sparse.observations()) {
    if (const auto r = robust_residual(o.depth, o.x, o.y, dense, delta_px)) {
      sum += *r;
      any = true;
    }
  }
  return any ? sum : std::numeric_limits<double>::infinity();
}

std::vector<double> uniform_grid(double lo, double hi, int steps) {
  if (steps < 1) throw InvalidArgument("grid needs at least one step");
  if (steps == 1) return {0.5 * (lo + hi)};
  std::vector<double> g(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    const double a = static_cast<double>(k) / (steps - 1);
    g[static_cast<std::size_t>(k)] = k + 1 == steps ? hi : lo * (1.0 - a) + hi * a;
  }
  return g;
}

EstimationResult grid_search(const ImageBuffer& reference, const CameraModel& ref_camera,
                             std::span<const SourceView> sources, const HypothesisSet& hyps,
                             const SparseDepth& sparse, const SearchConfig& config,
                             const DepthOptions& depth_options, std::optional<double> airlight_init) {
  config.validate();
  if (sparse.empty()) throw NoObservationsError("sparse depth has no observations");
  if (sparse.width() != reference.width() || sparse.height() != reference.height())
    throw InvalidArgument("sparse depth does not match the reference image");

  EstimationResult result;
  result.airlight_init = airlight_init ? std::clamp(*airlight_init, 0.0, 1.0) : estimate_airlight(reference);

  auto evaluate = [&](double airlight, double beta) {
    ++result.evaluations;
    DepthEstimate est = estimate_depth(reference, ref_camera, sources, hyps,
                                       ScatteringParams{airlight, beta}, depth_options);
    const double value = objective(sparse, est.depth, config.delta_px);
    return std::pair{value, std::move(est)};
  };

  // (A0, beta0) lies inside the refinement box but off its uniform grid, so
  // the stage 1 winner enters the final argmin as the incumbent.
  double best_stage1 = std::numeric_limits<double>::infinity();
  DepthEstimate best_stage1_depth;
  result.beta_init = config.beta_min;
  bool have_stage1 = false;
  for (const double beta : uniform_grid(config.beta_min, config.beta_max, config.beta_steps)) {
    auto [value, est] = evaluate(result.airlight_init, beta);
    result.trace.push_back({1, result.airlight_init, beta, value});
    // Strict '<' over an ascending grid keeps the smaller beta on ties.
    if (!have_stage1 || value < best_stage1) {
      best_stage1 = value;
      best_stage1_depth = std::move(est);
      result.beta_init = beta;
      have_stage1 = true;
    }
  }
  result.objective_value = best_stage1;
  result.airlight = result.airlight_init;
  result.beta = result.beta_init;
  result.depth = std::move(best_stage1_depth);

  const double a_lo = std::max(0.0, result.airlight_init - config.delta_airlight);
  const double a_hi = std::min(1.0, result.airlight_init + config.delta_airlight);
  const double b_lo = std::max(0.0, result.beta_init - config.delta_beta);
  const double b_hi = result.beta_init + config.delta_beta;
  const auto a_grid = uniform_grid(a_lo, a_hi, config.refine_steps_airlight);
  const auto b_grid = uniform_grid(b_lo, b_hi, config.refine_steps_beta);

  auto better = [&](double value, double airlight, double beta) {
    if (value != result.objective_value) return value < result.objective_value;
    if (beta != result.beta) return beta < result.beta;
    return airlight < result.airlight;
  };
  for (const double beta : b_grid) {
    for (const double airlight : a_grid) {
      auto [value, est] = evaluate(airlight, beta);
      result.trace.push_back({2, airlight, beta, value});
      if (better(value, airlight, beta)) {
        result.objective_value = value;
        result.airlight = airlight;
        result.beta = beta;
        result.depth = std::move(est);
      }
    }
  }
  return result;
}

}  // namespace hazemvs
