#pragma once

#include "hazemvs/cost_volume.hpp"
#include "hazemvs/extraction.hpp"
#include "hazemvs/geometry.hpp"
#include "hazemvs/image.hpp"
#include "hazemvs/scattering.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace hazemvs {

struct SparseObservation {
  int x = 0;
  int y = 0;
  double depth = 0.0;
  bool operator==(const SparseObservation&) const = default;
};

/// Metric depth observations at scattered pixels, at most one per pixel.
class SparseDepth {
 public:
  SparseDepth() = default;
  SparseDepth(int width, int height);
  /// Validates every observation; throws ValidationError on out-of-bounds
  /// pixels, non-positive depths or duplicates.
  SparseDepth(int width, int height, std::vector<SparseObservation> observations);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return observations_.empty(); }
  std::size_t size() const { return observations_.size(); }
  const std::vector<SparseObservation>& observations() const { return observations_; }

  void add(const SparseObservation& obs);
  bool observed(int x, int y) const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<SparseObservation> observations_;
  std::vector<unsigned char> mask_;
};

struct SearchConfig {
  double beta_min = 0.4;
  double beta_max = 0.8;
  int beta_steps = 10;
  double delta_airlight = 0.05;
  double delta_beta = 0.05;
  int refine_steps_airlight = 4;
  int refine_steps_beta = 4;
  int delta_px = 5;

  void validate() const;
  /// Closed-form number of depth-pipeline runs.
  int evaluation_budget() const { return beta_steps + refine_steps_airlight * refine_steps_beta; }
};

struct SearchSample {
  int stage = 1;
  double airlight = 0.0;
  double beta = 0.0;
  double objective = 0.0;
};

struct EstimationResult {
  double airlight = 0.0;
  double beta = 0.0;
  DepthEstimate depth;
  double objective_value = 0.0;
  int evaluations = 0;
  double airlight_init = 0.0;
  double beta_init = 0.0;
  std::vector<SearchSample> trace;
};

/// Initial airlight: mean colour of the brightest 0.1% of pixels ranked by
/// their smallest channel, clamped to [0,1].
double estimate_airlight(const ImageBuffer& hazy);

/// Smallest |z_sparse - z_dense| over the pixel and its four neighbours at
/// distance delta_px. Probes outside the image or invalid in `dense` are
/// skipped; nullopt when every probe is skipped.
std::optional<double> robust_residual(double sparse_depth, int x, int y, const DepthMap& dense,
                                      int delta_px);

/// Sum of robust residuals over the observations. +inf when no observation
/// contributes; throws NoObservationsError for an empty set.
double objective(const SparseDepth& sparse, const DepthMap& dense, int delta_px);

/// Two-stage grid search over (airlight, beta). `airlight_init` replaces the
/// bright-pixel estimate when given.
EstimationResult grid_search(const ImageBuffer& reference, const CameraModel& ref_camera,
                             std::span<const SourceView> sources, const HypothesisSet& hyps,
                             const SparseDepth& sparse, const SearchConfig& config,
                             const DepthOptions& depth_options = {},
                             std::optional<double> airlight_init = std::nullopt);

/// Inclusive uniform grid of `steps` values over [lo, hi]; a single step
/// yields the midpoint.
std::vector<double> uniform_grid(double lo, double hi, int steps);

}  // namespace hazemvs
