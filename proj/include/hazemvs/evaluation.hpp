#pragma once

#include "hazemvs/image.hpp"

#include <cstddef>
#include <span>
#include <string>

namespace hazemvs {

struct MetricsReport {
  double l1_rel = 0.0;
  double l1_inv = 0.0;
  double sc_inv = 0.0;
  double correct_pct = 0.0;
  std::size_t n_pixels = 0;

  /// "key: value" lines.
  std::string to_key_value() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

// Each metric runs over pixels valid (finite, positive) in both maps and, when
// a mask is given, non-zero in it. All throw NoPixelsError when that set is
// empty and InvalidArgument on a size mismatch.

/// mean |z_gt - z| / z_gt
double l1_rel(const DepthMap& pred, const DepthMap& gt, std::span<const unsigned char> mask = {});
/// mean |1/z_gt - 1/z|
double l1_inv(const DepthMap& pred, const DepthMap& gt, std::span<const unsigned char> mask = {});
/// Scale-invariant log error: sqrt(mean(d^2) - mean(d)^2), d = ln z - ln z_gt.
double sc_inv(const DepthMap& pred, const DepthMap& gt, std::span<const unsigned char> mask = {});
/// Percentage of pixels with relative error <= 10% (inclusive).
double correct_pct(const DepthMap& pred, const DepthMap& gt, std::span<const unsigned char> mask = {});

MetricsReport evaluate(const DepthMap& pred, const DepthMap& gt, std::span<const unsigned char> mask = {});

}  // namespace hazemvs
