#pragma once

#include "hazemvs/image.hpp"

#include <cmath>

namespace hazemvs {

/// Homogeneous medium with achromatic airlight.
struct ScatteringParams {
  double airlight = 1.0;
  double beta = 0.0;

  /// Throws InvalidArgument unless 0 <= airlight <= 1 and beta >= 0.
  void validate() const;
  bool operator==(const ScatteringParams&) const = default;
};

/// e^{-beta z}. Throws InvalidArgument for negative z.
double transmission(double depth, const ScatteringParams& params);

/// I = J t + A (1 - t) for one channel.
inline double haze_channel(double clear, double airlight, double t) {
  return clear * t + airlight * (1.0 - t);
}

/// J = (I - A) / t + A for one channel; unclamped. With t == 1 the input is
/// returned unchanged so a clear medium is an exact identity.
inline double dehaze_channel(double hazy, double airlight, double t) {
  if (t == 1.0) return hazy;
  return (hazy - airlight) / t + airlight;
}

Color apply_haze(const Color& clear, double depth, const ScatteringParams& params);

/// Hazes every pixel with its own depth. Throws InvalidArgument on a size
/// mismatch or an invalid depth pixel.
ImageBuffer apply_haze(const ImageBuffer& clear, const DepthMap& depth,
                       const ScatteringParams& params);

Color dehaze_with_depth(const Color& hazy, double depth, const ScatteringParams& params);

/// Inverts apply_haze pixelwise. Values may leave [0,1]; invalid depth
/// pixels are passed through untouched.
ImageBuffer dehaze_with_depth(const ImageBuffer& hazy, const DepthMap& depth,
                              const ScatteringParams& params);

}  // namespace hazemvs
