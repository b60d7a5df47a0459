#include "hazemvs/scattering.hpp"

#include "hazemvs/errors.hpp"

namespace hazemvs {

void ScatteringParams::validate() const {
  if (!(airlight >= 0.0 && airlight <= 1.0)) throw InvalidArgument("airlight must lie in [0,1]");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be finite and >= 0");
}

double transmission(double depth, const ScatteringParams& params) {
  if (!(depth >= 0.0)) throw InvalidArgument("depth must be non-negative");
  return std::exp(-params.beta * depth);
}

Color apply_haze(const Color& clear, double depth, const ScatteringParams& params) {
  const double t = transmission(depth, params);
  return {haze_channel(clear[0], params.airlight, t), haze_channel(clear[1], params.airlight, t),
          haze_channel(clear[2], params.airlight, t)};
}

ImageBuffer apply_haze(const ImageBuffer& clear, const DepthMap& depth,
                       const ScatteringParams& params) {
  if (clear.width() != depth.width() || clear.height() != depth.height())
    throw InvalidArgument("image and depth dimensions differ");
  ImageBuffer out(clear.width(), clear.height());
  for (int y = 0; y < clear.height(); ++y) {
    for (int x = 0; x < clear.width(); ++x) {
      if (!depth.valid(x, y)) throw InvalidArgument("apply_haze needs valid depth everywhere");
      out.set_pixel(x, y, apply_haze(clear.pixel(x, y), depth.at(x, y), params));
    }
  }
  return out;
}

Color dehaze_with_depth(const Color& hazy, double depth, const ScatteringParams& params) {
  const double t = std::exp(-params.beta * depth);
  return {dehaze_channel(hazy[0], params.airlight, t), dehaze_channel(hazy[1], params.airlight, t),
          dehaze_channel(hazy[2], params.airlight, t)};
}

ImageBuffer dehaze_with_depth(const ImageBuffer& hazy, const DepthMap& depth,
                              const ScatteringParams& params) {
  if (hazy.width() != depth.width() || hazy.height() != depth.height())
    throw InvalidArgument("image and depth dimensions differ");
  ImageBuffer out = hazy;
  for (int y = 0; y < hazy.height(); ++y)
    for (int x = 0; x < hazy.width(); ++x)
      if (depth.valid(x, y)) out.set_pixel(x, y, dehaze_with_depth(hazy.pixel(x, y), depth.at(x, y), params));
  return out;
}

}  // namespace hazemvs
