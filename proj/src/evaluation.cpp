#include "hazemvs/evaluation.hpp"

#include "hazemvs/errors.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

namespace hazemvs {
namespace {

struct Pair {
  double pred;
  double gt;
};

std::vector<Pair> overlap(const DepthMap& pred, const DepthMap& gt, std::span<const unsigned char> mask) {
  if (pred.width() != gt.width() || pred.height() != gt.height())
    throw InvalidArgument("depth map dimensions differ");
  if (!mask.empty() && mask.size() != gt.size()) throw InvalidArgument("mask size mismatch");
  std::vector<Pair> out;
  out.reserve(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!mask.empty() && !mask[i]) continue;
    if (pred.valid(i) && gt.valid(i)) out.push_back({pred.at(i), gt.at(i)});
  }
  if (out.empty()) throw NoPixelsError("no pixels valid in both depth maps");
  return out;
}

}  // namespace

double l1_rel(const DepthMap& pred, const DepthMap& gt, std::span<const unsigned char> mask) {
  const auto px = overlap(pred, gt, mask);
  double s = 0.0;
  for (const auto& p : px) s += std::abs(p.gt - p.pred) / p.gt;
  return s / static_cast<double>(px.size());
}

double l1_inv(const DepthMap& pred, const DepthMap& gt, std::span<const unsigned char> mask) {
  const auto px = overlap(pred, gt, mask);
  double s = 0.0;
  for (const auto& p : px) s += std::abs(1.0 / p.gt - 1.0 / p.pred);
  return s / static_cast<double>(px.size());
}

double sc_inv(const DepthMap& pred, const DepthMap& gt, std::span<const unsigned char> mask) {
  const auto px = overlap(pred, gt, mask);
  // Centre the log ratios first; the two-sum form cancels badly.
  const double n = static_cast<double>(px.size());
  std::vector<double> d(px.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < px.size(); ++i) {
    d[i] = std::log(px[i].pred) - std::log(px[i].gt);
    mean += d[i];
  }
  mean /= n;
  double var = 0.0;
  for (const double v : d) var += (v - mean) * (v - mean);
  return std::sqrt(var / n);
}

double correct_pct(const DepthMap& pred, const DepthMap& gt, std::span<const unsigned char> mask) {
  const auto px = overlap(pred, gt, mask);
  std::size_t ok = 0;
  for (const auto& p : px)
    if (std::abs(p.gt - p.pred) / p.gt <= 0.10) ++ok;
  return 100.0 * static_cast<double>(ok) / static_cast<double>(px.size());
}

MetricsReport evaluate(const DepthMap& pred, const DepthMap& gt, std::span<const unsigned char> mask) {
  MetricsReport r;
  r.l1_rel = l1_rel(pred, gt, mask);
  r.l1_inv = l1_inv(pred, gt, mask);
  r.sc_inv = sc_inv(pred, gt, mask);
  r.correct_pct = correct_pct(pred, gt, mask);
  r.n_pixels = overlap(pred, gt, mask).size();
  return r;
}

std::string MetricsReport::to_key_value() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "L1-rel: %.6f\nL1-inv: %.6f\nsc-inv: %.6f\nC.P.: %.2f\npixels: %zu\n",
                l1_rel, l1_inv, sc_inv, correct_pct, n_pixels);
  return buf;
}

std::string MetricsReport::csv_header() { return "l1_rel,l1_inv,sc_inv,correct_pct,n_pixels"; }

std::string MetricsReport::to_csv_row() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.6g,%zu", l1_rel, l1_inv, sc_inv, correct_pct, n_pixels);
  return buf;
}

}  // namespace hazemvs
