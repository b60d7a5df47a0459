// Acceptance harness: one line per criterion, exit status 1 if any fails.
//
//   acceptance                 run everything
//   acceptance --criterion 6   run one

#include "oracles.hpp"

#include "hazemvs/cost_volume.hpp"
#include "hazemvs/errors.hpp"
#include "hazemvs/estimation.hpp"
#include "hazemvs/evaluation.hpp"
#include "hazemvs/extraction.hpp"
#include "hazemvs/scattering.hpp"
#include "hazemvs/synthesis.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

using namespace hazemvs;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

const HypothesisSet& default_hyps() {
  static const HypothesisSet h = make_hypotheses(256, 0.02, 2.0);
  return h;
}

// Sparse observations restricted to what a two-view reconstruction could
// triangulate: co-visible pixels whose transmission leaves usable contrast.
SampleConfig benchmark_config() {
  SampleConfig cfg;
  cfg.sparse_visible_only = true;
  cfg.sparse_min_transmission = 0.05;
  return cfg;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// 1
Outcome model_exactness() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = 100000;
  int within = 0, well_conditioned = 0, well_conditioned_within = 0;
  double worst = 0.0, worst_t = 1.0;
  Stopwatch sw;
  for (int k = 0; k < n; ++k) {
    const Color j(unit(rng), unit(rng), unit(rng));
    const double z = 0.1 + 99.9 * unit(rng);
    const ScatteringParams p{0.7 + 0.3 * unit(rng), 2.0 * unit(rng)};
    const double t = transmission(z, p);
    const double e = (dehaze_with_depth(apply_haze(j, z, p), z, p) - j).cwiseAbs().maxCoeff();
    within += e <= 1e-9;
    if (t >= 1e-6) {
      ++well_conditioned;
      well_conditioned_within += e <= 1e-9;
    }
    if (e > worst) {
      worst = e;
      worst_t = t;
    }
  }
  const double secs = sw.seconds();
  return {within == n && secs < 1.0,
          fmt("%d/%d pixels within 1e-9; worst error %.3g at t=%.3g; %d/%d pixels with t>=1e-6 within 1e-9; %.3fs",
              within, n, worst, worst_t, well_conditioned_within, well_conditioned, secs)};
}

// 2
Outcome scale_invariance() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const Color j(unit(rng), unit(rng), unit(rng));
    const double z = 0.1 + 99.9 * unit(rng);
    const ScatteringParams p{0.7 + 0.3 * unit(rng), 2.0 * unit(rng)};
    for (double s : {0.5, 1.5}) {
      const Color a = apply_haze(j, s * z, {p.airlight, p.beta / s});
      const Color b = apply_haze(j, z, p);
      worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-12, fmt("max deviation %.3g over 2x100000 pixels", worst)};
}

std::vector<SourceView> random_sources(const CameraModel& ref, int w, int h, int count, std::mt19937_64& rng) {
  std::vector<SourceView> out;
  for (int s = 0; s < count; ++s) {
    auto [r, src] = oracle::random_rig(w, h, rng);
    (void)r;
    // random_rig draws its own intrinsics; keep the reference's.
    out.push_back({oracle::random_image(w, h, rng, 0.3, 1.0), CameraModel(ref.intrinsics(), src.rotation(), src.translation(), w, h)});
  }
  return out;
}

// 3
Outcome degeneration() {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  const int trials = 20;
  for (int k = 0; k < trials; ++k) {
    auto [ref, unused] = oracle::random_rig(16, 12, rng);
    (void)unused;
    const ImageBuffer img = oracle::random_image(16, 12, rng, 0.3, 1.0);
    const auto sources = random_sources(ref, 16, 12, 2, rng);
    const auto hyps = make_hypotheses(8, 0.1, 1.5);
    const ScatteringParams p{0.7 + 0.3 * std::uniform_real_distribution<double>(0, 1)(rng), 0.0};
    const CostVolume a = build_dehazing(img, ref, sources, hyps, p);
    const CostVolume b = build_ordinary(img, ref, sources, hyps);
    worst = std::max(worst, max_abs_diff(a.data(), b.data()));
  }
  return {worst <= 1e-12, fmt("max |dehazing(beta=0) - ordinary| = %.3g over %d instances of 16x12, N=8, S=2", worst, trials)};
}

// 4
Outcome oracle_equivalence() {
  std::mt19937_64 rng(4);
  double worst_ord = 0.0, worst_deh = 0.0;
  const int trials = 200;
  for (int k = 0; k < trials; ++k) {
    std::uniform_int_distribution<int> dim(2, 8);
    const int w = dim(rng), h = dim(rng);
    auto [ref, unused] = oracle::random_rig(w, h, rng);
    (void)unused;
    const ImageBuffer img = oracle::random_image(w, h, rng, 0.3, 1.0);
    const int n_src = 1 + k % 3;
    const auto sources = random_sources(ref, w, h, n_src, rng);
    const auto hyps = make_hypotheses(2 + k % 8, 0.05, 1.2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const ScatteringParams p{0.7 + 0.3 * unit(rng), 0.8 * unit(rng)};
    const double gamma = k % 2 ? 3.0 : 1.0 + 4.0 * unit(rng);
    worst_ord = std::max(worst_ord, max_abs_diff(build_ordinary(img, ref, sources, hyps, {gamma}).data(),
                                                 oracle::ordinary_volume(img, ref, sources, hyps, gamma)));
    worst_deh = std::max(worst_deh, max_abs_diff(build_dehazing(img, ref, sources, hyps, p, {gamma}).data(),
                                                 oracle::dehazing_volume(img, ref, sources, hyps, p.airlight, p.beta, gamma)));
  }
  return {worst_ord <= 1e-12 && worst_deh <= 1e-12,
          fmt("max deviation ordinary %.3g, dehazing %.3g over %d instances up to 8x8", worst_ord, worst_deh, trials)};
}

// 5
Outcome gamma_gate() {
  long entries = 0, outside = 0, gated = 0, gated_exact = 0, mismatched = 0;
  auto check = [&](const ImageBuffer& ref_img, const CameraModel& ref, const std::vector<SourceView>& sources,
                   const HypothesisSet& hyps, const ScatteringParams& p) {
    const CostVolume v = build_dehazing(ref_img, ref, sources, hyps, p);
    for (std::size_t i = 0; i < hyps.size(); ++i)
      for (int y = 0; y < v.height(); ++y)
        for (int x = 0; x < v.width(); ++x) {
          const double c = v.at(x, y, i);
          ++entries;
          outside += !(c >= 0.0 && c <= 3.0);
          // Recount: which sources does the gate reject here?
          const double z = hyps.depth(i);
          const Color jr = oracle::dehaze(ref_img.pixel(x, y), p.airlight, p.beta, z);
          int rejected = 0;
          double sum = 0.0;
          // Dehazing divides rounding noise by t, so the match is relative to 1/t.
          double inv_t = 1.0 / transmission(z, p);
          for (const auto& s : sources) {
            const oracle::Hit hit = oracle::warp(ref, s.camera, x, y, z);
            const auto sample = hit.ok ? oracle::sample(s.image, hit.u, hit.v) : std::nullopt;
            const auto zeta = sample ? oracle::plane_depth_from_source(ref, s.camera, hit.u, hit.v, z) : std::nullopt;
            if (!sample || !zeta) {
              sum += 3.0;
              continue;
            }
            const Color js = oracle::dehaze(*sample, p.airlight, p.beta, *zeta);
            inv_t = std::max(inv_t, 1.0 / transmission(*zeta, p));
            if (!oracle::in_unit(jr) || !oracle::in_unit(js)) {
              ++rejected;
              sum += 3.0;
            } else {
              sum += oracle::l1(jr, js);
            }
          }
          if (rejected == static_cast<int>(sources.size())) {
            ++gated;
            gated_exact += c == 3.0;
          }
          mismatched += std::abs(c - sum / static_cast<double>(sources.size())) > 1e-13 * std::max(10.0, inv_t);
        }
  };
  auto [ref, src] = standard_rig(32, 24);
  const auto hyps = make_hypotheses(64, 0.02, 2.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DatasetSample s = make_sample(random_scene(500 + seed), ref, src, SampleConfig{}, 500 + seed);
    check(s.reference, ref, s.sources(), hyps, s.params);
  }
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    auto [r, unused] = oracle::random_rig(12, 9, rng);
    (void)unused;
    const auto sources = random_sources(r, 12, 9, 2, rng);
    check(oracle::random_image(12, 9, rng), r, sources, make_hypotheses(16, 0.05, 1.5), {0.8, 0.6});
  }
  return {outside == 0 && gated > 0 && gated_exact == gated && mismatched == 0,
          fmt("%ld entries, %ld outside [0,3]; %ld fully gated, %ld of them exactly 3; %ld disagree with the recount",
              entries, outside, gated, gated_exact, mismatched)};
}

// 6
Outcome table_ordering() {
  auto [ref, src] = standard_rig();
  const auto& hyps = default_hyps();
  Stopwatch sw;
  int scenes = 0, wins = 0;
  double cp_sum = 0.0, cp_min = 100.0;
  for (std::uint64_t seed = 1000; scenes < 20 && seed < 1200; ++seed) {
    const DatasetSample s = make_sample(random_scene(seed), ref, src, benchmark_config(), seed);
    if (transmission(median_depth(s.gt_depth), s.params) >= 0.3) continue;
    ++scenes;
    const DepthEstimate deh = estimate_depth(s.reference, ref, s.sources(), hyps, s.params);
    const DepthEstimate ord = estimate_depth(s.reference, ref, s.sources(), hyps, std::nullopt);
    const MetricsReport md = evaluate(deh.depth, s.gt_depth, s.visible);
    const MetricsReport mo = evaluate(ord.depth, s.gt_depth, s.visible);
    wins += md.l1_rel < mo.l1_rel;
    cp_sum += md.correct_pct;
    cp_min = std::min(cp_min, md.correct_pct);
  }
  const double secs = sw.seconds();
  const double cp_mean = cp_sum / scenes;
  return {scenes == 20 && wins >= 18 && cp_mean >= 70.0 && secs < 60.0,
          fmt("dehazing L1-rel lower on %d/%d scenes; dehazing C.P. mean %.1f%% (min %.1f%%); %.1fs", wins, scenes,
              cp_mean, cp_min, secs)};
}

// 7
Outcome plane_accuracy() {
  auto [ref, src] = standard_rig();
  const auto& hyps = default_hyps();
  SampleConfig cfg;
  cfg.params = ScatteringParams{0.85, 0.5};
  const DatasetSample s = make_sample(plane_scene(4.0, 7), ref, src, cfg, 7);
  const CostVolume v = aggregate(build_dehazing(s.reference, ref, s.sources(), hyps, s.params), 2);
  const DepthEstimate wta = winner_take_all(v, hyps);
  const DepthEstimate refined = estimate_depth(s.reference, ref, s.sources(), hyps, s.params);
  int n = 0, within = 0;
  std::vector<double> err;
  for (std::size_t p = 0; p < s.visible.size(); ++p) {
    if (!s.visible[p]) continue;
    ++n;
    const double d = 1 / s.gt_depth.at(p);
    within += std::abs(1 / wta.depth.at(p) - d) <= hyps.step() * (1 + 1e-9);
    err.push_back(std::abs(1 / refined.depth.at(p) - d) / hyps.step());
  }
  std::nth_element(err.begin(), err.begin() + err.size() / 2, err.end());
  const double share = 100.0 * within / n, median = err[err.size() / 2];
  return {share >= 95.0 && median < 0.5,
          fmt("%.1f%% of %d unoccluded pixels within one step after WTA; median refined error %.3f steps", share, n,
              median)};
}

// 8
Outcome parameter_recovery() {
  auto [ref, src] = standard_rig();
  const auto& hyps = default_hyps();
  int ok = 0, budget_ok = 0;
  double mae_a = 0, mae_b = 0, slowest = 0;
  const int scenes = 20;
  for (int k = 0; k < scenes; ++k) {
    const std::uint64_t seed = 1000 + k;
    const DatasetSample s = make_sample(random_scene(seed), ref, src, benchmark_config(), seed);
    Stopwatch sw;
    const EstimationResult r = grid_search(s.reference, ref, s.sources(), hyps, s.sparse, SearchConfig{});
    slowest = std::max(slowest, sw.seconds());
    const double ea = std::abs(r.airlight - s.params.airlight), eb = std::abs(r.beta - s.params.beta);
    mae_a += ea / scenes;
    mae_b += eb / scenes;
    ok += ea <= 0.05 && eb <= 0.05;
    budget_ok += r.evaluations == 26;
  }
  return {ok >= 18 && budget_ok == scenes && slowest < 300.0,
          fmt("%d/%d scenes within 0.05 on both; MAE A %.3g, beta %.3g; 26 evaluations on %d/%d runs; slowest %.1fs",
              ok, scenes, mae_a, mae_b, budget_ok, scenes, slowest)};
}

// 9
Outcome jitter_robustness() {
  auto [ref, src] = standard_rig();
  const auto& hyps = default_hyps();
  const SearchConfig search;
  const double step_a = 2 * search.delta_airlight / (search.refine_steps_airlight - 1);
  const double step_b = 2 * search.delta_beta / (search.refine_steps_beta - 1);
  const std::uint64_t seed = 1000;
  SampleConfig cfg = benchmark_config();
  const DatasetSample clean = make_sample(random_scene(seed), ref, src, cfg, seed);
  cfg.edge_jitter_fraction = 0.1;
  const DatasetSample jittered = make_sample(random_scene(seed), ref, src, cfg, seed);
  std::size_t moved = 0;
  for (const auto& o : jittered.sparse.observations()) moved += o.depth != jittered.gt_depth.at(o.x, o.y);
  const EstimationResult a = grid_search(clean.reference, ref, clean.sources(), hyps, clean.sparse, search);
  const EstimationResult b = grid_search(jittered.reference, ref, jittered.sources(), hyps, jittered.sparse, search);
  const double da = std::abs(a.airlight - b.airlight), db = std::abs(a.beta - b.beta);
  return {moved > 0 && da <= step_a + 1e-12 && db <= step_b + 1e-12,
          fmt("%zu of %zu observations jittered; clean (%.4f, %.4f) vs jittered (%.4f, %.4f); shifts %.4f / %.4f "
              "against grid steps %.4f / %.4f",
              moved, jittered.sparse.size(), a.airlight, a.beta, b.airlight, b.beta, da, db, step_a, step_b)};
}

// 10
Outcome metrics() {
  auto map2x2 = [](double a, double b, double c, double d) {
    DepthMap m(2, 2);
    m.set(0, 0, a);
    m.set(1, 0, b);
    m.set(0, 1, c);
    m.set(1, 1, d);
    return m;
  };
  const DepthMap gt = map2x2(1, 2, 4, 8);
  const DepthMap pred = map2x2(2, 2, 4, 4);
  const DepthMap gt10 = map2x2(10, 10, 10, 10);
  const DepthMap edge = map2x2(11, 9, 10, 12);
  bool exact = l1_rel(pred, gt) == 0.375 && l1_inv(pred, gt) == 0.15625 && correct_pct(pred, gt) == 50.0 &&
               correct_pct(edge, gt10) == 75.0 && l1_rel(gt, gt) == 0.0 && sc_inv(gt, gt) == 0.0;
  const double sc = sc_inv(pred, gt), sc_hand = std::log(2.0) / std::sqrt(2.0);
  exact = exact && std::abs(sc - sc_hand) <= 4 * std::numeric_limits<double>::epsilon() * sc_hand;

  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.5, 20.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    DepthMap p(16, 16), g(16, 16);
    for (std::size_t i = 0; i < p.size(); ++i) {
      p.set(i, u(rng));
      g.set(i, u(rng));
    }
    for (double s : {0.5, 2.0}) {
      DepthMap ps(16, 16);
      for (std::size_t i = 0; i < p.size(); ++i) ps.set(i, s * p.at(i));
      worst = std::max(worst, std::abs(sc_inv(ps, g) - sc_inv(p, g)));
    }
  }
  return {exact && worst <= 1e-12,
          fmt("2x2 fixtures %s (sc-inv %.17g vs ln2/sqrt2 %.17g); scale deviation %.3g", exact ? "exact" : "WRONG", sc,
              sc_hand, worst)};
}

// 11
Outcome performance() {
  auto [ref, src] = standard_rig(256, 192);
  const auto& hyps = default_hyps();
  const DatasetSample s = make_sample(random_scene(5), ref, src, SampleConfig{}, 5);
  Stopwatch sw1;
  const CostVolume one = build_dehazing(s.reference, ref, s.sources(), hyps, s.params, {3.0, 1});
  const double t1 = sw1.seconds();
  Stopwatch sw8;
  const CostVolume eight = build_dehazing(s.reference, ref, s.sources(), hyps, s.params, {3.0, 8});
  const double t8 = sw8.seconds();
  const bool identical = one.data() == eight.data();
  const double speedup = t1 / t8;
  return {t1 < 10.0 && speedup >= 3.0 && identical,
          fmt("1 worker %.2fs, 8 workers %.2fs, speedup %.2fx on %u hardware threads; outputs %s", t1, t8, speedup,
              std::thread::hardware_concurrency(), identical ? "bit-identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-11)")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> criteria{
      model_exactness, scale_invariance, degeneration, oracle_equivalence, gamma_gate, table_ordering,
      plane_accuracy,  parameter_recovery, jitter_robustness, metrics, performance};
  bool all = true;
  for (int n = 1; n <= 11; ++n) {
    if (only && n != only) continue;
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(n - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s (%s)\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
