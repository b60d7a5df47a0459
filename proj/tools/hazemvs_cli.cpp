// hazemvs command-line tool.
//
//   hazemvs synth    --out DIR [--count N --seed S | --manifest scenes.json]
//   hazemvs depth    --sample DIR | --ref ... --ref-cam ... --src ... --src-cam ...
//   hazemvs estimate --sample DIR | ... --sparse FILE
//   hazemvs eval     --pred z.pfm --gt gt.pfm [--mask visible.png] [--csv]
//   hazemvs profile  --pixel u,v --sample DIR | ...
//
// Every command also takes --config (a RunConfig JSON file) and --workers;
// explicit flags override the config.

#include "hazemvs/cost_volume.hpp"
#include "hazemvs/errors.hpp"
#include "hazemvs/estimation.hpp"
#include "hazemvs/evaluation.hpp"
#include "hazemvs/extraction.hpp"
#include "hazemvs/io.hpp"
#include "hazemvs/synthesis.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace hazemvs;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Options shared by the commands that run the depth pipeline.
struct PipelineArgs {
  std::string config;
  std::string sample;
  std::string ref, ref_cam, sparse;
  std::vector<std::string> src, src_cam;
  std::string params_file;
  std::optional<double> airlight, beta;
  bool ordinary = false;
  std::optional<double> gamma;
  std::optional<int> radius;
  std::string hyp;
  std::optional<unsigned> workers;
  bool no_refine = false;
};

void add_pipeline_options(CLI::App* cmd, PipelineArgs& a, bool scattering) {
  cmd->add_option("--config", a.config, "RunConfig JSON file");
  cmd->add_option("--sample", a.sample, "Dataset sample folder written by synth");
  cmd->add_option("--ref", a.ref, "Reference image");
  cmd->add_option("--ref-cam", a.ref_cam, "Reference camera file");
  cmd->add_option("--src", a.src, "Source image (repeatable)");
  cmd->add_option("--src-cam", a.src_cam, "Source camera file (repeatable, same order as --src)");
  cmd->add_option("--gamma", a.gamma, "Penalty for invalid warps and out-of-range dehazed values");
  cmd->add_option("--radius", a.radius, "Box aggregation radius");
  cmd->add_option("--hyp", a.hyp, "Hypotheses as N,dmin,dmax (disparity range)");
  cmd->add_option("--workers", a.workers, "Worker threads (0: all cores)");
  if (scattering) {
    cmd->add_option("--params", a.params_file, "Scattering parameter file");
    cmd->add_option("--airlight", a.airlight, "Airlight A");
    cmd->add_option("--beta", a.beta, "Scattering coefficient beta");
    cmd->add_flag("--ordinary", a.ordinary, "Ignore scattering and build the ordinary volume");
  }
}

struct Pipeline {
  io::RunConfig config;
  ImageBuffer reference;
  CameraModel ref_camera;
  std::vector<SourceView> sources;
  HypothesisSet hyps;
  std::optional<ScatteringParams> params;
  fs::path sample_dir;
};

HypothesisSet parse_hyp(const std::string& text) {
  std::stringstream ss(text);
  std::string n, lo, hi;
  if (!std::getline(ss, n, ',') || !std::getline(ss, lo, ',') || !std::getline(ss, hi) )
    throw UsageError("--hyp expects N,dmin,dmax");
  try {
    return make_hypotheses(std::stoul(n), std::stod(lo), std::stod(hi));
  } catch (const std::logic_error&) {
    throw UsageError("--hyp expects N,dmin,dmax");
  }
}

Pipeline load_pipeline(const PipelineArgs& a, bool want_params) {
  Pipeline p;
  if (!a.config.empty()) p.config = io::parse_config(io::read_file(a.config));
  io::RunConfig& c = p.config;
  if (!a.sample.empty()) {
    p.sample_dir = a.sample;
    c.reference = (p.sample_dir / "reference.png").string();
    c.ref_camera = (p.sample_dir / "ref_camera.json").string();
    c.sources = {(p.sample_dir / "source.png").string()};
    c.src_cameras = {(p.sample_dir / "src_camera.json").string()};
    c.sparse = (p.sample_dir / "sparse.txt").string();
  }
  if (!a.ref.empty()) c.reference = a.ref;
  if (!a.ref_cam.empty()) c.ref_camera = a.ref_cam;
  if (!a.src.empty()) c.sources = a.src;
  if (!a.src_cam.empty()) c.src_cameras = a.src_cam;
  if (!a.sparse.empty()) c.sparse = a.sparse;
  if (a.gamma) c.gamma = *a.gamma;
  if (a.radius) c.radius = *a.radius;
  if (a.workers) c.workers = *a.workers;

  if (c.reference.empty() || c.ref_camera.empty()) throw UsageError("reference image and camera are required");
  if (c.sources.empty()) throw UsageError("at least one source image is required");
  if (c.sources.size() != c.src_cameras.size()) throw UsageError("each source image needs exactly one camera");

  p.reference = io::read_image(c.reference);
  p.ref_camera = io::read_camera(c.ref_camera);
  for (std::size_t k = 0; k < c.sources.size(); ++k)
    p.sources.push_back({io::read_image(c.sources[k]), io::read_camera(c.src_cameras[k])});
  p.hyps = a.hyp.empty() ? make_hypotheses(c.hypotheses.count, c.hypotheses.disparity_min, c.hypotheses.disparity_max)
                         : parse_hyp(a.hyp);

  if (want_params) {
    const bool explicit_params = !a.params_file.empty() || a.airlight || a.beta;
    if (a.ordinary && explicit_params) throw UsageError("--ordinary cannot be combined with scattering parameters");
    if (!a.ordinary) {
      if (!a.params_file.empty()) {
        p.params = io::read_params(a.params_file);
      } else if (!p.sample_dir.empty() && fs::exists(p.sample_dir / "params.json")) {
        p.params = io::read_params(p.sample_dir / "params.json");
      }
      if (a.airlight || a.beta) {
        if (!p.params && !(a.airlight && a.beta)) throw UsageError("--airlight and --beta must be given together");
        ScatteringParams q = p.params.value_or(ScatteringParams{});
        if (a.airlight) q.airlight = *a.airlight;
        if (a.beta) q.beta = *a.beta;
        q.validate();
        p.params = q;
      }
    }
  }
  return p;
}

DepthOptions depth_options(const Pipeline& p, bool refine) {
  return {p.config.gamma, p.config.radius, refine, p.config.workers};
}

// ---- synth ----

struct SynthArgs {
  std::string out;
  std::string manifest;
  int count = 1;
  std::uint64_t seed = 0;
  int width = 96, height = 72;
  std::string scene = "random";
  double plane_depth = 4.0;
  double sparse_fraction = 0.1;
  bool sparse_visible_only = false;
  double sparse_min_transmission = 0.0;
  double jitter = 0.0;
  std::optional<double> airlight, beta;
};

struct SceneEntry {
  std::string kind;
  std::uint64_t seed;
  double depth;
};

int run_synth(const SynthArgs& a) {
  std::vector<SceneEntry> entries;
  if (!a.manifest.empty()) {
    const json m = json::parse(io::read_file(a.manifest));
    const json& list = m.is_object() ? m.at("scenes") : m;
    for (const auto& e : list)
      entries.push_back({e.value("scene", std::string("random")), e.at("seed").get<std::uint64_t>(),
                         e.value("depth", 4.0)});
  } else {
    for (int k = 0; k < a.count; ++k) entries.push_back({a.scene, a.seed + static_cast<std::uint64_t>(k), a.plane_depth});
  }
  if (a.airlight.has_value() != a.beta.has_value()) throw UsageError("--airlight and --beta must be given together");

  SampleConfig cfg;
  cfg.sparse_fraction = a.sparse_fraction;
  cfg.sparse_visible_only = a.sparse_visible_only;
  cfg.sparse_min_transmission = a.sparse_min_transmission;
  cfg.edge_jitter_fraction = a.jitter;
  if (a.airlight) cfg.params = ScatteringParams{*a.airlight, *a.beta};

  const auto [ref_cam, src_cam] = standard_rig(a.width, a.height);
  const fs::path out(a.out);
  json manifest;
  manifest["samples"] = json::array();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const SceneEntry& e = entries[k];
    SceneSpec spec;
    if (e.kind == "random") {
      spec = random_scene(e.seed);
    } else if (e.kind == "plane") {
      spec = plane_scene(e.depth, e.seed);
    } else {
      throw UsageError("unknown scene kind '" + e.kind + "'");
    }
    const DatasetSample s = make_sample(spec, ref_cam, src_cam, cfg, e.seed);
    char name[32];
    std::snprintf(name, sizeof name, "sample_%04zu", k);
    const fs::path dir = out / name;
    io::write_image(dir / "reference.png", s.reference, io::BitDepth::k16);
    io::write_image(dir / "source.png", s.source, io::BitDepth::k16);
    io::write_image(dir / "clear_reference.png", s.clear_reference, io::BitDepth::k16);
    io::write_image(dir / "clear_source.png", s.clear_source, io::BitDepth::k16);
    io::write_pfm(dir / "gt_depth.pfm", s.gt_depth);
    io::write_pfm(dir / "gt_source_depth.pfm", s.gt_source_depth);
    io::write_camera(dir / "ref_camera.json", s.ref_camera);
    io::write_camera(dir / "src_camera.json", s.src_camera);
    io::write_params(dir / "params.json", s.params);
    io::write_sparse(dir / "sparse.txt", s.sparse);
    ImageBuffer mask(a.width, a.height);
    for (int y = 0; y < a.height; ++y)
      for (int x = 0; x < a.width; ++x)
        if (s.visible[static_cast<std::size_t>(y) * a.width + x]) mask.set_pixel(x, y, Color(1, 1, 1));
    io::write_image(dir / "visible.png", mask);
    manifest["samples"].push_back({{"dir", name},
                                   {"scene", e.kind},
                                   {"seed", e.seed},
                                   {"airlight", s.params.airlight},
                                   {"beta", s.params.beta},
                                   {"sparse_points", s.sparse.size()}});
  }
  manifest["width"] = a.width;
  manifest["height"] = a.height;
  io::write_file_atomic(out / "manifest.json", manifest.dump(2) + "\n");
  std::printf("wrote %zu samples to %s\n", entries.size(), out.string().c_str());
  return 0;
}

// ---- depth ----

int run_depth(const PipelineArgs& a, const std::string& out, const std::string& volume_out) {
  const Pipeline p = load_pipeline(a, true);
  const DepthOptions opt = depth_options(p, !a.no_refine);
  const VolumeOptions vo{opt.gamma, opt.workers};
  const CostVolume volume = p.params ? build_dehazing(p.reference, p.ref_camera, p.sources, p.hyps, *p.params, vo)
                                     : build_ordinary(p.reference, p.ref_camera, p.sources, p.hyps, vo);
  const DepthEstimate est = extract_depth(volume, p.hyps, opt);
  const fs::path target = out.empty() ? fs::path(p.config.output_dir) / "depth.pfm" : fs::path(out);
  io::write_pfm(target, est.depth);
  if (!volume_out.empty()) io::write_volume(volume_out, volume);
  if (p.params)
    std::printf("volume: dehazing (A=%.6g, beta=%.6g)\n", p.params->airlight, p.params->beta);
  else
    std::printf("volume: ordinary\n");
  std::printf("depth: %s\n", target.string().c_str());
  return 0;
}

// ---- estimate ----

int run_estimate(const PipelineArgs& a, const std::string& out_dir, std::optional<double> airlight_init) {
  const Pipeline p = load_pipeline(a, false);
  if (p.config.sparse.empty()) throw UsageError("estimate needs sparse depth (--sparse or --sample)");
  const SparseDepth sparse = io::read_sparse(p.config.sparse, p.reference.width(), p.reference.height());
  const EstimationResult r = grid_search(p.reference, p.ref_camera, p.sources, p.hyps, sparse, p.config.search,
                                         depth_options(p, !a.no_refine), airlight_init);
  const fs::path dir = out_dir.empty() ? fs::path(p.config.output_dir) : fs::path(out_dir);
  io::write_pfm(dir / "depth.pfm", r.depth.depth);
  io::write_params(dir / "params.json", {r.airlight, r.beta});
  std::printf("A*: %.6f\nbeta*: %.6f\nobjective: %.6f\nevaluations: %d\n", r.airlight, r.beta, r.objective_value,
              r.evaluations);
  return 0;
}

// ---- eval ----

int run_eval(const std::string& pred, const std::string& gt, const std::string& mask_path, bool csv) {
  const DepthMap pm = io::read_pfm(pred);
  const DepthMap gm = io::read_pfm(gt);
  std::vector<unsigned char> mask;
  if (!mask_path.empty()) {
    const ImageBuffer m = io::read_image(mask_path);
    if (m.width() != gm.width() || m.height() != gm.height()) throw UsageError("mask size does not match depth");
    mask.resize(gm.size());
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x) mask[static_cast<std::size_t>(y) * m.width() + x] = m.at(x, y, 0) > 0.0;
  }
  const MetricsReport r = evaluate(pm, gm, mask);
  if (csv)
    std::printf("%s\n%s\n", MetricsReport::csv_header().c_str(), r.to_csv_row().c_str());
  else
    std::fputs(r.to_key_value().c_str(), stdout);
  return 0;
}

// ---- profile ----

int run_profile(const PipelineArgs& a, const std::string& pixel, const std::string& out) {
  int u = 0, v = 0;
  char comma = 0;
  std::istringstream ps(pixel);
  if (!(ps >> u >> comma >> v) || comma != ',') throw UsageError("--pixel expects u,v");
  const Pipeline p = load_pipeline(a, true);
  if (!p.params) throw UsageError("profile needs scattering parameters");
  if (u < 0 || v < 0 || u >= p.reference.width() || v >= p.reference.height())
    throw UsageError("--pixel lies outside the reference image");
  // A one-pixel crop would change the warps; build full volumes and read one column.
  const VolumeOptions vo{p.config.gamma, p.config.workers};
  const CostVolume ord = build_ordinary(p.reference, p.ref_camera, p.sources, p.hyps, vo);
  const CostVolume deh = build_dehazing(p.reference, p.ref_camera, p.sources, p.hyps, *p.params, vo);
  const auto po = cost_profile(ord, p.hyps, u, v);
  const auto pd = cost_profile(deh, p.hyps, u, v);
  std::string text = "depth,ordinary,dehazing\n";
  char buf[128];
  for (std::size_t i = 0; i < po.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", po[i].first, po[i].second, pd[i].second);
    text += buf;
  }
  if (out.empty())
    std::fputs(text.c_str(), stdout);
  else
    io::write_file_atomic(out, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-view depth estimation in scattering media"};
  app.require_subcommand(1);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic hazy two-view dataset");
  synth->add_option("--out", sa.out, "Output directory")->required();
  synth->add_option("--manifest", sa.manifest, "Scene list: JSON array of {scene, seed, depth}");
  synth->add_option("--count", sa.count, "Number of samples when no manifest is given")->check(CLI::PositiveNumber);
  synth->add_option("--seed", sa.seed, "First seed when no manifest is given");
  synth->add_option("--scene", sa.scene, "Scene kind: random or plane")->check(CLI::IsMember({"random", "plane"}));
  synth->add_option("--plane-depth", sa.plane_depth, "Depth of the plane scene");
  synth->add_option("--width", sa.width)->check(CLI::PositiveNumber);
  synth->add_option("--height", sa.height)->check(CLI::PositiveNumber);
  synth->add_option("--sparse-fraction", sa.sparse_fraction, "Share of eligible pixels with sparse depth");
  synth->add_flag("--sparse-visible-only", sa.sparse_visible_only, "Only co-visible pixels get sparse depth");
  synth->add_option("--sparse-min-transmission", sa.sparse_min_transmission,
                    "Only pixels with at least this transmission get sparse depth");
  synth->add_option("--jitter", sa.jitter, "Fraction of sparse points moved across depth edges");
  synth->add_option("--airlight", sa.airlight, "Fixed airlight instead of a random draw");
  synth->add_option("--beta", sa.beta, "Fixed beta instead of a random draw");

  PipelineArgs da;
  std::string depth_out, volume_out;
  auto* depth = app.add_subcommand("depth", "Estimate a depth map");
  add_pipeline_options(depth, da, true);
  depth->add_option("--out", depth_out, "Output PFM (default: <output_dir>/depth.pfm)");
  depth->add_option("--volume", volume_out, "Also dump the cost volume");
  depth->add_flag("--no-refine", da.no_refine, "Skip sub-hypothesis refinement");

  PipelineArgs ea;
  std::string estimate_out;
  std::optional<double> airlight_init;
  auto* estimate = app.add_subcommand("estimate", "Estimate airlight, beta and depth from sparse depth");
  add_pipeline_options(estimate, ea, false);
  estimate->add_option("--sparse", ea.sparse, "Sparse depth file");
  estimate->add_option("--out-dir", estimate_out, "Where depth.pfm and params.json go");
  estimate->add_option("--airlight-init", airlight_init, "Replace the bright-pixel airlight estimate");

  std::string pred, gt, mask;
  bool csv = false;
  auto* eval = app.add_subcommand("eval", "Compare a depth map with ground truth");
  eval->add_option("--pred", pred)->required();
  eval->add_option("--gt", gt)->required();
  eval->add_option("--mask", mask, "Image whose non-zero pixels are evaluated");
  eval->add_flag("--csv", csv, "Print a CSV header and row");

  PipelineArgs pa;
  std::string pixel, profile_out;
  auto* profile = app.add_subcommand("profile", "Per-hypothesis costs at one pixel as CSV");
  add_pipeline_options(profile, pa, true);
  profile->add_option("--pixel", pixel, "Pixel as u,v")->required();
  profile->add_option("--out", profile_out, "Write the CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) return run_synth(sa);
    if (depth->parsed()) return run_depth(da, depth_out, volume_out);
    if (estimate->parsed()) return run_estimate(ea, estimate_out, airlight_init);
    if (eval->parsed()) return run_eval(pred, gt, mask, csv);
    if (profile->parsed()) return run_profile(pa, pixel, profile_out);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
