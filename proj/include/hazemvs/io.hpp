#pragma once

#include "hazemvs/cost_volume.hpp"
#include "hazemvs/estimation.hpp"
#include "hazemvs/extraction.hpp"
#include "hazemvs/geometry.hpp"
#include "hazemvs/image.hpp"
#include "hazemvs/scattering.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace hazemvs::io {

namespace fs = std::filesystem;

/// Writes `bytes` to a sibling temp file and renames it over `path`.
void write_file_atomic(const fs::path& path, const std::string& bytes);
std::string read_file(const fs::path& path);

// Grayscale PFM ("Pf"), little-endian (scale -1.0), rows stored bottom-up,
// NaN for invalid pixels. Readers accept big-endian (positive scale) files.
std::string encode_pfm(const DepthMap& depth);
DepthMap decode_pfm(const std::string& bytes);
void write_pfm(const fs::path& path, const DepthMap& depth);
DepthMap read_pfm(const fs::path& path);

// 8/16-bit PNG and binary PPM (P6). Values map linearly: v / maxval.
enum class BitDepth { k8 = 8, k16 = 16 };
ImageBuffer read_image(const fs::path& path);
void write_image(const fs::path& path, const ImageBuffer& image, BitDepth depth = BitDepth::k8);
std::string encode_ppm(const ImageBuffer& image, BitDepth depth = BitDepth::k8);
ImageBuffer decode_ppm(const std::string& bytes);

// Camera files are JSON objects with keys intrinsics (9 numbers, row-major),
// rotation (9, row-major), translation (3), width, height.
CameraModel parse_camera(const std::string& text);
std::string format_camera(const CameraModel& camera);
CameraModel read_camera(const fs::path& path);
void write_camera(const fs::path& path, const CameraModel& camera);

// Sparse depth: one "u v z" per line, integer pixels, '#' starts a comment.
SparseDepth parse_sparse(const std::string& text, int width, int height);
std::string format_sparse(const SparseDepth& sparse);
SparseDepth read_sparse(const fs::path& path, int width, int height);
void write_sparse(const fs::path& path, const SparseDepth& sparse);

// Scattering parameters: {"airlight": A, "beta": b}.
ScatteringParams parse_params(const std::string& text);
std::string format_params(const ScatteringParams& params);
ScatteringParams read_params(const fs::path& path);
void write_params(const fs::path& path, const ScatteringParams& params);

/// Volume dump: "DCV1", then W, H, N as little-endian uint32, then W*H*N
/// little-endian float32 values, plane-major.
std::string encode_volume(const CostVolume& volume);
CostVolume decode_volume(const std::string& bytes, double gamma = kDefaultGamma);
void write_volume(const fs::path& path, const CostVolume& volume);

struct HypothesisConfig {
  std::size_t count = 256;
  double disparity_min = 0.02;
  double disparity_max = 2.0;
  bool operator==(const HypothesisConfig&) const = default;
};

/// Everything a command needs besides its positional inputs.
struct RunConfig {
  std::string reference;
  std::vector<std::string> sources;
  std::string ref_camera;
  std::vector<std::string> src_cameras;
  std::string sparse;
  std::string output_dir = ".";
  HypothesisConfig hypotheses;
  SearchConfig search;
  double gamma = kDefaultGamma;
  int radius = 2;
  unsigned workers = 1;
  std::uint64_t seed = 0;

  bool operator==(const RunConfig& o) const;
};

std::string format_config(const RunConfig& config);
RunConfig parse_config(const std::string& text);

}  // namespace hazemvs::io
