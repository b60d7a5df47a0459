#include "hazemvs/io.hpp"

#include "hazemvs/errors.hpp"

#include <json.hpp>
#include <png.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

namespace hazemvs::io {
namespace {

using nlohmann::json;

void put_u32_le(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xffu));
}

std::uint32_t get_u32(const unsigned char* p, bool little) {
  return little ? (std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 | std::uint32_t{p[2]} << 16 | std::uint32_t{p[3]} << 24)
                : (std::uint32_t{p[3]} | std::uint32_t{p[2]} << 8 | std::uint32_t{p[1]} << 16 | std::uint32_t{p[0]} << 24);
}

// Minimal whitespace-token reader for the ASCII headers of PFM/PPM.
class HeaderReader {
 public:
  explicit HeaderReader(const std::string& bytes) : bytes_(bytes) {}

  std::string token(bool allow_comments = false) {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (allow_comments && c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (start == pos_) throw FormatError("truncated header");
    return bytes_.substr(start, pos_ - start);
  }

  /// Consumes the single whitespace byte that ends the header.
  std::size_t data_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
      throw FormatError("missing separator before pixel data");
    return pos_ + 1;
  }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

long parse_dimension(const std::string& s) {
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (errno != 0 || end == s.c_str() || *end != '\0' || v <= 0 || v > (1L << 20))
    throw FormatError("invalid image dimension '" + s + "'");
  return v;
}

double parse_number(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw FormatError("invalid number '" + s + "'");
  return v;
}

std::uint16_t quantize(double v, unsigned maxval) {
  const double clamped = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint16_t>(std::lround(clamped * maxval));
}

std::vector<double> number_array(const json& j, const char* key, std::size_t n) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != n)
    throw FormatError(std::string("camera key '") + key + "' must hold " + std::to_string(n) + " numbers");
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number()) throw FormatError(std::string("camera key '") + key + "' holds a non-number");
    out.push_back(v.get<double>());
  }
  return out;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::random_device rd;
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- PFM ----

std::string encode_pfm(const DepthMap& depth) {
  std::string out = "Pf\n" + std::to_string(depth.width()) + " " + std::to_string(depth.height()) + "\n-1.0\n";
  out.reserve(out.size() + depth.size() * 4);
  for (int y = depth.height() - 1; y >= 0; --y)
    for (int x = 0; x < depth.width(); ++x) {
      const float v = depth.valid(x, y) ? static_cast<float>(depth.at(x, y)) : std::numeric_limits<float>::quiet_NaN();
      put_u32_le(out, std::bit_cast<std::uint32_t>(v));
    }
  return out;
}

DepthMap decode_pfm(const std::string& bytes) {
  HeaderReader hr(bytes);
  const std::string magic = hr.token();
  if (magic == "PF") throw FormatError("colour PFM is not a depth map");
  if (magic != "Pf") throw FormatError("not a PFM file");
  const long w = parse_dimension(hr.token());
  const long h = parse_dimension(hr.token());
  const double scale = parse_number(hr.token());
  if (scale == 0.0 || !std::isfinite(scale)) throw FormatError("invalid PFM scale");
  const bool little = scale < 0.0;
  const std::size_t offset = hr.data_offset();
  const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() - offset != n * 4) throw FormatError("PFM payload size does not match header");
  DepthMap depth(static_cast<int>(w), static_cast<int>(h));
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  for (long row = 0; row < h; ++row)
    for (long x = 0; x < w; ++x, p += 4) {
      const float v = std::bit_cast<float>(get_u32(p, little));
      depth.set(static_cast<int>(x), static_cast<int>(h - 1 - row), static_cast<double>(v));
    }
  return depth;
}

void write_pfm(const fs::path& path, const DepthMap& depth) { write_file_atomic(path, encode_pfm(depth)); }
DepthMap read_pfm(const fs::path& path) { return decode_pfm(read_file(path)); }

// ---- PPM ----

std::string encode_ppm(const ImageBuffer& image, BitDepth depth) {
  const unsigned maxval = depth == BitDepth::k8 ? 255 : 65535;
  std::string out = "P6\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n" +
                    std::to_string(maxval) + "\n";
  for (const double v : image.data()) {
    const std::uint16_t q = quantize(v, maxval);
    if (depth == BitDepth::k16) out.push_back(static_cast<char>(q >> 8));
    out.push_back(static_cast<char>(q & 0xff));
  }
  return out;
}

ImageBuffer decode_ppm(const std::string& bytes) {
  HeaderReader hr(bytes);
  if (hr.token(true) != "P6") throw FormatError("only binary PPM (P6) is supported");
  const long w = parse_dimension(hr.token(true));
  const long h = parse_dimension(hr.token(true));
  const double maxval = parse_number(hr.token(true));
  if (maxval < 1 || maxval > 65535 || maxval != std::floor(maxval)) throw FormatError("unsupported PPM bit depth");
  const std::size_t bpc = maxval > 255 ? 2 : 1;
  const std::size_t offset = hr.data_offset();
  const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3;
  if (bytes.size() - offset != n * bpc) throw FormatError("PPM payload size does not match header");
  ImageBuffer image(static_cast<int>(w), static_cast<int>(h));
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned v = bpc == 2 ? (unsigned{p[2 * i]} << 8 | p[2 * i + 1]) : p[i];
    image.data()[i] = v / maxval;
  }
  return image;
}

// ---- PNG ----

namespace {

struct RawPng {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bits = 0;
  int channels = 0;
  std::vector<unsigned char> pixels;  // tightly packed rows
};

// libpng messages go into a caller-owned buffer instead of stderr.
struct PngMessage {
  char text[160] = "corrupt PNG data";
};

void png_error_cb(png_structp png, png_const_charp msg) {
  auto* m = static_cast<PngMessage*>(png_get_error_ptr(png));
  std::snprintf(m->text, sizeof m->text, "%s", msg);
  png_longjmp(png, 1);
}
void png_warning_cb(png_structp, png_const_charp) {}

// Plain-C style decode; libpng reports errors by longjmp, so nothing with a
// destructor may be live between setjmp and the cleanup below.
const char* decode_png_file(std::FILE* file, RawPng* out, PngMessage* msg) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, msg, png_error_cb, png_warning_cb);
  if (!png) return "cannot allocate PNG reader";
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return "cannot allocate PNG info";
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return msg->text;
  }
  png_init_io(png, file);
  png_read_png(png, info, PNG_TRANSFORM_EXPAND | PNG_TRANSFORM_STRIP_ALPHA, nullptr);
  out->width = png_get_image_width(png, info);
  out->height = png_get_image_height(png, info);
  out->bits = png_get_bit_depth(png, info);
  out->channels = png_get_channels(png, info);
  const png_size_t rowbytes = png_get_rowbytes(png, info);
  png_bytepp rows = png_get_rows(png, info);
  out->pixels.resize(rowbytes * out->height);
  for (png_uint_32 y = 0; y < out->height; ++y) std::memcpy(out->pixels.data() + y * rowbytes, rows[y], rowbytes);
  png_destroy_read_struct(&png, &info, nullptr);
  return nullptr;
}

ImageBuffer read_png(const fs::path& path) {
  std::FILE* file = std::fopen(path.c_str(), "rb");
  if (!file) throw std::runtime_error("cannot open " + path.string());
  RawPng raw;
  PngMessage msg;
  const char* err = decode_png_file(file, &raw, &msg);
  std::fclose(file);
  if (err) throw FormatError(std::string("PNG: ") + err);
  if (raw.bits != 8 && raw.bits != 16) throw FormatError("unsupported PNG bit depth " + std::to_string(raw.bits));
  if (raw.channels != 1 && raw.channels != 3) throw FormatError("unsupported PNG channel layout");
  const double maxval = raw.bits == 16 ? 65535.0 : 255.0;
  const std::size_t bpc = raw.bits / 8;
  const std::size_t rowbytes = raw.width * raw.channels * bpc;
  ImageBuffer image(static_cast<int>(raw.width), static_cast<int>(raw.height));
  for (png_uint_32 y = 0; y < raw.height; ++y) {
    const unsigned char* r = raw.pixels.data() + y * rowbytes;
    for (png_uint_32 x = 0; x < raw.width; ++x)
      for (int c = 0; c < 3; ++c) {
        const std::size_t src = raw.channels == 1 ? x : 3 * x + static_cast<std::size_t>(c);
        const unsigned v = bpc == 2 ? (unsigned{r[2 * src]} << 8 | r[2 * src + 1]) : r[src];
        image.at(static_cast<int>(x), static_cast<int>(y), c) = v / maxval;
      }
  }
  return image;
}

void png_write_cb(png_structp png, png_bytep data, png_size_t len) {
  auto* buf = static_cast<std::string*>(png_get_io_ptr(png));
  buf->append(reinterpret_cast<const char*>(data), len);
}
void png_flush_cb(png_structp) {}

const char* encode_png_rows(png_uint_32 w, png_uint_32 h, int bits, png_bytepp rows, std::string* out,
                            PngMessage* msg) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, msg, png_error_cb, png_warning_cb);
  if (!png) return "cannot allocate PNG writer";
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return "cannot allocate PNG info";
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return msg->text;
  }
  png_set_write_fn(png, out, png_write_cb, png_flush_cb);
  png_set_IHDR(png, info, w, h, bits, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_rows(png, info, rows);
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  png_destroy_write_struct(&png, &info);
  return nullptr;
}

std::string encode_png(const ImageBuffer& image, BitDepth depth) {
  const unsigned maxval = depth == BitDepth::k8 ? 255 : 65535;
  const std::size_t bpc = depth == BitDepth::k8 ? 1 : 2;
  std::vector<unsigned char> pixels(image.data().size() * bpc);
  for (std::size_t i = 0; i < image.data().size(); ++i) {
    const std::uint16_t q = quantize(image.data()[i], maxval);
    if (bpc == 2) {
      pixels[2 * i] = static_cast<unsigned char>(q >> 8);
      pixels[2 * i + 1] = static_cast<unsigned char>(q & 0xff);
    } else {
      pixels[i] = static_cast<unsigned char>(q);
    }
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height()));
  for (int y = 0; y < image.height(); ++y)
    rows[static_cast<std::size_t>(y)] = pixels.data() + static_cast<std::size_t>(y) * image.width() * 3 * bpc;
  std::string out;
  PngMessage msg;
  if (const char* err = encode_png_rows(static_cast<png_uint_32>(image.width()),
                                        static_cast<png_uint_32>(image.height()), static_cast<int>(bpc * 8),
                                        rows.data(), &out, &msg))
    throw FormatError(std::string("PNG: ") + err);
  return out;
}

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

}  // namespace

ImageBuffer read_image(const fs::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".ppm") return decode_ppm(read_file(path));
  throw FormatError("unsupported image extension '" + ext + "'");
}

void write_image(const fs::path& path, const ImageBuffer& image, BitDepth depth) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return write_file_atomic(path, encode_png(image, depth));
  if (ext == ".ppm") return write_file_atomic(path, encode_ppm(image, depth));
  throw FormatError("unsupported image extension '" + ext + "'");
}

// ---- cameras ----

CameraModel parse_camera(const std::string& text) {
  const json j = parse_json(text);
  if (!j.is_object()) throw FormatError("camera file must hold a JSON object");
  const auto k = number_array(j, "intrinsics", 9);
  const auto r = number_array(j, "rotation", 9);
  const auto t = number_array(j, "translation", 3);
  if (!j.contains("width") || !j.contains("height") || !j["width"].is_number_integer() ||
      !j["height"].is_number_integer())
    throw FormatError("camera file needs integer width and height");
  Mat3 km, rm;
  for (int i = 0; i < 9; ++i) {
    km(i / 3, i % 3) = k[static_cast<std::size_t>(i)];
    rm(i / 3, i % 3) = r[static_cast<std::size_t>(i)];
  }
  try {
    return CameraModel(km, rm, Vec3(t[0], t[1], t[2]), j["width"].get<int>(), j["height"].get<int>(), 1e-6);
  } catch (const InvalidArgument& e) {
    throw ValidationError(std::string("invalid camera: ") + e.what());
  }
}

std::string format_camera(const CameraModel& camera) {
  json j;
  std::vector<double> k, r;
  for (int i = 0; i < 9; ++i) {
    k.push_back(camera.intrinsics()(i / 3, i % 3));
    r.push_back(camera.rotation()(i / 3, i % 3));
  }
  j["intrinsics"] = k;
  j["rotation"] = r;
  j["translation"] = {camera.translation().x(), camera.translation().y(), camera.translation().z()};
  j["width"] = camera.width();
  j["height"] = camera.height();
  return j.dump(2) + "\n";
}

CameraModel read_camera(const fs::path& path) { return parse_camera(read_file(path)); }
void write_camera(const fs::path& path, const CameraModel& camera) { write_file_atomic(path, format_camera(camera)); }

// ---- sparse depth ----

SparseDepth parse_sparse(const std::string& text, int width, int height) {
  SparseDepth sparse(width, height);
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string su, sv, sz, extra;
    if (!(ls >> su)) continue;
    if (!(ls >> sv >> sz) || (ls >> extra))
      throw FormatError("sparse line " + std::to_string(line_no) + ": expected 'u v z'");
    char* end = nullptr;
    const long u = std::strtol(su.c_str(), &end, 10);
    if (*end != '\0') throw FormatError("sparse line " + std::to_string(line_no) + ": non-integer u");
    const long v = std::strtol(sv.c_str(), &end, 10);
    if (*end != '\0') throw FormatError("sparse line " + std::to_string(line_no) + ": non-integer v");
    const double z = std::strtod(sz.c_str(), &end);
    if (*end != '\0') throw FormatError("sparse line " + std::to_string(line_no) + ": bad depth");
    if (u < 0 || v < 0 || u >= width || v >= height)
      throw ValidationError("sparse line " + std::to_string(line_no) + ": pixel out of bounds");
    sparse.add({static_cast<int>(u), static_cast<int>(v), z});
  }
  return sparse;
}

std::string format_sparse(const SparseDepth& sparse) {
  std::string out = "# u v z\n";
  char buf[96];
  for (const auto& o : sparse.observations()) {
    std::snprintf(buf, sizeof buf, "%d %d %.17g\n", o.x, o.y, o.depth);
    out += buf;
  }
  return out;
}

SparseDepth read_sparse(const fs::path& path, int width, int height) {
  return parse_sparse(read_file(path), width, height);
}
void write_sparse(const fs::path& path, const SparseDepth& sparse) { write_file_atomic(path, format_sparse(sparse)); }

// ---- scattering parameters ----

ScatteringParams parse_params(const std::string& text) {
  const json j = parse_json(text);
  if (!j.is_object() || !j.contains("airlight") || !j.contains("beta") || !j["airlight"].is_number() ||
      !j["beta"].is_number())
    throw FormatError("params file needs numeric 'airlight' and 'beta'");
  ScatteringParams p{j["airlight"].get<double>(), j["beta"].get<double>()};
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ValidationError(e.what());
  }
  return p;
}

std::string format_params(const ScatteringParams& params) {
  json j;
  j["airlight"] = params.airlight;
  j["beta"] = params.beta;
  return j.dump(2) + "\n";
}

ScatteringParams read_params(const fs::path& path) { return parse_params(read_file(path)); }
void write_params(const fs::path& path, const ScatteringParams& params) {
  write_file_atomic(path, format_params(params));
}

// ---- volume dump ----

std::string encode_volume(const CostVolume& volume) {
  std::string out = "DCV1";
  put_u32_le(out, static_cast<std::uint32_t>(volume.width()));
  put_u32_le(out, static_cast<std::uint32_t>(volume.height()));
  put_u32_le(out, static_cast<std::uint32_t>(volume.n_hypotheses()));
  out.reserve(out.size() + volume.data().size() * 4);
  for (const double v : volume.data()) put_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

CostVolume decode_volume(const std::string& bytes, double gamma) {
  if (bytes.size() < 16 || bytes.compare(0, 4, "DCV1") != 0) throw FormatError("not a DCV1 volume dump");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t w = get_u32(p + 4, true), h = get_u32(p + 8, true), n = get_u32(p + 12, true);
  if (w == 0 || h == 0 || n == 0 || w > (1u << 20) || h > (1u << 20) || n > (1u << 20))
    throw FormatError("invalid volume dimensions");
  const std::size_t count = std::size_t{w} * h * n;
  if (bytes.size() != 16 + count * 4) throw FormatError("volume payload size does not match header");
  CostVolume volume(static_cast<int>(w), static_cast<int>(h), n, gamma);
  for (std::size_t i = 0; i < count; ++i)
    volume.data()[i] = std::bit_cast<float>(get_u32(p + 16 + 4 * i, true));
  return volume;
}

void write_volume(const fs::path& path, const CostVolume& volume) { write_file_atomic(path, encode_volume(volume)); }

// ---- run configuration ----

bool RunConfig::operator==(const RunConfig& o) const {
  const auto& a = search;
  const auto& b = o.search;
  return reference == o.reference && sources == o.sources && ref_camera == o.ref_camera &&
         src_cameras == o.src_cameras && sparse == o.sparse && output_dir == o.output_dir &&
         hypotheses == o.hypotheses && a.beta_min == b.beta_min && a.beta_max == b.beta_max &&
         a.beta_steps == b.beta_steps && a.delta_airlight == b.delta_airlight && a.delta_beta == b.delta_beta &&
         a.refine_steps_airlight == b.refine_steps_airlight && a.refine_steps_beta == b.refine_steps_beta &&
         a.delta_px == b.delta_px && gamma == o.gamma && radius == o.radius && workers == o.workers &&
         seed == o.seed;
}

std::string format_config(const RunConfig& c) {
  json j;
  j["reference"] = c.reference;
  j["sources"] = c.sources;
  j["ref_camera"] = c.ref_camera;
  j["src_cameras"] = c.src_cameras;
  j["sparse"] = c.sparse;
  j["output_dir"] = c.output_dir;
  j["hypotheses"] = {{"count", c.hypotheses.count},
                     {"disparity_min", c.hypotheses.disparity_min},
                     {"disparity_max", c.hypotheses.disparity_max}};
  j["search"] = {{"beta_min", c.search.beta_min},
                 {"beta_max", c.search.beta_max},
                 {"beta_steps", c.search.beta_steps},
                 {"delta_airlight", c.search.delta_airlight},
                 {"delta_beta", c.search.delta_beta},
                 {"refine_steps_airlight", c.search.refine_steps_airlight},
                 {"refine_steps_beta", c.search.refine_steps_beta},
                 {"delta_px", c.search.delta_px}};
  j["gamma"] = c.gamma;
  j["radius"] = c.radius;
  j["workers"] = c.workers;
  j["seed"] = c.seed;
  return j.dump(2) + "\n";
}

RunConfig parse_config(const std::string& text) {
  const json j = parse_json(text);
  if (!j.is_object()) throw FormatError("config must be a JSON object");
  RunConfig c;
  try {
    c.reference = j.value("reference", c.reference);
    c.sources = j.value("sources", c.sources);
    c.ref_camera = j.value("ref_camera", c.ref_camera);
    c.src_cameras = j.value("src_cameras", c.src_cameras);
    c.sparse = j.value("sparse", c.sparse);
    c.output_dir = j.value("output_dir", c.output_dir);
    if (j.contains("hypotheses")) {
      const auto& h = j["hypotheses"];
      c.hypotheses.count = h.value("count", c.hypotheses.count);
      c.hypotheses.disparity_min = h.value("disparity_min", c.hypotheses.disparity_min);
      c.hypotheses.disparity_max = h.value("disparity_max", c.hypotheses.disparity_max);
    }
    if (j.contains("search")) {
      const auto& s = j["search"];
      c.search.beta_min = s.value("beta_min", c.search.beta_min);
      c.search.beta_max = s.value("beta_max", c.search.beta_max);
      c.search.beta_steps = s.value("beta_steps", c.search.beta_steps);
      c.search.delta_airlight = s.value("delta_airlight", c.search.delta_airlight);
      c.search.delta_beta = s.value("delta_beta", c.search.delta_beta);
      c.search.refine_steps_airlight = s.value("refine_steps_airlight", c.search.refine_steps_airlight);
      c.search.refine_steps_beta = s.value("refine_steps_beta", c.search.refine_steps_beta);
      c.search.delta_px = s.value("delta_px", c.search.delta_px);
    }
    c.gamma = j.value("gamma", c.gamma);
    c.radius = j.value("radius", c.radius);
    c.workers = j.value("workers", c.workers);
    c.seed = j.value("seed", c.seed);
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid config: ") + e.what());
  }
  return c;
}

}  // namespace hazemvs::io
