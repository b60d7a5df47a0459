#include "doctest.h"

#include "hazemvs/errors.hpp"
#include "hazemvs/io.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>

using namespace hazemvs;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
  const fs::path d = fs::path(HAZEMVS_TEST_TMP);
  fs::create_directories(d);
  return d;
}

ImageBuffer random_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ImageBuffer img(w, h);
  for (auto& v : img.data()) v = u(rng);
  return img;
}

std::string float_le(float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  std::string s(4, '\0');
  for (int i = 0; i < 4; ++i) s[static_cast<std::size_t>(i)] = static_cast<char>((u >> (8 * i)) & 0xff);
  return s;
}

std::string float_be(float f) {
  std::string s = float_le(f);
  return {s.rbegin(), s.rend()};
}

}  // namespace

TEST_CASE("PFM") {
  SUBCASE("byte layout of a single pixel") {
    DepthMap d(1, 1);
    d.set(0, 0, 4.0);
    CHECK(io::encode_pfm(d) == "Pf\n1 1\n-1.0\n" + float_le(4.0f));
  }
  SUBCASE("rows are stored bottom-up") {
    DepthMap d(1, 2);
    d.set(0, 0, 1.0);
    d.set(0, 1, 2.0);
    CHECK(io::encode_pfm(d) == "Pf\n1 2\n-1.0\n" + float_le(2.0f) + float_le(1.0f));
  }
  SUBCASE("round trip through a file, invalid pixels included") {
    DepthMap d(7, 5);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.5, 30.0);
    for (std::size_t i = 0; i < d.size(); ++i) d.set(i, u(rng));
    d.invalidate(3, 2);
    const fs::path p = tmp_dir() / "d.pfm";
    io::write_pfm(p, d);
    const DepthMap back = io::read_pfm(p);
    REQUIRE(back.width() == 7);
    REQUIRE(back.height() == 5);
    CHECK_FALSE(back.valid(3, 2));
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d.valid(i)) CHECK(back.at(i) == static_cast<double>(static_cast<float>(d.at(i))));
  }
  SUBCASE("big-endian input") {
    const DepthMap d = io::decode_pfm("Pf\n2 1\n1.0\n" + float_be(3.0f) + float_be(0.25f));
    CHECK(d.at(0, 0) == 3.0);
    CHECK(d.at(1, 0) == 0.25);
  }
  SUBCASE("malformed input") {
    CHECK_THROWS_AS(io::decode_pfm("PF\n1 1\n-1.0\n" + float_le(1.0f)), FormatError);
    CHECK_THROWS_AS(io::decode_pfm("P5\n1 1\n-1.0\n" + float_le(1.0f)), FormatError);
    CHECK_THROWS_AS(io::decode_pfm("Pf\n2 1\n-1.0\n" + float_le(1.0f)), FormatError);
    CHECK_THROWS_AS(io::decode_pfm("Pf\n1 1\n0\n" + float_le(1.0f)), FormatError);
    CHECK_THROWS_AS(io::decode_pfm("Pf\nx 1\n-1.0\n" + float_le(1.0f)), FormatError);
    CHECK_THROWS_AS(io::decode_pfm("Pf\n1"), FormatError);
  }
}

TEST_CASE("images") {
  const ImageBuffer img = random_image(9, 6, 2);
  for (const char* ext : {".png", ".ppm"}) {
    CAPTURE(ext);
    SUBCASE("8-bit round trip") {
      const fs::path p = tmp_dir() / (std::string("img8") + ext);
      io::write_image(p, img, io::BitDepth::k8);
      const ImageBuffer back = io::read_image(p);
      REQUIRE(back.width() == 9);
      REQUIRE(back.height() == 6);
      for (std::size_t i = 0; i < img.data().size(); ++i)
        CHECK(std::abs(back.data()[i] - img.data()[i]) <= 0.5 / 255 + 1e-12);
    }
    SUBCASE("16-bit round trip") {
      const fs::path p = tmp_dir() / (std::string("img16") + ext);
      io::write_image(p, img, io::BitDepth::k16);
      const ImageBuffer back = io::read_image(p);
      for (std::size_t i = 0; i < img.data().size(); ++i)
        CHECK(std::abs(back.data()[i] - img.data()[i]) <= 0.5 / 65535 + 1e-12);
    }
    SUBCASE("quantised values survive exactly") {
      ImageBuffer q(2, 1);
      q.set_pixel(0, 0, Color(128.0 / 255, 0.0, 1.0));
      q.set_pixel(1, 0, Color(0.5, 1.7, -0.2));  // 0.5 rounds to 128, out-of-range values clamp
      const fs::path p = tmp_dir() / (std::string("q") + ext);
      io::write_image(p, q);
      const ImageBuffer back = io::read_image(p);
      CHECK(back.at(0, 0, 0) == 128.0 / 255);
      CHECK(back.at(0, 0, 1) == 0.0);
      CHECK(back.at(0, 0, 2) == 1.0);
      CHECK(back.at(1, 0, 0) == 128.0 / 255);
      CHECK(back.at(1, 0, 1) == 1.0);
      CHECK(back.at(1, 0, 2) == 0.0);
    }
    SUBCASE("re-encoding an 8-bit file is byte-identical") {
      const fs::path a = tmp_dir() / (std::string("a") + ext);
      const fs::path b = tmp_dir() / (std::string("b") + ext);
      io::write_image(a, img, io::BitDepth::k8);
      io::write_image(b, io::read_image(a), io::BitDepth::k8);
      CHECK(io::read_file(a) == io::read_file(b));
    }
  }
  SUBCASE("PPM header") {
    ImageBuffer one(1, 1, 1.0);
    CHECK(io::encode_ppm(one) == std::string("P6\n1 1\n255\n\xff\xff\xff"));
    CHECK(io::encode_ppm(one, io::BitDepth::k16) == std::string("P6\n1 1\n65535\n\xff\xff\xff\xff\xff\xff"));
    const ImageBuffer c = io::decode_ppm(std::string("P6\n# comment\n1 1\n255\n\x80\x00\xff", 24));
    CHECK(c.at(0, 0, 0) == 128.0 / 255);
  }
  SUBCASE("unsupported inputs") {
    CHECK_THROWS_AS(io::decode_ppm("P3\n1 1\n255\n1 2 3\n"), FormatError);
    CHECK_THROWS_AS(io::decode_ppm(std::string("P6\n1 1\n70000\n\x00\x00\x00\x00\x00\x00", 19)), FormatError);
    CHECK_THROWS_AS(io::decode_ppm(std::string("P6\n2 1\n255\n\x00\x00\x00", 14)), FormatError);
    CHECK_THROWS_AS(io::write_image(tmp_dir() / "x.bmp", img), FormatError);
    CHECK_THROWS_AS(io::read_image(tmp_dir() / "x.tiff"), FormatError);
    const fs::path bogus = tmp_dir() / "bogus.png";
    io::write_file_atomic(bogus, "not a png at all");
    CHECK_THROWS_AS(io::read_image(bogus), FormatError);
  }
}

TEST_CASE("cameras") {
  const std::string identity = R"({"intrinsics": [80, 0, 47.5, 0, 80, 35.5, 0, 0, 1],
    "rotation": [1, 0, 0, 0, 1, 0, 0, 0, 1], "translation": [0, 0, 0], "width": 96, "height": 72})";
  SUBCASE("parse") {
    const CameraModel c = io::parse_camera(identity);
    CHECK(c.width() == 96);
    CHECK(c.intrinsics()(0, 2) == 47.5);
    CHECK(c.rotation() == Mat3::Identity());
  }
  SUBCASE("round trip") {
    const CameraModel c = CameraModel::pinhole(70, 40, 30, 81, 61)
                              .with_pose(Eigen::AngleAxisd(0.3, Vec3(1, 2, 3).normalized()).toRotationMatrix(),
                                         Vec3(0.1, -0.2, 0.3));
    const fs::path p = tmp_dir() / "cam.json";
    io::write_camera(p, c);
    const CameraModel back = io::read_camera(p);
    CHECK(back.intrinsics() == c.intrinsics());
    CHECK(back.rotation() == c.rotation());
    CHECK(back.translation() == c.translation());
  }
  SUBCASE("a reflection is not a rotation") {
    std::string bad = identity;
    bad.replace(bad.find("[1, 0, 0, 0, 1, 0, 0, 0, 1]"), 27, "[1, 0, 0, 0, 1, 0, 0, 0, -1]");
    CHECK_THROWS_AS(io::parse_camera(bad), ValidationError);
  }
  SUBCASE("malformed") {
    CHECK_THROWS_AS(io::parse_camera("{"), FormatError);
    CHECK_THROWS_AS(io::parse_camera("[]"), FormatError);
    CHECK_THROWS_AS(io::parse_camera(R"({"intrinsics": [1, 2], "rotation": [], "translation": []})"), FormatError);
  }
}

TEST_CASE("sparse depth files") {
  SUBCASE("parse with comments and blank lines") {
    const SparseDepth s = io::parse_sparse("# header\n10 20 4.5\n\n3 4 1e1  # trailing\n", 32, 32);
    REQUIRE(s.size() == 2);
    CHECK(s.observations()[0] == SparseObservation{10, 20, 4.5});
    CHECK(s.observations()[1] == SparseObservation{3, 4, 10.0});
  }
  SUBCASE("round trip") {
    SparseDepth s(50, 40, {{1, 2, 0.1}, {49, 39, 1.0 / 3}});
    const fs::path p = tmp_dir() / "sparse.txt";
    io::write_sparse(p, s);
    CHECK(io::read_sparse(p, 50, 40).observations() == s.observations());
  }
  SUBCASE("rejections") {
    CHECK_THROWS_AS(io::parse_sparse("40 1 2.0\n", 32, 32), ValidationError);
    CHECK_THROWS_AS(io::parse_sparse("1 1 -2.0\n", 32, 32), ValidationError);
    CHECK_THROWS_AS(io::parse_sparse("1 1 2.0\n1 1 3.0\n", 32, 32), ValidationError);
    CHECK_THROWS_AS(io::parse_sparse("1.5 1 2.0\n", 32, 32), FormatError);
    CHECK_THROWS_AS(io::parse_sparse("1 1\n", 32, 32), FormatError);
    CHECK_THROWS_AS(io::parse_sparse("1 1 2 3\n", 32, 32), FormatError);
  }
}

TEST_CASE("scattering parameter files") {
  const ScatteringParams p = io::parse_params(R"({"airlight": 0.8, "beta": 0.45})");
  CHECK(p.airlight == 0.8);
  CHECK(p.beta == 0.45);
  const fs::path f = tmp_dir() / "params.json";
  io::write_params(f, ScatteringParams{0.123456789, 0.987654321});
  const ScatteringParams back = io::read_params(f);
  CHECK(back.airlight == 0.123456789);
  CHECK(back.beta == 0.987654321);
  CHECK_THROWS_AS(io::parse_params(R"({"airlight": 1.5, "beta": 0.5})"), ValidationError);
  CHECK_THROWS_AS(io::parse_params(R"({"airlight": 0.5})"), FormatError);
  CHECK_THROWS_AS(io::parse_params(R"({"airlight": "high", "beta": 0.5})"), FormatError);
}

TEST_CASE("volume dumps") {
  CostVolume v(3, 2, 4, 3.0);
  for (std::size_t i = 0; i < v.data().size(); ++i) v.data()[i] = 0.25 * static_cast<double>(i);
  const std::string bytes = io::encode_volume(v);
  REQUIRE(bytes.size() == 16 + 24 * 4);
  CHECK(bytes.substr(0, 4) == "DCV1");
  CHECK(bytes.substr(4, 4) == std::string("\x03\x00\x00\x00", 4));
  CHECK(bytes.substr(12, 4) == std::string("\x04\x00\x00\x00", 4));
  CHECK(bytes.substr(16 + 4 * 5, 4) == float_le(1.25f));
  const CostVolume back = io::decode_volume(bytes);
  CHECK(back.data() == v.data());
  CHECK_THROWS_AS(io::decode_volume("DCV2" + bytes.substr(4)), FormatError);
  CHECK_THROWS_AS(io::decode_volume(bytes.substr(0, bytes.size() - 1)), FormatError);
}

TEST_CASE("run configuration") {
  SUBCASE("defaults round trip") {
    const io::RunConfig c;
    CHECK(io::parse_config(io::format_config(c)) == c);
    CHECK(io::parse_config("{}") == c);
  }
  SUBCASE("custom values round trip") {
    io::RunConfig c;
    c.reference = "ref.png";
    c.sources = {"a.png", "b.png"};
    c.src_cameras = {"a.json", "b.json"};
    c.hypotheses.count = 64;
    c.search.beta_steps = 7;
    c.search.delta_px = 3;
    c.gamma = 2.5;
    c.workers = 4;
    c.seed = 99;
    const io::RunConfig back = io::parse_config(io::format_config(c));
    CHECK(back == c);
  }
  SUBCASE("partial files keep defaults") {
    const io::RunConfig c = io::parse_config(R"({"radius": 0, "search": {"beta_steps": 3}})");
    CHECK(c.radius == 0);
    CHECK(c.search.beta_steps == 3);
    CHECK(c.search.refine_steps_beta == 4);
    CHECK(c.hypotheses.count == 256);
  }
  SUBCASE("type errors") {
    CHECK_THROWS_AS(io::parse_config(R"({"radius": "two"})"), FormatError);
    CHECK_THROWS_AS(io::parse_config("[1]"), FormatError);
  }
}

TEST_CASE("atomic writes replace the whole file") {
  const fs::path p = tmp_dir() / "atomic.txt";
  io::write_file_atomic(p, "a much longer first version");
  io::write_file_atomic(p, "short");
  CHECK(io::read_file(p) == "short");
  for (const auto& e : fs::directory_iterator(tmp_dir()))
    CHECK(e.path().filename().string().find(".tmp") == std::string::npos);
  CHECK_THROWS(io::read_file(tmp_dir() / "missing"));
}
