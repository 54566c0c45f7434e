#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "rigidreg/io.hpp"
#include "rigidreg/report.hpp"
#include "support.hpp"

using namespace rigidreg;
using namespace rigidreg::testing;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/rigidreg_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("pgm round trip is bit exact") {
  auto img = make_smooth_image(2, 9, 3);
  // quantized copy: what a 16-bit file can carry
  for (auto& v : img.samples()) {
    v = std::min(1.0, std::max(0.0, v * 0.5 + 0.5));
    v = std::round(v * 65535.0) / 65535.0;
  }
  TempFile f("round.pgm");
  write_image(f.path, img);
  auto back = read_image(f.path);
  REQUIRE(back.dims() == 2);
  REQUIRE(back.extents() == img.extents());
  for (std::size_t i = 0; i < img.size(); ++i) CHECK(back.samples()[i] == img.samples()[i]);

  // second write of the read-back image produces identical bytes
  TempFile f2("round2.pgm");
  write_image(f2.path, back);
  std::ifstream a(f.path, std::ios::binary), b(f2.path, std::ios::binary);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
}

TEST_CASE("16-bit pgm samples are big-endian") {
  // hand-built 2x2 fixture: values 0, 1, 256, 65535 (big-endian byte pairs)
  TempFile f("fixture.pgm");
  {
    std::ofstream out(f.path, std::ios::binary);
    out << "P5\n2 2\n65535\n";
    const unsigned char bytes[] = {0, 0, 0, 1, 1, 0, 255, 255};
    out.write(reinterpret_cast<const char*>(bytes), sizeof(bytes));
  }
  auto img = read_image(f.path);
  CHECK(img.samples()[0] == doctest::Approx(0.0));
  CHECK(img.samples()[1] == doctest::Approx(1.0 / 65535.0));
  CHECK(img.samples()[2] == doctest::Approx(256.0 / 65535.0));
  CHECK(img.samples()[3] == doctest::Approx(1.0));
}

TEST_CASE("invert flag composes to identity") {
  auto img = make_smooth_image(2, 8, 5);
  for (auto& v : img.samples()) v = std::min(1.0, std::max(0.0, v + 0.5));
  TempFile f("inv.pgm");
  write_image(f.path, img);
  auto once = read_image(f.path, true);
  TempFile f2("inv2.pgm");
  write_image(f2.path, once);
  auto twice = read_image(f2.path, true);
  auto plain = read_image(f.path, false);
  for (std::size_t i = 0; i < plain.size(); ++i)
    CHECK(twice.samples()[i] == doctest::Approx(plain.samples()[i]).epsilon(1e-4));
}

TEST_CASE("rawvol round trip and malformed inputs") {
  auto vol = make_smooth_image(3, 6, 7, 1.2, 0.5);
  TempFile f("vol.rawvol");
  write_image(f.path, vol);
  auto back = read_image(f.path);
  REQUIRE(back.dims() == 3);
  CHECK(back.period() == doctest::Approx(0.5));
  for (std::size_t i = 0; i < vol.size(); ++i)
    CHECK(back.samples()[i] == doctest::Approx(vol.samples()[i]).epsilon(1e-6));

  TempFile bad("bad.rawvol");
  {
    std::ofstream out(bad.path, std::ios::binary);
    out << "RAWVOL 4 4 4 f32 1.0\n";
    const float one = 1.0f;  // truncated payload
    out.write(reinterpret_cast<const char*>(&one), sizeof(one));
  }
  CHECK_THROWS_AS(read_image(bad.path), IoError);

  TempFile garbled("garbled.img");
  {
    std::ofstream out(garbled.path, std::ios::binary);
    out << "NOTAFORMAT";
  }
  CHECK_THROWS_AS(read_image(garbled.path), IoError);
  CHECK_THROWS_AS(read_image("/nonexistent/path.pgm"), IoError);
}

TEST_CASE("ppm reads as luminance grayscale") {
  TempFile f("rgb.ppm");
  {
    std::ofstream out(f.path, std::ios::binary);
    out << "P6\n2 1\n255\n";
    const unsigned char px[] = {255, 0, 0, 0, 255, 0};  // red, green
    out.write(reinterpret_cast<const char*>(px), sizeof(px));
  }
  auto img = read_image(f.path);
  CHECK(img.samples()[0] == doctest::Approx(0.299));
  CHECK(img.samples()[1] == doctest::Approx(0.587));
}

TEST_CASE("report json has a stable schema and digests") {
  TempFile img_file("digest.pgm");
  auto img = make_smooth_image(2, 8, 9);
  for (auto& v : img.samples()) v = std::min(1.0, std::max(0.0, v + 0.5));
  write_image(img_file.path, img);

  RunReport report;
  report.command = "register2d";
  report.inputs = {{img_file.path, file_digest(img_file.path)}};
  report.config_echo = {{"epsilon-rel", "0.01"}};
  report.result["q_star"] = 1.25;
  report.wall_clock_seconds = {{"total", 0.1}};
  const ordered_json j = report.to_json();
  CHECK(j["schema"] == "rigidreg-report/1");
  CHECK(j["inputs"][0]["digest"].get<std::string>().substr(0, 8) == "fnv1a64:");
  // deterministic serialization
  CHECK(j.dump() == report.to_json().dump());

  // digest changes with content
  TempFile other("digest2.pgm");
  img.samples()[0] = 0.123;
  write_image(other.path, img);
  CHECK(file_digest(img_file.path) != file_digest(other.path));
}
