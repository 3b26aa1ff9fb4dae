#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "otkit/error.hpp"
#include "otkit/io.hpp"

using namespace otkit;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& bytes) {
  const auto p = std::filesystem::temp_directory_path() / ("otkit_io_" + name);
  std::ofstream out(p, std::ios::binary);
  out << bytes;
  return p;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("measure CSV round trip is exact") {
  for (int d = 1; d <= 3; ++d) {
    const DiscreteMeasure m = sample_uniform(64, d, WeightMode::unbalanced, 100 + d);
    std::stringstream ss;
    io::write_measure_csv(ss, m);
    CHECK(io::read_measure_csv(ss) == m);
  }
}

TEST_CASE("measure CSV header and rows are validated") {
  std::istringstream ok("x1,x2,w\n0.5,0.25,1\n1e-3,+2,0.5\n");
  const DiscreteMeasure m = io::read_measure_csv(ok);
  CHECK(m.dim() == 2);
  CHECK(m.point(1)[1] == 2.0);
  for (const char* bad : {"", "x,w\n0,1\n", "x1,x3,w\n0,0,1\n", "x1,w\n0,1,2\n", "x1,w\nabc,1\n",
                          "x1,w\n0,0\n", "x1,w\n0,-1\n", "x1,w\n", "x1,x2,x3,x4,w\n0,0,0,0,1\n"}) {
    std::istringstream in(bad);
    CHECK_THROWS_AS(io::read_measure_csv(in), InputError);
  }
}

TEST_CASE("ASCII PGM with comments") {
  std::istringstream in("P2\n# a comment\n3 2\n# another\n255\n0 51 102\n153 204 255\n");
  const GrayImage img = io::read_pgm(in);
  CHECK(img.rows == 2);
  CHECK(img.cols == 3);
  CHECK(img.pixels[1] == doctest::Approx(0.2));
  CHECK(img.pixels[5] == 1.0);
}

TEST_CASE("binary PGM, 8 and 16 bit") {
  std::string p8 = "P5\n2 1\n255\n";
  p8 += static_cast<char>(0);
  p8 += static_cast<char>(255);
  std::istringstream in8(p8);
  const GrayImage a = io::read_pgm(in8);
  CHECK(a.pixels == std::vector<double>{0.0, 1.0});

  std::string p16 = "P5 1 1 1000\n";
  p16 += static_cast<char>(0x01);  // 0x01F4 = 500, big-endian
  p16 += static_cast<char>(0xF4);
  std::istringstream in16(p16);
  CHECK(io::read_pgm(in16).pixels[0] == doctest::Approx(0.5));

  std::istringstream trunc("P5\n2 1\n255\nx");
  CHECK_THROWS_AS(io::read_pgm(trunc), InputError);
  std::istringstream over("P2 1 1 10 11");
  CHECK_THROWS_AS(io::read_pgm(over), InputError);
  std::istringstream magic("P3 1 1 10 1");
  CHECK_THROWS_AS(io::read_pgm(magic), InputError);
}

TEST_CASE("PGM write and read back") {
  GrayImage img{2, 2, {0.0, 1.0 / 255, 128.0 / 255, 1.0}};
  std::stringstream ss;
  io::write_pgm_ascii(ss, img);
  const GrayImage back = io::read_pgm(ss);
  CHECK(back.pixels == img.pixels);
}

TEST_CASE("measure files dispatch on extension") {
  const auto pgm = temp_file("m.pgm", "P2 2 2 4 0 1 2 4");
  const DiscreteMeasure m = io::read_measure_file(pgm);
  CHECK(m.size() == 3);
  CHECK(total_mass(m) == doctest::Approx(7.0 / 4));
  const auto csv = temp_file("m.csv", "x1,w\n0.5,2\n");
  CHECK(io::read_measure_file(csv).weight(0) == 2.0);
  CHECK_THROWS_AS(io::read_measure_file("/nonexistent/otkit.csv"), InputError);
}

TEST_CASE("digest and number formatting") {
  const auto a = temp_file("d1", "hello");
  const auto b = temp_file("d2", "hellp");
  CHECK(io::file_digest(a) == io::file_digest(a));
  CHECK(io::file_digest(a) != io::file_digest(b));
  CHECK(io::file_digest(a).size() == 16);
  // FNV-1a of the empty string
  CHECK(io::file_digest(temp_file("d3", "")) == "cbf29ce484222325");
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300}) {
    CHECK(std::strtod(io::format_double(x).c_str(), nullptr) == x);
  }
}

}
