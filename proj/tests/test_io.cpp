// Copyright 2026 The vseg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "support/testutil.hpp"
#include "vseg/common.hpp"
#include "vseg/flow_io.hpp"
#include "vseg/image_io.hpp"

using namespace vseg;

namespace {

std::vector<uint8_t> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::vector<uint8_t>((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
}

void spit(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("RGB PNG round-trips losslessly") {
  testutil::TempDir tmp("io_png");
  const RgbFrame frame = testutil::make_rgb_texture(37, 23, 5);
  const std::string path = tmp.path() + "/frame.png";
  io::write_rgb_png(frame, path);
  const RgbFrame back = io::read_rgb(path);
  CHECK(back.width == 37);
  CHECK(back.height == 23);
  CHECK(back.data == frame.data);
}

TEST_CASE("PNG encoding is deterministic and matches the file writer") {
  testutil::TempDir tmp("io_det");
  const RgbFrame frame = testutil::make_rgb_texture(19, 11, 9);
  const auto mem1 = io::encode_rgb_png(frame);
  const auto mem2 = io::encode_rgb_png(frame);
  CHECK(mem1 == mem2);
  const std::string path = tmp.path() + "/frame.png";
  io::write_rgb_png(frame, path);
  CHECK(slurp(path) == mem1);
}

TEST_CASE("JPEG files decode through the same entry point") {
  testutil::TempDir tmp("io_jpg");
  const RgbFrame frame = testutil::make_rgb_texture(32, 24, 3);
  const std::string path = tmp.path() + "/frame.jpg";
  io::write_rgb_jpeg(frame, path, 95);
  const RgbFrame back = io::read_rgb(path);
  CHECK(back.width == 32);
  CHECK(back.height == 24);
  // Lossy, but close: mean absolute error well under what mismatched or
  // corrupted pixel data would produce (~85 for unrelated images).
  double err = 0.0;
  for (size_t i = 0; i < frame.data.size(); ++i) {
    err += std::abs(static_cast<int>(frame.data[i]) - static_cast<int>(back.data[i]));
  }
  CHECK(err / static_cast<double>(frame.data.size()) < 16.0);
}

TEST_CASE("unknown extensions and missing files are errors") {
  testutil::TempDir tmp("io_bad");
  CHECK_THROWS_AS(io::read_rgb(tmp.path() + "/frame.bmp"), FormatError);
  CHECK_THROWS_AS(io::read_rgb(tmp.path() + "/missing.png"), IoError);
}

TEST_CASE("label PNGs round-trip, 8-bit when values fit") {
  testutil::TempDir tmp("io_label8");
  LabelMap labels = testutil::make_random_labels(21, 14, 6, 8);
  labels.at(3, 3) = 255;  // the ignore value still fits 8 bits
  const std::string path = tmp.path() + "/labels.png";
  io::write_label_png(labels, path);
  const LabelMap back = io::read_label_png(path, 6);
  CHECK(back.data == labels.data);
  CHECK(back.num_classes == 6);
}

TEST_CASE("label PNGs switch to 16-bit for wide taxonomies") {
  testutil::TempDir tmp("io_label16");
  LabelMap labels = testutil::make_random_labels(9, 7, 300, 12);
  labels.at(0, 0) = 299;
  const std::string path = tmp.path() + "/labels.png";
  io::write_label_png(labels, path);
  const LabelMap back = io::read_label_png(path, 300);
  CHECK(back.data == labels.data);
}

TEST_CASE("color PNGs are rejected as label inputs, naming the file") {
  testutil::TempDir tmp("io_label_bad");
  const std::string path = tmp.path() + "/color.png";
  io::write_rgb_png(testutil::make_rgb_texture(8, 8, 2), path);
  CHECK_THROWS_WITH_AS(io::read_label_png(path, 6), doctest::Contains("color.png"),
                       FormatError);
}

TEST_CASE("validity masks write 0/255 gray PNGs") {
  testutil::TempDir tmp("io_mask");
  ValidityMask mask = ValidityMask::create(5, 3, 1);
  mask.set(2, 1, false);
  const std::string path = tmp.path() + "/mask.png";
  io::write_mask_png(mask, path);
  const RgbFrame gray = io::read_rgb(path);  // gray expands to rgb on read
  CHECK(gray.pixel(0, 0)[0] == 255);
  CHECK(gray.pixel(2, 1)[0] == 0);
  CHECK(gray.pixel(2, 1)[1] == 0);
}

TEST_CASE("palette colorization maps classes and blacks out the ignore value") {
  LabelMap labels = LabelMap::create(3, 1, 2);
  labels.data = {0, 1, 255};
  const RgbFrame img = io::colorize_labels(labels, {{10, 20, 30}, {40, 50, 60}});
  CHECK(img.pixel(0, 0)[0] == 10);
  CHECK(img.pixel(1, 0)[2] == 60);
  CHECK(img.pixel(2, 0)[0] == 0);
  CHECK(img.pixel(2, 0)[1] == 0);
  CHECK(img.pixel(2, 0)[2] == 0);
}

TEST_CASE("flow files: frozen byte layout for a 2x1 field") {
  testutil::TempDir tmp("io_flo");
  FlowField f = FlowField::create(2, 1);
  f.set(0, 0, 1.5f, -2.0f);
  f.set(1, 0, 0.0f, 0.0f);
  const std::string path = tmp.path() + "/a.flo";
  io::write_flow(f, path);
  const auto bytes = slurp(path);
  // 4 magic + 4 width + 4 height + 4 floats payload = 28 bytes, little endian.
  const std::vector<uint8_t> expect = {
      0x50, 0x49, 0x45, 0x48,              // float 202021.25 = "PIEH"
      0x02, 0x00, 0x00, 0x00,              // width 2
      0x01, 0x00, 0x00, 0x00,              // height 1
      0x00, 0x00, 0xc0, 0x3f,              // 1.5f
      0x00, 0x00, 0x00, 0xc0,              // -2.0f
      0x00, 0x00, 0x00, 0x00,              // 0.0f
      0x00, 0x00, 0x00, 0x00,              // 0.0f
  };
  CHECK(bytes == expect);
  const FlowField back = io::read_flow(path);
  CHECK(back.width == 2);
  CHECK(back.height == 1);
  CHECK(back.data == f.data);
}

TEST_CASE("flow files round-trip arbitrary fields exactly") {
  testutil::TempDir tmp("io_flo_rt");
  FlowField f = FlowField::create(13, 7);
  for (int y = 0; y < 7; ++y) {
    for (int x = 0; x < 13; ++x) {
      f.set(x, y, static_cast<float>(testutil::urand(1, x, y) * 20 - 10),
            static_cast<float>(testutil::urand(2, x, y) * 20 - 10));
    }
  }
  const std::string path = tmp.path() + "/rt.flo";
  io::write_flow(f, path);
  const FlowField back = io::read_flow(path);
  CHECK(back.data == f.data);
}

TEST_CASE("corrupt flow files are rejected with the path in the message") {
  testutil::TempDir tmp("io_flo_bad");
  FlowField f = FlowField::create(2, 2);
  const std::string good = tmp.path() + "/good.flo";
  io::write_flow(f, good);
  auto bytes = slurp(good);

  const std::string bad_magic = tmp.path() + "/bad_magic.flo";
  auto tampered = bytes;
  tampered[0] = 0x00;
  spit(bad_magic, tampered);
  CHECK_THROWS_WITH_AS(io::read_flow(bad_magic), doctest::Contains("bad_magic.flo"),
                       FormatError);

  const std::string truncated = tmp.path() + "/short.flo";
  auto cut = bytes;
  cut.resize(bytes.size() - 3);
  spit(truncated, cut);
  CHECK_THROWS_AS(io::read_flow(truncated), FormatError);

  const std::string tiny = tmp.path() + "/tiny.flo";
  spit(tiny, {0x50, 0x49});
  CHECK_THROWS_AS(io::read_flow(tiny), FormatError);

  const std::string trailing = tmp.path() + "/trailing.flo";
  auto padded = bytes;
  padded.push_back(0x00);
  spit(trailing, padded);
  CHECK_THROWS_AS(io::read_flow(trailing), FormatError);

  CHECK_THROWS_AS(io::read_flow(tmp.path() + "/absent.flo"), IoError);
}

TEST_CASE("non-finite flow values are rejected when reading") {
  testutil::TempDir tmp("io_flo_nan");
  FlowField f = FlowField::create(1, 1);
  f.set(0, 0, std::numeric_limits<float>::quiet_NaN(), 0.0f);
  const std::string path = tmp.path() + "/nan.flo";
  io::write_flow(f, path);
  CHECK_THROWS_WITH_AS(io::read_flow(path), doctest::Contains("non-finite"), FormatError);
}
