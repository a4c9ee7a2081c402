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

#include "vseg/flow_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <memory>
#include <vector>

#include "vseg/common.hpp"

namespace vseg::io {

namespace {

constexpr float kFlowMagic = 202021.25f;  // encodes as "PIEH" in LE bytes
constexpr int kMaxDimension = 1 << 20;

void put_u32_le(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xFF));
  out.push_back(static_cast<uint8_t>((v >> 8) & 0xFF));
  out.push_back(static_cast<uint8_t>((v >> 16) & 0xFF));
  out.push_back(static_cast<uint8_t>((v >> 24) & 0xFF));
}

uint32_t get_u32_le(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

}  // namespace

FlowField read_flow(const std::string& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "rb"),
                                                    std::fclose);
  if (!f) throw IoError("cannot open " + path);

  std::vector<uint8_t> bytes;
  uint8_t buf[65536];
  size_t got;
  while ((got = std::fread(buf, 1, sizeof(buf), f.get())) > 0) {
    bytes.insert(bytes.end(), buf, buf + got);
  }

  if (bytes.size() < 12) throw FormatError("flow file too short: " + path);
  const float magic = std::bit_cast<float>(get_u32_le(bytes.data()));
  if (magic != kFlowMagic) throw FormatError("bad flow magic in " + path);
  const int32_t width = static_cast<int32_t>(get_u32_le(bytes.data() + 4));
  const int32_t height = static_cast<int32_t>(get_u32_le(bytes.data() + 8));
  if (width < 1 || height < 1 || width > kMaxDimension || height > kMaxDimension) {
    throw FormatError("implausible flow dimensions in " + path);
  }
  const size_t expected = 12 + static_cast<size_t>(width) * height * 2 * 4;
  if (bytes.size() < expected) throw FormatError("truncated flow payload in " + path);
  if (bytes.size() > expected) throw FormatError("trailing bytes after flow payload in " + path);

  FlowField flow = FlowField::create(width, height);
  for (size_t i = 0; i < flow.data.size(); ++i) {
    const float v = std::bit_cast<float>(get_u32_le(bytes.data() + 12 + 4 * i));
    if (!std::isfinite(v)) throw FormatError("non-finite flow value in " + path);
    flow.data[i] = v;
  }
  return flow;
}

void write_flow(const FlowField& flow, const std::string& path) {
  std::vector<uint8_t> bytes;
  bytes.reserve(12 + flow.data.size() * 4);
  put_u32_le(bytes, std::bit_cast<uint32_t>(kFlowMagic));
  put_u32_le(bytes, static_cast<uint32_t>(flow.width));
  put_u32_le(bytes, static_cast<uint32_t>(flow.height));
  for (float v : flow.data) put_u32_le(bytes, std::bit_cast<uint32_t>(v));

  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "wb"),
                                                    std::fclose);
  if (!f) throw IoError("cannot open " + path + " for writing");
  if (std::fwrite(bytes.data(), 1, bytes.size(), f.get()) != bytes.size()) {
    throw IoError("short write to " + path);
  }
}

}  // namespace vseg::io
