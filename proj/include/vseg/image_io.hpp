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
//
// Image file I/O: 8-bit RGB frames (PNG or JPEG in, PNG out) and
// single-channel index PNGs for label maps (8-bit when the taxonomy fits,
// 16-bit otherwise). All PNG output is deterministic: fixed encoder
// settings, no ancillary chunks.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vseg/image.hpp"

namespace vseg::io {

/// Decode a PNG or JPEG file (by extension, case-insensitive) to 8-bit RGB.
/// Grayscale, palette and alpha PNGs are converted; 16-bit PNGs are reduced
/// to 8-bit.
RgbFrame read_rgb(const std::string& path);

void write_rgb_png(const RgbFrame& frame, const std::string& path);

/// PNG-encode to memory (same bytes a write_rgb_png file would contain).
std::vector<uint8_t> encode_rgb_png(const RgbFrame& frame);

/// JPEG output exists for building test inputs that exercise the JPEG
/// decode path; quality in [1,100].
void write_rgb_jpeg(const RgbFrame& frame, const std::string& path, int quality = 92);

/// Read a single-channel (grayscale) 8- or 16-bit PNG of class indices.
/// Color, palette or alpha PNGs are format errors naming the file.
LabelMap read_label_png(const std::string& path, int num_classes);

/// Write class indices as a single-channel PNG: 8-bit when num_classes fits
/// in 256 and every value is <= 255 (ignore label 255 included), else 16-bit.
void write_label_png(const LabelMap& labels, const std::string& path);

/// Validity mask as an 8-bit gray PNG, 0 = invalid, 255 = valid.
void write_mask_png(const ValidityMask& mask, const std::string& path);

/// Map labels through an RGB palette (one entry per class); labels outside
/// the palette (e.g. the ignore value) render black.
RgbFrame colorize_labels(const LabelMap& labels,
                         const std::vector<std::array<uint8_t, 3>>& palette);

}  // namespace vseg::io
