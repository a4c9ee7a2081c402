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

#include "vseg/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>

#include <jpeglib.h>
#include <png.h>

#include "vseg/common.hpp"

namespace vseg::io {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open " + path);
  return f;
}

std::string lower_extension(const std::string& path) {
  const size_t dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

// ---------------------------------------------------------------------------
// PNG
// ---------------------------------------------------------------------------

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;

  PngReader() {
    png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png) info = png_create_info_struct(png);
    if (!png || !info) {
      png_destroy_read_struct(&png, &info, nullptr);
      throw IoError("libpng initialization failed");
    }
  }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;
  ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;

  PngWriter() {
    png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png) info = png_create_info_struct(png);
    if (!png || !info) {
      png_destroy_write_struct(&png, &info);
      throw IoError("libpng initialization failed");
    }
  }
  PngWriter(const PngWriter&) = delete;
  PngWriter& operator=(const PngWriter&) = delete;
  ~PngWriter() { png_destroy_write_struct(&png, &info); }
};

void append_bytes(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void flush_noop(png_structp) {}

/// Shared PNG encode path; rows must outlive the call.
std::vector<uint8_t> encode_png(int width, int height, int bit_depth, int color_type,
                                const std::vector<png_bytep>& rows) {
  PngWriter w;
  std::vector<uint8_t> out;
  if (setjmp(png_jmpbuf(w.png))) {
    throw IoError("PNG encoding failed");
  }
  png_set_write_fn(w.png, &out, append_bytes, flush_noop);
  // Fixed settings keep the byte stream reproducible across runs.
  png_set_compression_level(w.png, 6);
  png_set_filter(w.png, 0, PNG_FILTER_NONE);
  png_set_IHDR(w.png, w.info, width, height, bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(w.png, w.info);
  if (bit_depth == 16) png_set_swap(w.png);  // rows carry host-order uint16
  for (png_bytep row : rows) png_write_row(w.png, row);
  png_write_end(w.png, w.info);
  return out;
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
  FilePtr f = open_file(path, "wb");
  if (std::fwrite(bytes.data(), 1, bytes.size(), f.get()) != bytes.size()) {
    throw IoError("short write to " + path);
  }
}

// ---------------------------------------------------------------------------
// JPEG
// ---------------------------------------------------------------------------

struct JpegErrorTrap {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* trap = reinterpret_cast<JpegErrorTrap*>(cinfo->err);
  std::longjmp(trap->jump, 1);
}

RgbFrame read_jpeg(const std::string& path) {
  FilePtr f = open_file(path, "rb");
  jpeg_decompress_struct cinfo;
  JpegErrorTrap trap;
  cinfo.err = jpeg_std_error(&trap.mgr);
  trap.mgr.error_exit = jpeg_error_exit;
  if (setjmp(trap.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw FormatError("cannot decode JPEG " + path);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, f.get());
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);

  RgbFrame frame = RgbFrame::create(static_cast<int>(cinfo.output_width),
                                    static_cast<int>(cinfo.output_height));
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = frame.data.data() +
                   static_cast<size_t>(cinfo.output_scanline) * frame.width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return frame;
}

}  // namespace

RgbFrame read_rgb(const std::string& path) {
  const std::string ext = lower_extension(path);
  if (ext == "jpg" || ext == "jpeg") return read_jpeg(path);
  if (ext != "png") {
    throw FormatError("unsupported image extension on " + path + " (need png/jpg/jpeg)");
  }

  FilePtr f = open_file(path, "rb");
  PngReader r;
  if (setjmp(png_jmpbuf(r.png))) {
    throw FormatError("cannot decode PNG " + path);
  }
  png_init_io(r.png, f.get());
  png_read_info(r.png, r.info);

  // Normalize every input variant to 8-bit RGB.
  png_set_expand(r.png);
  if (png_get_bit_depth(r.png, r.info) == 16) png_set_strip_16(r.png);
  const png_byte color_type = png_get_color_type(r.png, r.info);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(r.png);
  }
  png_set_strip_alpha(r.png);
  png_read_update_info(r.png, r.info);

  const int width = static_cast<int>(png_get_image_width(r.png, r.info));
  const int height = static_cast<int>(png_get_image_height(r.png, r.info));
  if (png_get_rowbytes(r.png, r.info) != static_cast<size_t>(width) * 3) {
    throw FormatError("unexpected PNG layout in " + path);
  }
  RgbFrame frame = RgbFrame::create(width, height);
  for (int y = 0; y < height; ++y) {
    png_read_row(r.png, frame.data.data() + static_cast<size_t>(y) * width * 3, nullptr);
  }
  png_read_end(r.png, nullptr);
  return frame;
}

std::vector<uint8_t> encode_rgb_png(const RgbFrame& frame) {
  std::vector<png_bytep> rows(frame.height);
  for (int y = 0; y < frame.height; ++y) {
    rows[y] = const_cast<png_bytep>(frame.data.data() +
                                    static_cast<size_t>(y) * frame.width * 3);
  }
  return encode_png(frame.width, frame.height, 8, PNG_COLOR_TYPE_RGB, rows);
}

void write_rgb_png(const RgbFrame& frame, const std::string& path) {
  write_file(path, encode_rgb_png(frame));
}

void write_rgb_jpeg(const RgbFrame& frame, const std::string& path, int quality) {
  if (quality < 1 || quality > 100) {
    throw InvalidInputError("write_rgb_jpeg: quality must be in [1,100]");
  }
  FilePtr f = open_file(path, "wb");
  jpeg_compress_struct cinfo;
  JpegErrorTrap trap;
  cinfo.err = jpeg_std_error(&trap.mgr);
  trap.mgr.error_exit = jpeg_error_exit;
  if (setjmp(trap.jump)) {
    jpeg_destroy_compress(&cinfo);
    throw IoError("cannot encode JPEG " + path);
  }
  jpeg_create_compress(&cinfo);
  jpeg_stdio_dest(&cinfo, f.get());
  cinfo.image_width = static_cast<JDIMENSION>(frame.width);
  cinfo.image_height = static_cast<JDIMENSION>(frame.height);
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(
        frame.data.data() + static_cast<size_t>(cinfo.next_scanline) * frame.width * 3);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
}

LabelMap read_label_png(const std::string& path, int num_classes) {
  FilePtr f = open_file(path, "rb");
  PngReader r;
  if (setjmp(png_jmpbuf(r.png))) {
    throw FormatError("cannot decode PNG " + path);
  }
  png_init_io(r.png, f.get());
  png_read_info(r.png, r.info);

  const png_byte color_type = png_get_color_type(r.png, r.info);
  if (color_type != PNG_COLOR_TYPE_GRAY) {
    throw FormatError("label PNG must be single-channel grayscale: " + path);
  }
  if (png_get_bit_depth(r.png, r.info) < 8) {
    png_set_expand_gray_1_2_4_to_8(r.png);
  }
  png_read_update_info(r.png, r.info);
  const int bit_depth = png_get_bit_depth(r.png, r.info);
  const int width = static_cast<int>(png_get_image_width(r.png, r.info));
  const int height = static_cast<int>(png_get_image_height(r.png, r.info));

  LabelMap labels = LabelMap::create(width, height, num_classes);
  if (bit_depth == 8) {
    std::vector<uint8_t> row(width);
    for (int y = 0; y < height; ++y) {
      png_read_row(r.png, row.data(), nullptr);
      for (int x = 0; x < width; ++x) {
        labels.data[static_cast<size_t>(y) * width + x] = row[x];
      }
    }
  } else if (bit_depth == 16) {
    std::vector<uint8_t> row(static_cast<size_t>(width) * 2);
    for (int y = 0; y < height; ++y) {
      png_read_row(r.png, row.data(), nullptr);
      for (int x = 0; x < width; ++x) {
        // PNG 16-bit samples are big-endian.
        labels.data[static_cast<size_t>(y) * width + x] =
            static_cast<uint16_t>((row[2 * x] << 8) | row[2 * x + 1]);
      }
    }
  } else {
    throw FormatError("label PNG has unsupported bit depth in " + path);
  }
  png_read_end(r.png, nullptr);
  return labels;
}

void write_label_png(const LabelMap& labels, const std::string& path) {
  const uint16_t max_value =
      labels.data.empty() ? 0 : *std::max_element(labels.data.begin(), labels.data.end());
  const bool eight_bit = labels.num_classes <= 256 && max_value <= 255;

  std::vector<uint8_t> bytes;
  std::vector<png_bytep> rows(labels.height);
  if (eight_bit) {
    bytes.resize(labels.data.size());
    for (size_t i = 0; i < labels.data.size(); ++i) {
      bytes[i] = static_cast<uint8_t>(labels.data[i]);
    }
    for (int y = 0; y < labels.height; ++y) {
      rows[y] = bytes.data() + static_cast<size_t>(y) * labels.width;
    }
    write_file(path, encode_png(labels.width, labels.height, 8, PNG_COLOR_TYPE_GRAY, rows));
  } else {
    for (int y = 0; y < labels.height; ++y) {
      rows[y] = const_cast<png_bytep>(reinterpret_cast<const uint8_t*>(
          labels.data.data() + static_cast<size_t>(y) * labels.width));
    }
    write_file(path, encode_png(labels.width, labels.height, 16, PNG_COLOR_TYPE_GRAY, rows));
  }
}

void write_mask_png(const ValidityMask& mask, const std::string& path) {
  std::vector<uint8_t> bytes(mask.data.size());
  for (size_t i = 0; i < mask.data.size(); ++i) bytes[i] = mask.data[i] ? 255 : 0;
  std::vector<png_bytep> rows(mask.height);
  for (int y = 0; y < mask.height; ++y) {
    rows[y] = bytes.data() + static_cast<size_t>(y) * mask.width;
  }
  write_file(path, encode_png(mask.width, mask.height, 8, PNG_COLOR_TYPE_GRAY, rows));
}

RgbFrame colorize_labels(const LabelMap& labels,
                         const std::vector<std::array<uint8_t, 3>>& palette) {
  RgbFrame frame = RgbFrame::create(labels.width, labels.height);
  for (size_t i = 0; i < labels.data.size(); ++i) {
    const uint16_t v = labels.data[i];
    uint8_t* px = frame.data.data() + 3 * i;
    if (v < palette.size()) {
      px[0] = palette[v][0];
      px[1] = palette[v][1];
      px[2] = palette[v][2];
    }
  }
  return frame;
}

}  // namespace vseg::io
