// Copyright 2026 The miqm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/image_io.h"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <vector>

namespace miqm {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

bool has_suffix(const std::string& s, const std::string& suf) {
  if (s.size() < suf.size()) return false;
  for (size_t i = 0; i < suf.size(); ++i) {
    const char a = s[s.size() - suf.size() + i];
    const char b = suf[i];
    if (std::tolower(static_cast<unsigned char>(a)) != b) return false;
  }
  return true;
}

std::uint32_t rd_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::int32_t rd_i32le(const unsigned char* p) {
  return static_cast<std::int32_t>(rd_u32le(p));
}

std::uint16_t rd_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

Tensor read_image(const std::string& path) {
  if (has_suffix(path, ".png")) return read_png(path);
  if (has_suffix(path, ".bmp")) return read_bmp(path);
  throw std::invalid_argument("read_image: unsupported extension in " + path);
}

Tensor read_png(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw std::runtime_error("read_png: cannot open " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("read_png: png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("read_png: png_create_info_struct failed");
  }
  std::vector<png_bytep> row_ptrs;
  std::vector<unsigned char> pixels;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("read_png: decode failed for " + path);
  }
  png_init_io(png, f.get());
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);

  // Normalize every variant to 8-bit RGB.
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_GRAY ||
      color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const size_t stride = png_get_rowbytes(png, info);
  pixels.resize(stride * h);
  row_ptrs.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) row_ptrs[y] = pixels.data() + y * stride;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Tensor img = Tensor::hwc(static_cast<int>(h), static_cast<int>(w), 3);
  for (png_uint_32 y = 0; y < h; ++y) {
    const unsigned char* row = pixels.data() + y * stride;
    for (png_uint_32 x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        img.at(static_cast<int>(y), static_cast<int>(x), c) =
            static_cast<Scalar>(row[3 * x + c]) / 255.0;
      }
    }
  }
  return img;
}

Tensor read_bmp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_bmp: cannot open " + path);
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(f)),
                                 std::istreambuf_iterator<char>());
  if (raw.size() < 54 || raw[0] != 'B' || raw[1] != 'M') {
    throw std::runtime_error("read_bmp: not a BMP file: " + path);
  }
  const std::uint32_t data_offset = rd_u32le(&raw[10]);
  const std::uint32_t header_size = rd_u32le(&raw[14]);
  if (header_size < 40) {
    throw std::runtime_error("read_bmp: unsupported header in " + path);
  }
  const std::int32_t w = rd_i32le(&raw[18]);
  const std::int32_t h_signed = rd_i32le(&raw[22]);
  const std::uint16_t bpp = rd_u16le(&raw[28]);
  const std::uint32_t compression = rd_u32le(&raw[30]);
  if (w <= 0 || h_signed == 0 || bpp != 24 || compression != 0) {
    throw std::runtime_error("read_bmp: only 24-bit uncompressed supported: " +
                             path);
  }
  const bool top_down = h_signed < 0;
  const int h = top_down ? -h_signed : h_signed;
  const size_t stride = (static_cast<size_t>(w) * 3 + 3) & ~size_t(3);
  if (raw.size() < data_offset + stride * static_cast<size_t>(h)) {
    throw std::runtime_error("read_bmp: truncated file: " + path);
  }

  Tensor img = Tensor::hwc(h, w, 3);
  for (int y = 0; y < h; ++y) {
    const int src_y = top_down ? y : (h - 1 - y);
    const unsigned char* row = raw.data() + data_offset + stride * src_y;
    for (int x = 0; x < w; ++x) {
      // BMP stores BGR.
      img.at(y, x, 0) = static_cast<Scalar>(row[3 * x + 2]) / 255.0;
      img.at(y, x, 1) = static_cast<Scalar>(row[3 * x + 1]) / 255.0;
      img.at(y, x, 2) = static_cast<Scalar>(row[3 * x + 0]) / 255.0;
    }
  }
  return img;
}

void write_png(const std::string& path, const Tensor& img) {
  if (img.rank() != 3 || (img.c() != 1 && img.c() != 3)) {
    throw std::invalid_argument("write_png: image must be [H,W,1] or [H,W,3]");
  }
  const int h = img.h(), w = img.w(), c = img.c();
  std::vector<unsigned char> pixels(static_cast<size_t>(h) * w * c);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int ch = 0; ch < c; ++ch) {
        const Scalar v = std::min(Scalar(1), std::max(Scalar(0), img.at(y, x, ch)));
        pixels[(static_cast<size_t>(y) * w + x) * c + ch] =
            static_cast<unsigned char>(std::lround(v * 255.0));
      }
    }
  }

  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw std::runtime_error("write_png: cannot open " + path);
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("write_png: create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("write_png: create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("write_png: encode failed for " + path);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(w),
               static_cast<png_uint_32>(h), 8,
               c == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  // Fixed settings keep output bytes reproducible run to run.
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y)
    rows[static_cast<size_t>(y)] =
        pixels.data() + static_cast<size_t>(y) * w * c;
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void write_bmp(const std::string& path, const Tensor& img) {
  if (img.rank() != 3 || (img.c() != 1 && img.c() != 3)) {
    throw std::invalid_argument("write_bmp: image must be [H,W,1] or [H,W,3]");
  }
  const int h = img.h(), w = img.w(), c = img.c();
  const int stride = (3 * w + 3) & ~3;
  const std::uint32_t data_size = static_cast<std::uint32_t>(stride) * h;
  const std::uint32_t file_size = 54 + data_size;

  std::vector<unsigned char> out(file_size, 0);
  auto put16 = [&](size_t off, std::uint16_t v) {
    out[off] = static_cast<unsigned char>(v & 0xFF);
    out[off + 1] = static_cast<unsigned char>(v >> 8);
  };
  auto put32 = [&](size_t off, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
      out[off + i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  };
  out[0] = 'B';
  out[1] = 'M';
  put32(2, file_size);
  put32(10, 54);  // pixel data offset
  put32(14, 40);  // BITMAPINFOHEADER
  put32(18, static_cast<std::uint32_t>(w));
  put32(22, static_cast<std::uint32_t>(h));  // positive: bottom-up
  put16(26, 1);
  put16(28, 24);
  put32(34, data_size);

  for (int y = 0; y < h; ++y) {
    unsigned char* row = out.data() + 54 + static_cast<size_t>(stride) * (h - 1 - y);
    for (int x = 0; x < w; ++x) {
      unsigned char px[3];
      for (int ch = 0; ch < 3; ++ch) {
        const Scalar v = std::min(
            Scalar(1), std::max(Scalar(0), img.at(y, x, c == 1 ? 0 : ch)));
        px[ch] = static_cast<unsigned char>(std::lround(v * 255.0));
      }
      row[3 * x + 0] = px[2];  // BGR order
      row[3 * x + 1] = px[1];
      row[3 * x + 2] = px[0];
    }
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_bmp: cannot open " + path);
  f.write(reinterpret_cast<const char*>(out.data()), file_size);
  if (!f) throw std::runtime_error("write_bmp: write failed for " + path);
}

}  // namespace miqm
