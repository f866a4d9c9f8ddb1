// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#include "image.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <vector>

namespace helixmdc {
namespace {

uint8_t to_byte(double v) {
  return static_cast<uint8_t>(
      std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

Image from_rgb8(const std::vector<uint8_t>& rgb, int rows, int cols) {
  Image img;
  img.rows = rows;
  img.cols = cols;
  img.r.resize(rows, cols);
  img.g.resize(rows, cols);
  img.b.resize(rows, cols);
  for (int y = 0; y < rows; ++y)
    for (int x = 0; x < cols; ++x) {
      const size_t i = (static_cast<size_t>(y) * cols + x) * 3;
      img.r(y, x) = rgb[i] / 255.0;
      img.g(y, x) = rgb[i + 1] / 255.0;
      img.b(y, x) = rgb[i + 2] / 255.0;
    }
  return img;
}

bool has_suffix(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() &&
         s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

Image load_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open image: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P6") throw_invalid("load_ppm: only binary P6 supported");
  auto next_token = [&]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw_corrupt("load_ppm: truncated header");
  };
  const int cols = std::stoi(next_token());
  const int rows = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (cols < 1 || rows < 1) throw_corrupt("load_ppm: bad dimensions");
  if (maxval != 255) throw_invalid("load_ppm: only 8-bit images supported");
  in.get();  // single whitespace after maxval
  std::vector<uint8_t> rgb(static_cast<size_t>(rows) * cols * 3);
  in.read(reinterpret_cast<char*>(rgb.data()), rgb.size());
  if (static_cast<size_t>(in.gcount()) != rgb.size())
    throw_corrupt("load_ppm: truncated pixel data");
  return from_rgb8(rgb, rows, cols);
}

void save_ppm(const Image& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot write image: " + path);
  out << "P6\n" << img.cols << " " << img.rows << "\n255\n";
  for (int y = 0; y < img.rows; ++y)
    for (int x = 0; x < img.cols; ++x) {
      out.put(static_cast<char>(to_byte(img.r(y, x))));
      out.put(static_cast<char>(to_byte(img.g(y, x))));
      out.put(static_cast<char>(to_byte(img.b(y, x))));
    }
  if (!out) throw_io("write failure: " + path);
}

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};

Image load_png(const std::string& path) {
  std::unique_ptr<FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw_io("cannot open image: " + path);
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw_io("libpng initialization failed");
  }
  std::vector<uint8_t> rgb;
  int rows = 0, cols = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw_corrupt("load_png: decode error: " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  cols = static_cast<int>(png_get_image_width(png, info));
  rows = static_cast<int>(png_get_image_height(png, info));
  // normalize everything to 8-bit RGB
  png_set_expand(png);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  png_set_strip_alpha(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY ||
      png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  png_read_update_info(png, info);
  rgb.resize(static_cast<size_t>(rows) * cols * 3);
  std::vector<png_bytep> row_ptrs(rows);
  for (int y = 0; y < rows; ++y)
    row_ptrs[y] = rgb.data() + static_cast<size_t>(y) * cols * 3;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return from_rgb8(rgb, rows, cols);
}

void save_png(const Image& img, const std::string& path) {
  std::unique_ptr<FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw_io("cannot write image: " + path);
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw_io("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw_io("save_png: encode error: " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, img.cols, img.rows, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<uint8_t> row(static_cast<size_t>(img.cols) * 3);
  for (int y = 0; y < img.rows; ++y) {
    for (int x = 0; x < img.cols; ++x) {
      row[x * 3] = to_byte(img.r(y, x));
      row[x * 3 + 1] = to_byte(img.g(y, x));
      row[x * 3 + 2] = to_byte(img.b(y, x));
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

Image load_image(const std::string& path) {
  if (has_suffix(path, ".ppm") || has_suffix(path, ".PPM"))
    return load_ppm(path);
  if (has_suffix(path, ".png") || has_suffix(path, ".PNG"))
    return load_png(path);
  throw_invalid("load_image: unsupported format (use .ppm or .png): " + path);
}

void save_image(const Image& img, const std::string& path) {
  if (img.rows < 1 || img.cols < 1) throw_invalid("save_image: empty image");
  if (has_suffix(path, ".ppm") || has_suffix(path, ".PPM")) {
    save_ppm(img, path);
    return;
  }
  if (has_suffix(path, ".png") || has_suffix(path, ".PNG")) {
    save_png(img, path);
    return;
  }
  throw_invalid("save_image: unsupported format (use .ppm or .png): " + path);
}

double mse(const Image& a, const Image& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw_invalid("mse: image shape mismatch");
  const double n = 3.0 * a.rows * a.cols;
  return ((a.r - b.r).squaredNorm() + (a.g - b.g).squaredNorm() +
          (a.b - b.b).squaredNorm()) /
         n;
}

double psnr_db(double mse_value) {
  if (mse_value <= 0.0) return 99.0;  // lossless cap for reporting
  return 10.0 * std::log10(1.0 / mse_value);
}

}  // namespace helixmdc
