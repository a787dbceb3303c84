// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#include "pnm_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "error.hpp"

namespace dualmc {
namespace {

// Reads one whitespace-delimited token, skipping '#' comment lines.
std::string next_token(std::istream& in, const std::string& path) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  require(c != EOF, ErrorCode::parse, path + ": truncated netpbm header");
  while (c != EOF && !std::isspace(c)) {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  return tok;
}

long parse_header_int(std::istream& in, const std::string& path) {
  const std::string tok = next_token(in, path);
  require(!tok.empty() && tok.find_first_not_of("0123456789") == std::string::npos,
          ErrorCode::parse, path + ": bad netpbm header field '" + tok + "'");
  return std::stol(tok);
}

std::vector<std::uint8_t> read_raster(std::istream& in, std::size_t count,
                                      const std::string& path) {
  std::vector<std::uint8_t> bytes(count);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(count));
  require(static_cast<std::size_t>(in.gcount()) == count, ErrorCode::parse,
          path + ": truncated raster, expected " + std::to_string(count) + " bytes");
  return bytes;
}

std::ifstream open_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::io, "cannot open " + path);
  return in;
}

std::uint8_t to_byte(double v) {
  const double clamped = std::min(255.0, std::max(0.0, v));
  return static_cast<std::uint8_t>(std::llround(clamped));
}

void parse_magic_and_dims(std::istream& in, const std::string& path,
                          const char* magic, long& width, long& height) {
  require(next_token(in, path) == magic, ErrorCode::parse,
          path + ": unsupported magic number, expected " + magic);
  width = parse_header_int(in, path);
  height = parse_header_int(in, path);
  const long maxval = parse_header_int(in, path);
  require(maxval == 255, ErrorCode::parse,
          path + ": only 8-bit images supported (maxval 255)");
  require(width > 0 && height > 0, ErrorCode::parse, path + ": empty image");
}

}  // namespace

Matrix load_pgm(const std::string& path) {
  auto in = open_binary(path);
  long width = 0, height = 0;
  parse_magic_and_dims(in, path, "P5", width, height);
  const auto bytes = read_raster(in, static_cast<std::size_t>(width) * height, path);
  Matrix pixels(height, width);
  for (long i = 0; i < height; ++i)
    for (long j = 0; j < width; ++j)
      pixels(i, j) = static_cast<double>(bytes[static_cast<std::size_t>(i) * width + j]);
  return pixels;
}

void save_pgm(const Matrix& pixels, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::io, "cannot write " + path);
  out << "P5\n" << pixels.cols() << " " << pixels.rows() << "\n255\n";
  std::vector<std::uint8_t> bytes;
  bytes.reserve(static_cast<std::size_t>(pixels.size()));
  for (Index i = 0; i < pixels.rows(); ++i)
    for (Index j = 0; j < pixels.cols(); ++j) bytes.push_back(to_byte(pixels(i, j)));
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  require(out.good(), ErrorCode::io, "write failed for " + path);
}

RgbImage load_ppm(const std::string& path) {
  auto in = open_binary(path);
  long width = 0, height = 0;
  parse_magic_and_dims(in, path, "P6", width, height);
  const auto bytes = read_raster(in, 3 * static_cast<std::size_t>(width) * height, path);
  RgbImage img;
  img.r.resize(height, width);
  img.g.resize(height, width);
  img.b.resize(height, width);
  std::size_t k = 0;
  for (long i = 0; i < height; ++i) {
    for (long j = 0; j < width; ++j) {
      img.r(i, j) = static_cast<double>(bytes[k++]);
      img.g(i, j) = static_cast<double>(bytes[k++]);
      img.b(i, j) = static_cast<double>(bytes[k++]);
    }
  }
  return img;
}

void save_ppm(const RgbImage& image, const std::string& path) {
  require(image.g.rows() == image.rows() && image.b.rows() == image.rows() &&
              image.g.cols() == image.cols() && image.b.cols() == image.cols(),
          ErrorCode::shape_mismatch, "save_ppm: channel shapes differ");
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::io, "cannot write " + path);
  out << "P6\n" << image.cols() << " " << image.rows() << "\n255\n";
  std::vector<std::uint8_t> bytes;
  bytes.reserve(3 * static_cast<std::size_t>(image.r.size()));
  for (Index i = 0; i < image.rows(); ++i) {
    for (Index j = 0; j < image.cols(); ++j) {
      bytes.push_back(to_byte(image.r(i, j)));
      bytes.push_back(to_byte(image.g(i, j)));
      bytes.push_back(to_byte(image.b(i, j)));
    }
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  require(out.good(), ErrorCode::io, "write failed for " + path);
}

Matrix unfold_rgb(const RgbImage& image) {
  const Index m = image.rows(), n = image.cols();
  Matrix out(m, 3 * n);
  out.block(0, 0, m, n) = image.r;
  out.block(0, n, m, n) = image.g;
  out.block(0, 2 * n, m, n) = image.b;
  return out;
}

RgbImage refold_rgb(const Matrix& unfolded) {
  require(unfolded.cols() % 3 == 0, ErrorCode::shape_mismatch,
          "refold_rgb: column count must be divisible by 3");
  const Index m = unfolded.rows(), n = unfolded.cols() / 3;
  RgbImage img;
  img.r = unfolded.block(0, 0, m, n);
  img.g = unfolded.block(0, n, m, n);
  img.b = unfolded.block(0, 2 * n, m, n);
  return img;
}

Matrix stack_pgm_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  require(fs::is_directory(dir), ErrorCode::io, dir + " is not a directory");
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".pgm")
      paths.push_back(entry.path().string());
  require(!paths.empty(), ErrorCode::io, "no .pgm files in " + dir);
  std::sort(paths.begin(), paths.end());

  Matrix stacked;
  Index rows0 = 0, cols0 = 0;
  for (std::size_t k = 0; k < paths.size(); ++k) {
    const Matrix img = load_pgm(paths[k]);
    if (k == 0) {
      rows0 = img.rows();
      cols0 = img.cols();
      stacked.resize(img.size(), static_cast<Index>(paths.size()));
    } else {
      require(img.rows() == rows0 && img.cols() == cols0,
              ErrorCode::shape_mismatch,
              paths[k] + ": image dimensions differ from the first file");
    }
    Index p = 0;
    for (Index i = 0; i < img.rows(); ++i)
      for (Index j = 0; j < img.cols(); ++j) stacked(p++, k) = img(i, j);
  }
  return stacked;
}

}  // namespace dualmc
