#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "xform/types.hpp"

namespace xform {

namespace detail {

// Skips whitespace and '#' comment lines between PGM header tokens.
inline std::string next_pgm_token(std::istream& in) {
  std::string token;
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
  while (c != EOF && !std::isspace(c)) {
    token.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (token.empty()) throw std::invalid_argument("truncated PGM header");
  return token;
}

}  // namespace detail

/// Reads an 8-bit grayscale PGM image: binary (P5) or ASCII (P2).
/// Pixel values land in [0, 255]; rows of the result are image rows.
inline Matrix read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  const std::string magic = detail::next_pgm_token(in);
  if (magic != "P5" && magic != "P2") throw std::invalid_argument("not a PGM file");
  const Index width = std::stoll(detail::next_pgm_token(in));
  const Index height = std::stoll(detail::next_pgm_token(in));
  const long maxval = std::stol(detail::next_pgm_token(in));
  if (width < 1 || height < 1) throw std::invalid_argument("bad PGM dimensions");
  if (maxval < 1 || maxval > 255) throw std::invalid_argument("unsupported PGM depth");

  Matrix img(height, width);
  if (magic == "P5") {
    std::string raw(static_cast<std::size_t>(width * height), '\0');
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
      throw std::invalid_argument("truncated PGM data");
    for (Index r = 0; r < height; ++r)
      for (Index c = 0; c < width; ++c)
        img(r, c) = static_cast<double>(
            static_cast<unsigned char>(raw[static_cast<std::size_t>(r * width + c)]));
  } else {
    for (Index r = 0; r < height; ++r)
      for (Index c = 0; c < width; ++c) {
        long value = 0;
        if (!(in >> value)) throw std::invalid_argument("truncated PGM data");
        img(r, c) = static_cast<double>(value);
      }
  }
  return img;
}

/// Binary P5 encoding with maxval 255; values are rounded and clamped.
inline std::string pgm_binary(const Matrix& img) {
  require_finite(img);
  std::ostringstream out;
  out << "P5\n" << img.cols() << ' ' << img.rows() << "\n255\n";
  std::string data(static_cast<std::size_t>(img.size()), '\0');
  for (Index r = 0; r < img.rows(); ++r)
    for (Index c = 0; c < img.cols(); ++c) {
      const long v = std::lround(img(r, c));
      data[static_cast<std::size_t>(r * img.cols() + c)] =
          static_cast<char>(static_cast<unsigned char>(std::min(255L, std::max(0L, v))));
    }
  out << data;
  return out.str();
}

}  // namespace xform
