#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "wordfence/error.hpp"
#include "wordfence/grid.hpp"

// File formats.
//
// FTEN tensor: magic bytes 'F' 'T' 'E' 'N', u32 little-endian rank, rank
// u32 little-endian dims (slowest index first; rank 3 is height, width,
// channels), then the product of dims 32-bit little-endian IEEE-754 floats
// in row-major-then-channel order. Streams may hold several tensors
// back to back; each one is self-delimiting.
//
// Images use binary portable gray/pixmaps: P5 with maxval 255 for
// single-channel grids, P6 for RGB overlays.

namespace wf {

namespace detail {

inline void put_u32_le(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {
      static_cast<unsigned char>(v & 0xFF), static_cast<unsigned char>((v >> 8) & 0xFF),
      static_cast<unsigned char>((v >> 16) & 0xFF), static_cast<unsigned char>((v >> 24) & 0xFF)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32_le(std::istream& is, const std::string& name) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw IoError(name + ": truncated");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace detail

struct FtenBlob {
  std::vector<std::uint32_t> dims;
  std::vector<float> values;
};

inline void write_ften_stream(std::ostream& os, const std::vector<std::uint32_t>& dims,
                              const std::vector<float>& values) {
  std::uint64_t n = 1;
  for (std::uint32_t d : dims) n *= d;
  if (n != values.size()) throw InvalidInput("write_ften_stream: dims do not match value count");
  os.write("FTEN", 4);
  detail::put_u32_le(os, static_cast<std::uint32_t>(dims.size()));
  for (std::uint32_t d : dims) detail::put_u32_le(os, d);
  for (float f : values) detail::put_u32_le(os, std::bit_cast<std::uint32_t>(f));
}

inline FtenBlob read_ften_stream(std::istream& is, const std::string& name) {
  char magic[4];
  if (!is.read(magic, 4)) throw IoError(name + ": truncated FTEN header");
  if (magic[0] != 'F' || magic[1] != 'T' || magic[2] != 'E' || magic[3] != 'N')
    throw IoError(name + ": bad FTEN magic bytes");
  FtenBlob blob;
  const std::uint32_t rank = detail::get_u32_le(is, name);
  if (rank == 0 || rank > 8) throw IoError(name + ": unreasonable FTEN rank");
  std::uint64_t n = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    const std::uint32_t d = detail::get_u32_le(is, name);
    if (d == 0) throw IoError(name + ": zero FTEN dimension");
    blob.dims.push_back(d);
    n *= d;
    if (n > (1ull << 31)) throw IoError(name + ": FTEN tensor too large");
  }
  blob.values.resize(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < blob.values.size(); ++i)
    blob.values[i] = std::bit_cast<float>(detail::get_u32_le(is, name));
  return blob;
}

inline void write_ften(const std::string& path, const GridF& grid) {
  if (grid.empty()) throw InvalidInput("write_ften: empty grid");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError(path + ": cannot open for writing");
  std::vector<float> vals(grid.size());
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = static_cast<float>(grid.data()[i]);
  write_ften_stream(os,
                    {static_cast<std::uint32_t>(grid.height()),
                     static_cast<std::uint32_t>(grid.width()),
                     static_cast<std::uint32_t>(grid.channels())},
                    vals);
  if (!os) throw IoError(path + ": write failed");
}

inline GridF read_ften(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError(path + ": cannot open");
  const FtenBlob blob = read_ften_stream(is, path);
  if (blob.dims.size() != 3) throw IoError(path + ": expected a rank-3 FTEN tensor");
  GridF grid(static_cast<int>(blob.dims[0]), static_cast<int>(blob.dims[1]),
             static_cast<int>(blob.dims[2]));
  for (std::size_t i = 0; i < blob.values.size(); ++i)
    grid.data()[i] = static_cast<double>(blob.values[i]);
  return grid;
}

// ---------------------------------------------------------------------------
// Portable gray/pixmaps.
// ---------------------------------------------------------------------------

namespace detail {

// Reads one whitespace-delimited PNM header token, skipping '#' comments.
// Consumes exactly one whitespace character after the token, so the caller
// of the final header field lands on the first raster byte.
inline std::string pnm_token(std::istream& is, const std::string& name) {
  std::string tok;
  int ch = is.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = is.get();
    } else if (std::isspace(ch)) {
      if (!tok.empty()) return tok;
    } else {
      tok.push_back(static_cast<char>(ch));
    }
    ch = is.get();
  }
  if (tok.empty()) throw IoError(name + ": truncated PNM header");
  return tok;
}

inline int pnm_int(std::istream& is, const std::string& name) {
  const std::string tok = pnm_token(is, name);
  try {
    return std::stoi(tok);
  } catch (const std::exception&) {
    throw IoError(name + ": malformed PNM header field '" + tok + "'");
  }
}

}  // namespace detail

inline void write_pgm(const std::string& path, const GridU8& grid) {
  if (grid.empty()) throw InvalidInput("write_pgm: empty grid");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError(path + ": cannot open for writing");
  os << "P5\n" << grid.width() << " " << grid.height() << "\n255\n";
  os.write(reinterpret_cast<const char*>(grid.data().data()),
           static_cast<std::streamsize>(grid.size()));
  if (!os) throw IoError(path + ": write failed");
}

inline GridU8 read_pgm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError(path + ": cannot open");
  if (detail::pnm_token(is, path) != "P5") throw IoError(path + ": not a binary PGM (P5)");
  const int w = detail::pnm_int(is, path);
  const int h = detail::pnm_int(is, path);
  const int maxval = detail::pnm_int(is, path);
  if (w <= 0 || h <= 0) throw IoError(path + ": bad PGM dimensions");
  if (maxval != 255) throw IoError(path + ": only maxval 255 PGM supported");
  GridU8 grid(h, w);
  is.read(reinterpret_cast<char*>(grid.data().data()), static_cast<std::streamsize>(grid.size()));
  if (!is) throw IoError(path + ": truncated PGM data");
  return grid;
}

// RGB byte image for overlays, channels interleaved.
using RgbImage = Grid3<std::uint8_t>;

inline void write_ppm(const std::string& path, const RgbImage& img) {
  if (img.empty() || img.channels() != 3) throw InvalidInput("write_ppm: need a 3-channel image");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError(path + ": cannot open for writing");
  os << "P6\n" << img.width() << " " << img.height() << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.data().data()),
           static_cast<std::streamsize>(img.size()));
  if (!os) throw IoError(path + ": write failed");
}

inline RgbImage read_ppm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError(path + ": cannot open");
  if (detail::pnm_token(is, path) != "P6") throw IoError(path + ": not a binary PPM (P6)");
  const int w = detail::pnm_int(is, path);
  const int h = detail::pnm_int(is, path);
  const int maxval = detail::pnm_int(is, path);
  if (w <= 0 || h <= 0) throw IoError(path + ": bad PPM dimensions");
  if (maxval != 255) throw IoError(path + ": only maxval 255 PPM supported");
  RgbImage img(h, w, 3);
  is.read(reinterpret_cast<char*>(img.data().data()), static_cast<std::streamsize>(img.size()));
  if (!is) throw IoError(path + ": truncated PPM data");
  return img;
}

// ---------------------------------------------------------------------------
// Grayscale conversions (images on disk are 8-bit, in memory unit-range).
// ---------------------------------------------------------------------------

inline std::uint8_t gray_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

inline GridU8 gray_to_u8(const GridF& img) {
  if (img.empty() || img.channels() != 1) throw InvalidInput("gray_to_u8: need a 1-channel grid");
  GridU8 out(img.height(), img.width());
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = gray_byte(img.data()[i]);
  return out;
}

inline GridF u8_to_gray(const GridU8& img) {
  if (img.empty()) throw InvalidInput("u8_to_gray: empty grid");
  GridF out(img.height(), img.width(), 1);
  for (std::size_t i = 0; i < out.size(); ++i)
    out.data()[i] = static_cast<double>(img.data()[i]) / 255.0;
  return out;
}

}  // namespace wf
