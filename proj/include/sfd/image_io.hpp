#ifndef SFD_IMAGE_IO_HPP
#define SFD_IMAGE_IO_HPP

#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <png.h>

#include "sfd/error.hpp"
#include "sfd/image.hpp"

namespace sfd {

// ---------------------------------------------------------------------------
// PGM (P2 ASCII / P5 binary), maxval up to 65535. Values are scaled onto the
// [0, 255] working range by 255/maxval, so a 16-bit 65535 reads as 255.0.
// ---------------------------------------------------------------------------

namespace detail {

inline int pgm_next_token(std::istream& in, std::string& tok) {
  tok.clear();
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
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  return tok.empty() ? EOF : 0;
}

inline long pgm_int_token(std::istream& in, const char* what) {
  std::string tok;
  if (pgm_next_token(in, tok) == EOF)
    throw Error(ErrorCode::UnsupportedFormat, std::string("PGM: missing ") + what);
  try {
    size_t pos = 0;
    long v = std::stol(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::UnsupportedFormat,
                std::string("PGM: bad ") + what + " '" + tok + "'");
  }
}

}  // namespace detail

inline GrayImage load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::FileNotReadable, "cannot open " + path);

  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P' || (magic[1] != '2' && magic[1] != '5'))
    throw Error(ErrorCode::UnsupportedFormat, path + ": not a P2/P5 PGM");
  const bool binary = magic[1] == '5';

  const long width = detail::pgm_int_token(in, "width");
  const long height = detail::pgm_int_token(in, "height");
  const long maxval = detail::pgm_int_token(in, "maxval");
  if (width == 0 || height == 0)
    throw Error(ErrorCode::ZeroSizedImage, path + ": zero-sized image");
  if (width < 0 || height < 0 || maxval <= 0 || maxval > 65535)
    throw Error(ErrorCode::UnsupportedFormat, path + ": bad PGM header");

  const double scale = 255.0 / static_cast<double>(maxval);
  const size_t n = static_cast<size_t>(width) * static_cast<size_t>(height);
  std::vector<double> data(n);

  if (binary) {
    // Header ends with exactly one whitespace byte, already consumed by the
    // maxval token reader.
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<uint8_t> raw(n * bytes);
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
    if (static_cast<size_t>(in.gcount()) != raw.size())
      throw Error(ErrorCode::UnsupportedFormat, path + ": truncated PGM data");
    for (size_t i = 0; i < n; ++i) {
      const unsigned v = bytes == 1 ? raw[i]
                                    : (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
      data[i] = static_cast<double>(v) * scale;
    }
  } else {
    for (size_t i = 0; i < n; ++i) {
      const long v = detail::pgm_int_token(in, "sample");
      if (v < 0 || v > maxval)
        throw Error(ErrorCode::UnsupportedFormat, path + ": sample out of range");
      data[i] = static_cast<double>(v) * scale;
    }
  }
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

inline uint8_t quantize8(double v) {
  const double c = std::clamp(v, 0.0, 255.0);
  return static_cast<uint8_t>(std::lround(c));
}

inline void save_pgm(const GrayImage& img, const std::string& path, bool ascii = false) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorCode::UnwritablePath, "cannot write " + path);
  if (ascii) {
    out << "P2\n" << img.width() << " " << img.height() << "\n255\n";
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x)
        out << static_cast<int>(quantize8(img.at(x, y))) << (x + 1 == img.width() ? '\n' : ' ');
    }
  } else {
    out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
    std::vector<uint8_t> row(img.width());
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) row[x] = quantize8(img.at(x, y));
      out.write(reinterpret_cast<const char*>(row.data()), row.size());
    }
  }
  if (!out)
    throw Error(ErrorCode::UnwritablePath, "write failed for " + path);
}

// ---------------------------------------------------------------------------
// Grayscale PNG via libpng. Color and palette images are rejected; bit
// depths 1/2/4 are expanded to 8, 16-bit samples are scaled by 255/65535.
// ---------------------------------------------------------------------------

inline GrayImage load_png(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp)
    throw Error(ErrorCode::FileNotReadable, "cannot open " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw Error(ErrorCode::UnsupportedFormat, "libpng init failed");
  }

  // Buffers live outside the setjmp region; only libpng calls happen inside.
  std::vector<uint8_t> raster;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0, height = 0;
  int bit_depth = 0, color_type = 0;
  bool failed = false;

  if (setjmp(png_jmpbuf(png))) {
    failed = true;
  } else {
    png_init_io(png, fp);
    png_read_info(png, info);
    png_get_IHDR(png, info, &width, &height, &bit_depth, &color_type,
                 nullptr, nullptr, nullptr);

    if (color_type != PNG_COLOR_TYPE_GRAY) {
      png_destroy_read_struct(&png, &info, nullptr);
      std::fclose(fp);
      throw Error(ErrorCode::UnsupportedFormat, path + ": only grayscale PNG is supported");
    }
    if (width == 0 || height == 0) {
      png_destroy_read_struct(&png, &info, nullptr);
      std::fclose(fp);
      throw Error(ErrorCode::ZeroSizedImage, path + ": zero-sized image");
    }

    if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    const size_t rowbytes = png_get_rowbytes(png, info);
    raster.assign(rowbytes * height, 0);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = raster.data() + y * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  }

  const int out_depth = bit_depth < 8 ? 8 : bit_depth;
  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(fp);
  if (failed)
    throw Error(ErrorCode::UnsupportedFormat, path + ": PNG decode error");

  const size_t n = static_cast<size_t>(width) * height;
  std::vector<double> data(n);
  if (out_depth == 16) {
    for (size_t i = 0; i < n; ++i) {
      const unsigned v = (static_cast<unsigned>(raster[2 * i]) << 8) | raster[2 * i + 1];
      data[i] = static_cast<double>(v) * (255.0 / 65535.0);
    }
  } else {
    for (size_t i = 0; i < n; ++i) data[i] = static_cast<double>(raster[i]);
  }
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

inline void save_png(const GrayImage& img, const std::string& path, int bit_depth = 8) {
  if (bit_depth != 8 && bit_depth != 16)
    throw Error(ErrorCode::InvalidArgument, "PNG bit depth must be 8 or 16");

  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp)
    throw Error(ErrorCode::UnwritablePath, "cannot write " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw Error(ErrorCode::UnwritablePath, "libpng init failed");
  }

  const int w = img.width(), h = img.height();
  const size_t rowbytes = static_cast<size_t>(w) * (bit_depth / 8);
  std::vector<uint8_t> raster(rowbytes * h);
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y) {
    rows[y] = raster.data() + static_cast<size_t>(y) * rowbytes;
    for (int x = 0; x < w; ++x) {
      const double c = std::clamp(img.at(x, y), 0.0, 255.0);
      if (bit_depth == 8) {
        rows[y][x] = static_cast<uint8_t>(std::lround(c));
      } else {
        // 65535/255 == 257 exactly, so 8-bit integer levels round-trip.
        const unsigned v = static_cast<unsigned>(std::lround(c * 257.0));
        rows[y][2 * x] = static_cast<uint8_t>(v >> 8);
        rows[y][2 * x + 1] = static_cast<uint8_t>(v & 0xff);
      }
    }
  }

  bool failed = false;
  if (setjmp(png_jmpbuf(png))) {
    failed = true;
  } else {
    png_init_io(png, fp);
    png_set_IHDR(png, info, w, h, bit_depth, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
  }
  png_destroy_write_struct(&png, &info);
  if (std::fclose(fp) != 0 || failed)
    throw Error(ErrorCode::UnwritablePath, path + ": PNG encode error");
}

// ---------------------------------------------------------------------------
// Format dispatch
// ---------------------------------------------------------------------------

/// Loads a PGM or grayscale PNG, sniffing the format from the file's magic
/// bytes. Intensities come back as reals in [0, 255].
inline GrayImage load_image(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe)
    throw Error(ErrorCode::FileNotReadable, "cannot open " + path);
  char magic[2] = {0, 0};
  probe.read(magic, 2);
  probe.close();
  if (magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5')) return load_pgm(path);
  if (static_cast<uint8_t>(magic[0]) == 0x89 && magic[1] == 'P') return load_png(path);
  throw Error(ErrorCode::UnsupportedFormat, path + ": unrecognized image format");
}

/// Saves by extension: .pgm as binary P5, .png as 8-bit grayscale PNG.
/// Values are clamped to [0, 255] and rounded to the nearest level, so a
/// save/load round trip moves no pixel by more than 0.5.
inline void save_image(const GrayImage& img, const std::string& path) {
  const auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".png") {
    save_png(img, path);
  } else if (ext == ".pgm") {
    save_pgm(img, path);
  } else {
    throw Error(ErrorCode::UnsupportedFormat, path + ": unsupported output extension");
  }
}

/// Masks serialize as PGM with {0, 255} levels.
inline void save_mask(const BinaryMask& mask, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorCode::UnwritablePath, "cannot write " + path);
  out << "P5\n" << mask.width() << " " << mask.height() << "\n255\n";
  std::vector<uint8_t> row(mask.width());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) row[x] = mask.get(x, y) ? 255 : 0;
    out.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
  if (!out)
    throw Error(ErrorCode::UnwritablePath, "write failed for " + path);
}

/// Reads a mask from any supported grayscale file, binarizing at 50% of the
/// file's maximum value (ground-truth maps are near-binary images).
inline BinaryMask load_mask(const std::string& path) {
  const GrayImage img = load_image(path);
  const double mx = img.max_value();
  const double thr = mx > 0.0 ? 0.5 * mx : 0.5;
  BinaryMask mask(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      mask.set(x, y, img.at(x, y) >= thr);
  return mask;
}

}  // namespace sfd

#endif
