#include "dbi/pnm.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

#include "dbi/errors.hpp"

namespace dbi {

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream &in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) continue;
    break;
  }
  if (c == EOF) throw IoError("pnm: unexpected end of header");
  tok.push_back(static_cast<char>(c));
  while ((c = in.get()) != EOF && !std::isspace(c) && c != '#')
    tok.push_back(static_cast<char>(c));
  if (c == '#') in.unget();
  return tok;
}

long parse_number(std::istream &in, const char *what) {
  const std::string tok = next_token(in);
  try {
    std::size_t pos = 0;
    const long v = std::stol(tok, &pos);
    if (pos != tok.size() || v < 0) throw IoError("");
    return v;
  } catch (...) {
    throw IoError(std::string("pnm: malformed ") + what + " '" + tok + "'");
  }
}

std::ifstream open_input(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("pnm: cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("pnm: cannot write '" + path + "'");
  return out;
}

} // namespace

Raster load_pgm(const std::string &path) {
  std::ifstream in = open_input(path);
  const std::string magic = next_token(in);
  if (magic != "P2" && magic != "P5")
    throw IoError("pgm: unsupported magic '" + magic + "' in " + path);
  const long w = parse_number(in, "width");
  const long h = parse_number(in, "height");
  const long maxval = parse_number(in, "maxval");
  if (w < 1 || h < 1) throw IoError("pgm: bad dimensions in " + path);
  if (maxval != 255)
    throw IoError("pgm: unsupported maxval " + std::to_string(maxval));

  Raster img(static_cast<int>(w), static_cast<int>(h));
  if (magic == "P2") {
    for (long y = 0; y < h; ++y)
      for (long x = 0; x < w; ++x) {
        const long v = parse_number(in, "pixel");
        if (v > 255) throw IoError("pgm: pixel out of range");
        img(static_cast<int>(x), static_cast<int>(y)) =
            static_cast<double>(v);
      }
  } else {
    // single whitespace byte after maxval, then raw rows
    std::vector<std::uint8_t> row(static_cast<std::size_t>(w));
    for (long y = 0; y < h; ++y) {
      in.read(reinterpret_cast<char *>(row.data()), w);
      if (in.gcount() != w) throw IoError("pgm: truncated pixel data");
      for (long x = 0; x < w; ++x)
        img(static_cast<int>(x), static_cast<int>(y)) =
            static_cast<double>(row[static_cast<std::size_t>(x)]);
    }
  }
  return img;
}

void save_pgm(const std::string &path, const Raster &img, bool binary) {
  std::ofstream out = open_output(path);
  out << (binary ? "P5" : "P2") << "\n"
      << img.width() << " " << img.height() << "\n255\n";
  auto quantize = [](double v) -> int {
    if (!(v > 0.0)) return 0; // also catches NaN
    if (v >= 255.0) return 255;
    return static_cast<int>(std::llround(v));
  };
  if (binary) {
    std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width()));
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x)
        row[static_cast<std::size_t>(x)] =
            static_cast<std::uint8_t>(quantize(img(x, y)));
      out.write(reinterpret_cast<const char *>(row.data()),
                static_cast<std::streamsize>(row.size()));
    }
  } else {
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x)
        out << quantize(img(x, y)) << (x + 1 == img.width() ? "" : " ");
      out << "\n";
    }
  }
  if (!out) throw IoError("pgm: write failed for " + path);
}

Mask load_pbm(const std::string &path) {
  std::ifstream in = open_input(path);
  const std::string magic = next_token(in);
  if (magic != "P1" && magic != "P4")
    throw IoError("pbm: unsupported magic '" + magic + "' in " + path);
  const long w = parse_number(in, "width");
  const long h = parse_number(in, "height");
  if (w < 1 || h < 1) throw IoError("pbm: bad dimensions in " + path);

  Mask m(static_cast<int>(w), static_cast<int>(h));
  if (magic == "P1") {
    for (long y = 0; y < h; ++y)
      for (long x = 0; x < w; ++x) {
        int c;
        do {
          c = in.get();
          if (c == '#')
            while ((c = in.get()) != EOF && c != '\n') {
            }
        } while (c != EOF && std::isspace(c));
        if (c != '0' && c != '1') throw IoError("pbm: malformed P1 data");
        if (c == '1') m.set(static_cast<int>(x), static_cast<int>(y));
      }
  } else {
    const long row_bytes = (w + 7) / 8;
    std::vector<std::uint8_t> row(static_cast<std::size_t>(row_bytes));
    for (long y = 0; y < h; ++y) {
      in.read(reinterpret_cast<char *>(row.data()), row_bytes);
      if (in.gcount() != row_bytes) throw IoError("pbm: truncated data");
      for (long x = 0; x < w; ++x) {
        const std::uint8_t byte = row[static_cast<std::size_t>(x / 8)];
        if (byte & (0x80u >> (x % 8)))
          m.set(static_cast<int>(x), static_cast<int>(y));
      }
    }
  }
  return m;
}

void save_pbm(const std::string &path, const Mask &mask, bool binary) {
  std::ofstream out = open_output(path);
  out << (binary ? "P4" : "P1") << "\n"
      << mask.width() << " " << mask.height() << "\n";
  if (binary) {
    const int row_bytes = (mask.width() + 7) / 8;
    std::vector<std::uint8_t> row(static_cast<std::size_t>(row_bytes));
    for (int y = 0; y < mask.height(); ++y) {
      std::fill(row.begin(), row.end(), 0);
      for (int x = 0; x < mask.width(); ++x)
        if (mask.test(x, y))
          row[static_cast<std::size_t>(x / 8)] |=
              static_cast<std::uint8_t>(0x80u >> (x % 8));
      out.write(reinterpret_cast<const char *>(row.data()), row_bytes);
    }
  } else {
    for (int y = 0; y < mask.height(); ++y) {
      for (int x = 0; x < mask.width(); ++x)
        out << (mask.test(x, y) ? '1' : '0')
            << (x + 1 == mask.width() ? "" : " ");
      out << "\n";
    }
  }
  if (!out) throw IoError("pbm: write failed for " + path);
}

namespace {
constexpr char kF64Magic[4] = {'D', 'B', 'I', 'F'};
}

Raster load_raster_f64(const std::string &path) {
  std::ifstream in = open_input(path);
  char magic[4];
  std::uint32_t w = 0, h = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char *>(&w), 4);
  in.read(reinterpret_cast<char *>(&h), 4);
  if (!in || std::memcmp(magic, kF64Magic, 4) != 0)
    throw IoError("f64: bad header in " + path);
  if (w < 1 || h < 1 || static_cast<std::uint64_t>(w) * h > (1u << 30))
    throw IoError("f64: implausible dimensions in " + path);
  Raster img(static_cast<int>(w), static_cast<int>(h));
  in.read(reinterpret_cast<char *>(img.data().data()),
          static_cast<std::streamsize>(img.size() * sizeof(double)));
  if (!in) throw IoError("f64: truncated data in " + path);
  return img;
}

void save_raster_f64(const std::string &path, const Raster &img) {
  std::ofstream out = open_output(path);
  const std::uint32_t w = static_cast<std::uint32_t>(img.width());
  const std::uint32_t h = static_cast<std::uint32_t>(img.height());
  out.write(kF64Magic, 4);
  out.write(reinterpret_cast<const char *>(&w), 4);
  out.write(reinterpret_cast<const char *>(&h), 4);
  out.write(reinterpret_cast<const char *>(img.data().data()),
            static_cast<std::streamsize>(img.size() * sizeof(double)));
  if (!out) throw IoError("f64: write failed for " + path);
}

} // namespace dbi
