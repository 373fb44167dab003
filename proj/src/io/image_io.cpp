#include "pose6d/io/image_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "pose6d/core/error.hpp"

namespace pose6d {

namespace {

constexpr long kMaxImageSide = 1 << 20;

/// Reads the three P5/P6 header integers, honoring PNM whitespace and
/// '#' comments, and returns the offset of the first payload byte (one
/// whitespace character past the maxval).
size_t parse_pnm_header(const std::string& bytes, const char* magic, int& w, int& h) {
  size_t pos = 0;
  const auto need = [&](size_t k) {
    if (pos + k > bytes.size()) throw ParseError("truncated header");
  };
  need(2);
  if (bytes[0] != magic[0] || bytes[1] != magic[1])
    throw ParseError(std::string("bad magic, expected ") + magic);
  pos = 2;

  long fields[3];
  for (long& field : fields) {
    // skip whitespace and comments
    while (true) {
      need(1);
      const char c = bytes[pos];
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos;
      } else {
        break;
      }
    }
    long value = 0;
    size_t digits = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      value = value * 10 + (bytes[pos] - '0');
      if (value > kMaxImageSide * 4) throw ParseError("header value out of range");
      ++pos;
      ++digits;
    }
    if (digits == 0) throw ParseError("malformed header integer");
    field = value;
  }
  need(1);
  const char sep = bytes[pos];
  if (sep != ' ' && sep != '\t' && sep != '\r' && sep != '\n')
    throw ParseError("missing whitespace after maxval");
  ++pos;

  if (fields[0] < 1 || fields[1] < 1 || fields[0] > kMaxImageSide || fields[1] > kMaxImageSide)
    throw ParseError("image dimensions out of range");
  if (fields[2] != 255) throw ParseError("unsupported maxval (only 255)");
  w = static_cast<int>(fields[0]);
  h = static_cast<int>(fields[1]);
  return pos;
}

uint8_t quantize(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0)
    throw InvalidArgumentError(std::string(what) + " values must lie in [0,1]");
  return static_cast<uint8_t>(std::lround(v * 255.0));
}

void append_u32_le(std::string& out, uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

uint32_t read_u32_le(const std::string& bytes, size_t pos) {
  return static_cast<uint32_t>(static_cast<uint8_t>(bytes[pos])) |
         static_cast<uint32_t>(static_cast<uint8_t>(bytes[pos + 1])) << 8 |
         static_cast<uint32_t>(static_cast<uint8_t>(bytes[pos + 2])) << 16 |
         static_cast<uint32_t>(static_cast<uint8_t>(bytes[pos + 3])) << 24;
}

}  // namespace

std::string write_ppm(const ImagePlane& red, const ImagePlane& green,
                      const ImagePlane& blue) {
  const int h = static_cast<int>(red.rows()), w = static_cast<int>(red.cols());
  if (h < 1 || w < 1) throw InvalidArgumentError("ppm: empty image");
  if (green.rows() != h || green.cols() != w || blue.rows() != h || blue.cols() != w)
    throw InvalidArgumentError("ppm: channel shapes differ");
  std::string out = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  out.reserve(out.size() + static_cast<size_t>(h) * w * 3);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      out.push_back(static_cast<char>(quantize(red(v, u), "ppm")));
      out.push_back(static_cast<char>(quantize(green(v, u), "ppm")));
      out.push_back(static_cast<char>(quantize(blue(v, u), "ppm")));
    }
  }
  return out;
}

void read_ppm(const std::string& bytes, ImagePlane& red, ImagePlane& green,
              ImagePlane& blue) {
  int w = 0, h = 0;
  const size_t offset = parse_pnm_header(bytes, "P6", w, h);
  const size_t expect = static_cast<size_t>(w) * h * 3;
  if (bytes.size() < offset + expect) throw ParseError("truncated pixel payload");
  if (bytes.size() > offset + expect) throw ParseError("trailing bytes after pixels");
  red.resize(h, w);
  green.resize(h, w);
  blue.resize(h, w);
  size_t pos = offset;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      red(v, u) = static_cast<uint8_t>(bytes[pos++]) / 255.0;
      green(v, u) = static_cast<uint8_t>(bytes[pos++]) / 255.0;
      blue(v, u) = static_cast<uint8_t>(bytes[pos++]) / 255.0;
    }
  }
}

std::string write_pgm(const IndexMatrix& values) {
  const int h = static_cast<int>(values.rows()), w = static_cast<int>(values.cols());
  if (h < 1 || w < 1) throw InvalidArgumentError("pgm: empty image");
  std::string out = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  out.reserve(out.size() + static_cast<size_t>(h) * w);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const int id = values(v, u);
      if (id < 0 || id > 255)
        throw InvalidArgumentError("pgm: value " + std::to_string(id) + " outside [0,255]");
      out.push_back(static_cast<char>(id));
    }
  }
  return out;
}

IndexMatrix read_pgm(const std::string& bytes) {
  int w = 0, h = 0;
  const size_t offset = parse_pnm_header(bytes, "P5", w, h);
  const size_t expect = static_cast<size_t>(w) * h;
  if (bytes.size() < offset + expect) throw ParseError("truncated pixel payload");
  if (bytes.size() > offset + expect) throw ParseError("trailing bytes after pixels");
  IndexMatrix out(h, w);
  size_t pos = offset;
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) out(v, u) = static_cast<uint8_t>(bytes[pos++]);
  return out;
}

std::string write_depth_raw(const ImagePlane& depth) {
  const int h = static_cast<int>(depth.rows()), w = static_cast<int>(depth.cols());
  if (h < 1 || w < 1) throw InvalidArgumentError("depth raw: empty image");
  std::string out = "P6DD1";
  append_u32_le(out, static_cast<uint32_t>(w));
  append_u32_le(out, static_cast<uint32_t>(h));
  out.reserve(out.size() + static_cast<size_t>(h) * w * 4);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const double d = depth(v, u);
      if (!std::isfinite(d) || d < 0.0)
        throw InvalidArgumentError("depth raw: depth must be finite and non-negative");
      append_u32_le(out, std::bit_cast<uint32_t>(static_cast<float>(d)));
    }
  }
  return out;
}

ImagePlane read_depth_raw(const std::string& bytes) {
  if (bytes.size() < 13 || bytes.compare(0, 5, "P6DD1") != 0)
    throw ParseError("bad magic, expected P6DD1");
  const uint32_t w = read_u32_le(bytes, 5);
  const uint32_t h = read_u32_le(bytes, 9);
  if (w < 1 || h < 1 || w > kMaxImageSide || h > kMaxImageSide)
    throw ParseError("image dimensions out of range");
  const size_t expect = 13 + static_cast<size_t>(w) * h * 4;
  if (bytes.size() < expect) throw ParseError("truncated depth payload");
  if (bytes.size() > expect) throw ParseError("trailing bytes after depth payload");
  ImagePlane out(h, w);
  size_t pos = 13;
  for (uint32_t v = 0; v < h; ++v) {
    for (uint32_t u = 0; u < w; ++u) {
      const float d = std::bit_cast<float>(read_u32_le(bytes, pos));
      pos += 4;
      if (!std::isfinite(d) || d < 0.0f)
        throw ParseError("depth must be finite and non-negative");
      out(v, u) = d;
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ParseError("write failed for '" + path + "'");
}

}  // namespace pose6d
