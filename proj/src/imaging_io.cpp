#include "finvert/imaging_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "finvert/error.hpp"

namespace finvert {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot open " + path.string() + " for writing");
  return out;
}

// PNM header token: skips whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

unsigned long parse_header_number(std::istream& in, const char* what) {
  const std::string tok = next_token(in);
  unsigned long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw Error(ErrorCode::Parse, std::string("pgm: malformed ") + what + " '" + tok + "'");
  }
  return v;
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Image checkerboard(std::size_t width, std::size_t height, std::size_t tile) {
  if (width == 0 || height == 0) throw Error(ErrorCode::InvalidInput, "checkerboard: zero dimension");
  if (tile == 0) throw Error(ErrorCode::InvalidInput, "checkerboard: tile must be >= 1");
  Image img(width, height, 0.0);
  for (std::size_t y = 0; y < height; ++y)
    for (std::size_t x = 0; x < width; ++x) img(x, y) = ((x / tile + y / tile) % 2 == 0) ? 0.0 : 1.0;
  return img;
}

Image add_gaussian_noise(const Image& img, const NoiseSpec& spec) {
  if (!std::isfinite(spec.sigma) || spec.sigma < 0.0) {
    throw Error(ErrorCode::InvalidInput, "noise: sigma must be finite and non-negative");
  }
  if (spec.sigma == 0.0) return img;
  std::mt19937_64 rng(spec.seed);
  constexpr double kScale = 0x1.0p-53;
  std::vector<double> px = img.pixels();
  for (std::size_t i = 0; i < px.size(); i += 2) {
    const double u1 = static_cast<double>((rng() >> 11) + 1) * kScale;
    const double u2 = static_cast<double>(rng() >> 11) * kScale;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    px[i] += spec.sigma * r * std::cos(angle);
    if (i + 1 < px.size()) px[i + 1] += spec.sigma * r * std::sin(angle);
  }
  return Image(img.width(), img.height(), std::move(px));
}

Image clamp(const Image& img, double lo, double hi) {
  std::vector<double> px = img.pixels();
  for (double& v : px) v = std::clamp(v, lo, hi);
  return Image(img.width(), img.height(), std::move(px));
}

Image read_pgm(std::istream& in) {
  const std::string magic = next_token(in);
  if (magic != "P2" && magic != "P5") throw Error(ErrorCode::Parse, "pgm: unsupported magic '" + magic + "'");
  const unsigned long width = parse_header_number(in, "width");
  const unsigned long height = parse_header_number(in, "height");
  const unsigned long maxval = parse_header_number(in, "maxval");
  if (width == 0 || height == 0) throw Error(ErrorCode::Parse, "pgm: zero dimension");
  if (maxval == 0 || maxval > 65535) throw Error(ErrorCode::Parse, "pgm: maxval must be in 1..65535");
  const std::size_t count = width * height;
  std::vector<double> px(count);
  const double scale = static_cast<double>(maxval);
  if (magic == "P2") {
    for (std::size_t i = 0; i < count; ++i) {
      const std::string tok = next_token(in);
      if (tok.empty()) throw Error(ErrorCode::Parse, "pgm: truncated payload");
      unsigned long v = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || v > maxval) {
        throw Error(ErrorCode::Parse, "pgm: bad sample '" + tok + "'");
      }
      px[i] = static_cast<double>(v) / scale;
    }
  } else {
    // next_token consumed the single whitespace byte after maxval.
    const std::size_t bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(count * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw Error(ErrorCode::Parse, "pgm: truncated payload");
    for (std::size_t i = 0; i < count; ++i) {
      const unsigned v = bytes == 2 ? (unsigned(raw[2 * i]) << 8) | raw[2 * i + 1] : raw[i];
      if (v > maxval) throw Error(ErrorCode::Parse, "pgm: sample exceeds maxval");
      px[i] = static_cast<double>(v) / scale;
    }
  }
  return Image(width, height, std::move(px));
}

Image read_pgm(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_pgm(in);
}

void write_pgm(std::ostream& out, const Image& img, unsigned maxval, PgmEncoding enc) {
  if (maxval == 0 || maxval > 65535) throw Error(ErrorCode::InvalidInput, "pgm: maxval must be in 1..65535");
  out << (enc == PgmEncoding::Binary ? "P5" : "P2") << "\n" << img.width() << " " << img.height() << "\n"
      << maxval << "\n";
  const double scale = static_cast<double>(maxval);
  std::size_t column = 0;
  for (double v : img.pixels()) {
    const auto q = static_cast<unsigned>(std::round(std::clamp(v, 0.0, 1.0) * scale));
    if (enc == PgmEncoding::Binary) {
      if (maxval > 255) out.put(static_cast<char>(q >> 8));
      out.put(static_cast<char>(q & 0xff));
    } else {
      out << q << (++column == img.width() ? "\n" : " ");
      if (column == img.width()) column = 0;
    }
  }
}

void write_pgm(const std::filesystem::path& path, const Image& img, unsigned maxval, PgmEncoding enc) {
  auto out = open_out(path);
  write_pgm(out, img, maxval, enc);
}

Sequence read_csv_signal(std::istream& in, std::ptrdiff_t origin) {
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r,");
    const char* first = line.data() + b;
    const char* last = line.data() + e + 1;
    if (*first == '+') ++first;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
      throw Error(ErrorCode::Parse, "csv: line " + std::to_string(lineno) + ": not a real number");
    }
    values.push_back(v);
  }
  if (values.empty()) throw Error(ErrorCode::Parse, "csv: no samples");
  return Sequence(std::move(values), origin);
}

Sequence read_csv_signal(const std::filesystem::path& path, std::ptrdiff_t origin) {
  auto in = open_in(path);
  return read_csv_signal(in, origin);
}

void write_csv_signal(std::ostream& out, const Sequence& s) {
  for (double v : s.values()) out << format_real(v) << "\n";
}

void write_csv_signal(const std::filesystem::path& path, const Sequence& s) {
  auto out = open_out(path);
  write_csv_signal(out, s);
}

}  // namespace finvert
