#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "finvert/signal.hpp"

namespace finvert {

struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// 0/1 tiles of size tile x tile, pixel (0, 0) is 0.
Image checkerboard(std::size_t width, std::size_t height, std::size_t tile);

/// Adds zero-mean Gaussian noise. Samples come from std::mt19937_64 seeded
/// with `spec.seed` (a fully specified generator, identical on every
/// platform). Each pair of pixels in row-major order takes two draws k1, k2,
/// u1 = ((k1 >> 11) + 1) / 2^53 in (0, 1] and u2 = (k2 >> 11) / 2^53 in
/// [0, 1), and adds sigma sqrt(-2 ln u1) cos(2 pi u2) and
/// sigma sqrt(-2 ln u1) sin(2 pi u2) (Box-Muller).
Image add_gaussian_noise(const Image& img, const NoiseSpec& spec);

/// Clamps every pixel to [lo, hi].
Image clamp(const Image& img, double lo, double hi);

/// P2 or P5 grayscale, maxval 1..65535 (16-bit P5 samples are big-endian).
/// Pixels are mapped to [0, 1] as value / maxval.
Image read_pgm(std::istream& in);
Image read_pgm(const std::filesystem::path& path);

enum class PgmEncoding { Binary, Ascii };

/// Quantizes clamp(x, 0, 1) * maxval with round-half-away-from-zero.
void write_pgm(std::ostream& out, const Image& img, unsigned maxval = 255, PgmEncoding enc = PgmEncoding::Binary);
void write_pgm(const std::filesystem::path& path, const Image& img, unsigned maxval = 255,
               PgmEncoding enc = PgmEncoding::Binary);

/// One real per line; blank lines and lines starting with '#' are skipped.
Sequence read_csv_signal(std::istream& in, std::ptrdiff_t origin = 0);
Sequence read_csv_signal(const std::filesystem::path& path, std::ptrdiff_t origin = 0);
/// Writes with 17 significant digits.
void write_csv_signal(std::ostream& out, const Sequence& s);
void write_csv_signal(const std::filesystem::path& path, const Sequence& s);

/// Fixed 17-significant-digit rendering used by every text writer.
std::string format_real(double v);

}  // namespace finvert
