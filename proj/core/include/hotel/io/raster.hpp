#pragma once

// Binary rasters: a 16-byte header (8-byte magic, u32 rows, u32 cols, both
// little-endian) followed by row-major little-endian float64 data.
//   "HOTELR64"  real samples, rows * cols values
//   "HOTELC64"  complex samples, rows * cols (re, im) pairs

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace hotel::io {

inline constexpr char kRealMagic[8] = {'H', 'O', 'T', 'E', 'L', 'R', '6', '4'};
inline constexpr char kComplexMagic[8] = {'H', 'O', 'T', 'E', 'L', 'C', '6', '4'};

struct Raster {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  bool complex = false;
  /// rows * cols values, or 2 * rows * cols interleaved for complex rasters.
  std::vector<double> data;
};

void write_raster(const std::filesystem::path& path, std::uint32_t rows, std::uint32_t cols,
                  std::span<const double> values);
void write_complex_raster(const std::filesystem::path& path, std::uint32_t rows,
                          std::uint32_t cols, std::span<const std::complex<double>> values);

/// Error on a bad magic or a size mismatch.
Raster read_raster(const std::filesystem::path& path);

}  // namespace hotel::io
