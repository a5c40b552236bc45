#include "hotel/io/raster.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <boost/endian/conversion.hpp>

#include "hotel/error.hpp"

namespace hotel::io {

namespace {

template <class T>
void put_le(std::ofstream& os, T v) {
  boost::endian::native_to_little_inplace(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get_le(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  boost::endian::little_to_native_inplace(v);
  return v;
}

void write(const std::filesystem::path& path, const char (&magic)[8], std::uint32_t rows,
           std::uint32_t cols, std::span<const double> values) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot write " + path.string());
  os.write(magic, 8);
  put_le(os, rows);
  put_le(os, cols);
  for (double v : values) put_le(os, std::bit_cast<std::uint64_t>(v));
  if (!os) throw Error("write failed for " + path.string());
}

}  // namespace

void write_raster(const std::filesystem::path& path, std::uint32_t rows, std::uint32_t cols,
                  std::span<const double> values) {
  if (values.size() != static_cast<std::size_t>(rows) * cols) {
    throw DomainError("raster size does not match rows * cols");
  }
  write(path, kRealMagic, rows, cols, values);
}

void write_complex_raster(const std::filesystem::path& path, std::uint32_t rows,
                          std::uint32_t cols, std::span<const std::complex<double>> values) {
  if (values.size() != static_cast<std::size_t>(rows) * cols) {
    throw DomainError("raster size does not match rows * cols");
  }
  // std::complex<double> is layout-compatible with double[2]
  const std::span<const double> flat(reinterpret_cast<const double*>(values.data()), 2 * values.size());
  write(path, kComplexMagic, rows, cols, flat);
}

Raster read_raster(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot read " + path.string());
  char magic[8];
  is.read(magic, 8);
  Raster r;
  if (std::memcmp(magic, kRealMagic, 8) == 0) {
    r.complex = false;
  } else if (std::memcmp(magic, kComplexMagic, 8) == 0) {
    r.complex = true;
  } else {
    throw Error(path.string() + " is not a hotel raster");
  }
  r.rows = get_le<std::uint32_t>(is);
  r.cols = get_le<std::uint32_t>(is);
  const std::size_t count = static_cast<std::size_t>(r.rows) * r.cols * (r.complex ? 2 : 1);
  r.data.resize(count);
  for (auto& v : r.data) v = std::bit_cast<double>(get_le<std::uint64_t>(is));
  if (!is) throw Error(path.string() + " is truncated");
  if (is.peek() != std::ifstream::traits_type::eof()) throw Error(path.string() + " has trailing bytes");
  return r;
}

}  // namespace hotel::io
