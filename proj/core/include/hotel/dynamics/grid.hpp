#pragma once

// Uniform Dirichlet grid representation and the sine transform that
// diagonalizes its Laplacian.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "hotel/well/spectral.hpp"

namespace hotel::dynamics {

using well::cplx;

/// Samples psi(x_j) at the M interior points x_j = (j + 1) dx, dx = width / (M + 1),
/// of a well starting at 0. The walls themselves are implied zeros.
struct GridState {
  double width = 1.0;
  std::vector<cplx> samples;

  GridState() = default;
  GridState(double w, std::vector<cplx> s);

  std::size_t size() const noexcept { return samples.size(); }
  double dx() const noexcept { return width / static_cast<double>(samples.size() + 1); }
  double x(std::size_t j) const noexcept { return static_cast<double>(j + 1) * dx(); }
  /// Discrete norm sum |psi_j|^2 dx.
  double norm_squared() const noexcept;
};

/// Orthonormal DST-I of length M applied to complex data (real and imaginary
/// parts transformed together). The transform is its own inverse.
/// Owns an aligned work buffer; data is transformed in place there.
class SineTransform {
 public:
  explicit SineTransform(std::size_t m);
  ~SineTransform();
  SineTransform(const SineTransform&) = delete;
  SineTransform& operator=(const SineTransform&) = delete;
  SineTransform(SineTransform&& other) noexcept;
  SineTransform& operator=(SineTransform&& other) noexcept;

  std::size_t size() const noexcept { return m_; }
  /// Interleaved work buffer of size() complex values.
  cplx* data() noexcept { return reinterpret_cast<cplx*>(buf_); }
  const cplx* data() const noexcept { return reinterpret_cast<const cplx*>(buf_); }
  std::span<cplx> buffer() noexcept { return {data(), m_}; }

  /// Transform the work buffer in place.
  void execute() noexcept;
  /// Unnormalized transform; two of them multiply the data by 1 / raw_scale().
  void execute_raw() noexcept;
  double raw_scale() const noexcept { return scale_ * scale_; }
  /// Copy `in` into the buffer, transform, and copy back out.
  void apply(std::span<cplx> inout);

 private:
  void release() noexcept;

  std::size_t m_ = 0;
  double* buf_ = nullptr;
  void* plan_ = nullptr;
  double scale_ = 1.0;
};

/// Complex FFT pair on the odd extension (0, psi_1..psi_M, 0, -psi_M..-psi_1)
/// of length 2(M + 1). The Dirichlet sine modes are its Fourier modes, so a
/// diagonal multiply between forward() and backward() applies any function of
/// the Laplacian exactly. Cheaper than two real DST-I of the real and
/// imaginary parts. Neither direction is normalized.
class OddExtensionFft {
 public:
  explicit OddExtensionFft(std::size_t m);
  ~OddExtensionFft();
  OddExtensionFft(const OddExtensionFft&) = delete;
  OddExtensionFft& operator=(const OddExtensionFft&) = delete;

  std::size_t interior() const noexcept { return m_; }
  std::size_t length() const noexcept { return 2 * (m_ + 1); }
  cplx* data() noexcept { return reinterpret_cast<cplx*>(buf_); }

  /// Load interior samples and build the odd extension.
  void load(std::span<const cplx> interior);
  /// Copy the interior samples out.
  void store(std::span<cplx> interior) const;
  /// Rebuild the mirrored half from the interior samples.
  void mirror() noexcept;
  void forward() noexcept;
  void backward() noexcept;

 private:
  std::size_t m_ = 0;
  void* buf_ = nullptr;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
};

/// Sample a spectral state of a well at origin 0 on an M-point grid.
/// AliasingError if the state has more modes than grid points.
GridState to_grid(const well::SpectralState& s, std::size_t m);

/// Sine coefficients of the grid samples on levels 1..modes.
/// AliasingError if modes exceeds the number of grid points.
well::SpectralState to_spectral(const GridState& g, std::size_t modes);

/// Continuum kinetic energies hbar^2 (pi n / W)^2 / 2m for n = 1..M, the
/// eigenvalues applied by the spectral kinetic step.
std::vector<double> kinetic_energies(double width, std::size_t m,
                                     const well::PhysicalConstants& c = {});

/// Eigenvalues of the three-point finite-difference kinetic operator.
std::vector<double> fd_kinetic_energies(double width, std::size_t m,
                                        const well::PhysicalConstants& c = {});

}  // namespace hotel::dynamics
