#pragma once

// Sampled paraxial fields on a centred Cartesian grid and ideal lens
// transforms between conjugate planes.

#include <complex>
#include <cstddef>
#include <string>

#include <Eigen/Core>

namespace hotel::optics {

using cplx = std::complex<double>;
/// Row index is y (or v), column index is x (or u).
using ComplexGrid = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kHeNeWavelength = 632.8e-9;

/// Square grid: n x n pixels of size pitch, centred so that pixel n / 2 sits
/// on the optical axis.
struct GridSpec {
  std::size_t n = 1024;
  double pitch = 8e-6;
};

void validate(const GridSpec& g);

struct Field2D {
  ComplexGrid samples;
  double pitch_x = 1.0;
  double pitch_y = 1.0;
  double wavelength = kHeNeWavelength;
  std::string plane;

  std::size_t nx() const noexcept { return static_cast<std::size_t>(samples.cols()); }
  std::size_t ny() const noexcept { return static_cast<std::size_t>(samples.rows()); }
  /// Centred coordinates of column j and row i.
  double x(std::size_t j) const noexcept;
  double y(std::size_t i) const noexcept;
  /// sum |E|^2 pitch_x pitch_y.
  double power() const noexcept;
};

/// <a|b> including the pixel area; GeometryMismatch unless grids agree.
cplx inner(const Field2D& a, const Field2D& b);

/// Zero field on a grid.
Field2D blank(const GridSpec& g, double wavelength = kHeNeWavelength, std::string plane = "input");

/// Ring-Gaussian annulus exp(-((r - radius) / width)^2).
struct Ring {
  double radius = 0.0;
  double width = 0.0;
};

/// Unit-power ring-Gaussian mode with azimuthal phase exp(i l theta).
/// SamplingError if the ring does not fit in the grid (radius + 3 width past
/// the edge) or if the phase gets fewer than 8 pixels per 2 pi at the ring
/// radius; `l_max` widens that check to the largest |l| a caller will use.
Field2D make_oam_mode(int l, const Ring& ring, const GridSpec& g,
                      double wavelength = kHeNeWavelength, int l_max = 0);

/// Ideal 2f system: unitary centred 2D DFT. Output pitch is
/// wavelength f / (n pitch) per axis and power() is conserved. Sizes must be even.
Field2D fourier_lens(const Field2D& e, double focal_length);
/// Inverse of fourier_lens with the same focal length.
Field2D inverse_fourier_lens(const Field2D& e, double focal_length);

/// Multiply by exp(i phase) pointwise; sizes must match.
void apply_phase(Field2D& e, const Eigen::MatrixXd& phase);

}  // namespace hotel::optics
