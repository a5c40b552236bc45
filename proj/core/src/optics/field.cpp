#include "hotel/optics/field.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <fftw3.h>

#include "../detail/fftw_lock.hpp"
#include "hotel/error.hpp"

namespace hotel::optics {

namespace {

constexpr double kPi = std::numbers::pi;

// Centred DFT via checkerboard modulation around a plain FFT:
// sum_j x_j e^{-2 pi i (j - n/2)(k - n/2) / n} = (-1)^k e^{-i pi n} FFT((-1)^j x)_k.
void centred_dft(ComplexGrid& m, int sign) {
  const auto ny = static_cast<int>(m.rows());
  const auto nx = static_cast<int>(m.cols());
  if (ny % 2 != 0 || nx % 2 != 0) throw DomainError("fourier_lens needs even grid sizes");
  auto checker = [&]() {
    for (int j = 0; j < nx; ++j) {
      for (int i = (j % 2 == 0) ? 1 : 0; i < ny; i += 2) m(i, j) = -m(i, j);
    }
  };
  checker();
  auto* data = reinterpret_cast<fftw_complex*>(m.data());
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    // column-major storage read as row-major nx x ny: the same 2D transform
    plan = fftw_plan_dft_2d(nx, ny, data, data, sign, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw Error("FFTW failed to create a 2D plan");
  fftw_execute(plan);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  checker();
  // e^{-+ i pi n} per axis, +-1 for even n, and the unitary scale
  const double unit = ((nx + ny) / 2) % 2 == 0 ? 1.0 : -1.0;
  m *= unit / std::sqrt(static_cast<double>(nx) * static_cast<double>(ny));
}

Field2D lens(const Field2D& e, double f, int sign) {
  if (!(f > 0.0)) throw DomainError("focal length must be positive");
  Field2D out = e;
  centred_dft(out.samples, sign);
  out.pitch_x = e.wavelength * f / (static_cast<double>(e.nx()) * e.pitch_x);
  out.pitch_y = e.wavelength * f / (static_cast<double>(e.ny()) * e.pitch_y);
  // keep sum |E|^2 dx dy when the pixel area changes
  out.samples *= std::sqrt((e.pitch_x * e.pitch_y) / (out.pitch_x * out.pitch_y));
  return out;
}

}  // namespace

void validate(const GridSpec& g) {
  if (g.n < 8 || g.n % 2 != 0) throw DomainError("grid size must be even and >= 8");
  if (!(g.pitch > 0.0)) throw DomainError("grid pitch must be positive");
}

double Field2D::x(std::size_t j) const noexcept {
  return (static_cast<double>(j) - static_cast<double>(nx() / 2)) * pitch_x;
}

double Field2D::y(std::size_t i) const noexcept {
  return (static_cast<double>(i) - static_cast<double>(ny() / 2)) * pitch_y;
}

double Field2D::power() const noexcept { return samples.squaredNorm() * pitch_x * pitch_y; }

cplx inner(const Field2D& a, const Field2D& b) {
  if (a.nx() != b.nx() || a.ny() != b.ny() || a.pitch_x != b.pitch_x || a.pitch_y != b.pitch_y) {
    throw GeometryMismatch("fields live on different grids");
  }
  const cplx s = (a.samples.conjugate().array() * b.samples.array()).sum();
  return s * a.pitch_x * a.pitch_y;
}

Field2D blank(const GridSpec& g, double wavelength, std::string plane) {
  validate(g);
  if (!(wavelength > 0.0)) throw DomainError("wavelength must be positive");
  const auto n = static_cast<Eigen::Index>(g.n);
  return {ComplexGrid::Zero(n, n), g.pitch, g.pitch, wavelength, std::move(plane)};
}

Field2D make_oam_mode(int l, const Ring& ring, const GridSpec& g, double wavelength, int l_max) {
  Field2D e = blank(g, wavelength, "input");
  if (!(ring.radius > 0.0) || !(ring.width > 0.0)) {
    throw DomainError("ring radius and width must be positive");
  }
  const double half = 0.5 * static_cast<double>(g.n) * g.pitch;
  if (ring.radius + 3.0 * ring.width > half) {
    throw SamplingError("ring does not fit in the grid");
  }
  const int worst = std::max(std::abs(l), std::abs(l_max));
  if (worst > 0) {
    const double px_per_cycle = 2.0 * kPi * ring.radius / (worst * g.pitch);
    if (px_per_cycle < 8.0) {
      std::ostringstream msg;
      msg << "azimuthal phase of l = " << worst << " gets " << px_per_cycle
          << " px per cycle at the ring radius; need >= 8";
      throw SamplingError(msg.str());
    }
  }
  for (std::size_t j = 0; j < e.nx(); ++j) {
    const double x = e.x(j);
    for (std::size_t i = 0; i < e.ny(); ++i) {
      const double y = e.y(i);
      const double r = std::hypot(x, y);
      const double u = (r - ring.radius) / ring.width;
      const double amp = std::exp(-u * u);
      if (amp == 0.0) continue;
      e.samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          amp * std::polar(1.0, l * std::atan2(y, x));
    }
  }
  e.samples /= std::sqrt(e.power());
  return e;
}

Field2D fourier_lens(const Field2D& e, double focal_length) {
  Field2D out = lens(e, focal_length, FFTW_FORWARD);
  out.plane = "fourier";
  return out;
}

Field2D inverse_fourier_lens(const Field2D& e, double focal_length) {
  Field2D out = lens(e, focal_length, FFTW_BACKWARD);
  out.plane = "image";
  return out;
}

void apply_phase(Field2D& e, const Eigen::MatrixXd& phase) {
  if (phase.rows() != e.samples.rows() || phase.cols() != e.samples.cols()) {
    throw GeometryMismatch("phase mask size does not match the field");
  }
  for (Eigen::Index j = 0; j < phase.cols(); ++j) {
    for (Eigen::Index i = 0; i < phase.rows(); ++i) e.samples(i, j) *= std::polar(1.0, phase(i, j));
  }
}

}  // namespace hotel::optics
