#pragma once

// Eigenbasis representation of states in an infinite square well.
//
// Conventions: natural units hbar = m = 1 unless PhysicalConstants says
// otherwise. Amplitude storage is 0-based while quantum numbers are 1-based:
// amps[0] is the amplitude of n = 1.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hotel::well {

using cplx = std::complex<double>;
using Amplitudes = Eigen::VectorXcd;

struct WellGeometry {
  double width = 1.0;
  double origin = 0.0;  // position of the left wall

  double end() const noexcept { return origin + width; }
  bool contains(const WellGeometry& other, double tol = 1e-12) const noexcept;
  bool operator==(const WellGeometry&) const = default;
};

struct PhysicalConstants {
  double hbar = 1.0;
  double mass = 1.0;
};

/// Throws DomainError unless width > 0.
void validate(const WellGeometry& g);
/// Throws DomainError unless hbar > 0 and mass > 0.
void validate(const PhysicalConstants& c);

struct SpectralState {
  WellGeometry geometry;
  Amplitudes amps;

  SpectralState() = default;
  SpectralState(WellGeometry g, Amplitudes a);

  std::size_t modes() const noexcept { return static_cast<std::size_t>(amps.size()); }
  /// Amplitude of quantum number n (1-based); zero beyond the truncation.
  cplx amp(std::size_t n) const noexcept;
  double norm_squared() const noexcept { return amps.squaredNorm(); }
};

bool is_normalized(const SpectralState& s, double tol = 1e-12);

/// omega0 = hbar pi^2 / (2 m width^2), so that E_n = hbar omega0 n^2.
double omega0(double width, const PhysicalConstants& c = {});
double energy(std::size_t n, double width, const PhysicalConstants& c = {});
/// Full revival period 2 pi / omega0 of a well of the given width.
double revival_time(double width, const PhysicalConstants& c = {});

/// sqrt(2/width) sin(pi n (x - origin) / width); DomainError outside the
/// closed interval [origin, origin + width] or for n == 0.
double eigenfunction(std::size_t n, double x, const WellGeometry& g);

/// |n> in a truncation of `modes` levels.
SpectralState basis_state(const WellGeometry& g, std::size_t n, std::size_t modes);

/// alpha_n <- exp(-i E_n t / hbar) alpha_n.
SpectralState free_evolve(const SpectralState& s, double t, const PhysicalConstants& c = {});

/// Parity about the well centre: alpha_n <- (-1)^(n+1) alpha_n.
SpectralState mirror(const SpectralState& s);

/// Multiply every amplitude by the same complex factor.
SpectralState scaled(const SpectralState& s, cplx factor);

/// Inner product sum conj(a_n) b_n. GeometryMismatch if the wells differ.
cplx overlap(const SpectralState& a, const SpectralState& b);
double fidelity(const SpectralState& a, const SpectralState& b);

/// Matrix P with P(m-1, n-1) = integral over the intersection of both wells
/// of [eigenfunction n of `from`] * [eigenfunction m of `to`]. Closed form
/// via the product-to-sum identity; no quadrature.
Eigen::MatrixXd projection_matrix(const WellGeometry& from, std::size_t from_modes,
                                  const WellGeometry& to, std::size_t to_modes);

/// Real matrix times complex vector without promoting the matrix.
Amplitudes apply_real(const Eigen::MatrixXd& m, const Amplitudes& v);

/// Re-express a state in a larger well, the wavefunction being zero outside
/// its own domain. DomainError if `target` does not contain the source well.
SpectralState rebase(const SpectralState& s, const WellGeometry& target, std::size_t modes);

/// Project the restriction of the wavefunction to `target` (a sub-interval
/// of the source well) onto the eigenbasis of `target`.
SpectralState restrict_to(const SpectralState& s, const WellGeometry& target, std::size_t modes);

/// Truncated eigen-series sum_n alpha_n h_n(x).
cplx evaluate(const SpectralState& s, double x);
/// Evaluate many points at once.
Eigen::VectorXcd evaluate(const SpectralState& s, std::span<const double> xs);

/// Point value with Richardson extrapolation of the partial sums.
///
/// Partial sums of a sine series converge only as 1/N at points where the
/// function has a kink, which is exactly the situation at a protocol node.
/// With S(N) = f + A/N + C/N^3 + ..., the combination
/// (16 S(N) - 10 S(N/2) + S(N/4)) / 7 removes both leading error terms.
/// Falls back to the plain sum for fewer than 16 modes.
cplx evaluate_extrapolated(const SpectralState& s, double x);

/// Largest |psi| found on a uniform sampling of the well.
double peak_magnitude(const SpectralState& s, std::size_t samples = 0);

/// Complex-normal amplitudes on n <= support, zero above, normalized.
/// Deterministic for a given seed.
SpectralState random_state(const WellGeometry& g, std::size_t support, std::size_t modes,
                           unsigned long long seed);

/// Amplitudes as a plain vector (storage order, n = index + 1).
std::vector<cplx> to_vector(const SpectralState& s);

}  // namespace hotel::well
