#pragma once

// OAM content of a field: azimuthal decomposition on a polar resampling, or
// projection onto reference ring modes.

#include <vector>

#include "hotel/optics/field.hpp"

namespace hotel::optics {

enum class SpectrumMethod { azimuthal, projective };

/// Polar resampling used by the azimuthal method and the ring profiles.
/// Radii are in pixels from the optical axis.
struct PolarSampling {
  int radii = 800;
  int angles = 512;
  double r_min_px = 0.5;
  double r_max_fraction = 0.48;  // of the grid size
};

struct OamSpectrum {
  int l_max = 0;
  SpectrumMethod method = SpectrumMethod::azimuthal;
  std::vector<double> power;    // index l + l_max, fraction of input power
  std::vector<cplx> overlap;    // phase-bearing amplitude per l

  double at(int l) const;
  cplx amplitude(int l) const;
  double total() const noexcept;
  /// l with the largest power; ties go to the smaller l.
  int dominant() const;
};

/// Azimuthal method: sum over rings of |c_l(r)|^2 2 pi r dr. The overlap is
/// sqrt(P_l) with the phase of c_l at the radius where that harmonic peaks.
/// Projective method: <mode(l)|E> against ring modes, which needs `ring`.
/// SamplingError if the harmonic window is not resolved by the angular
/// samples or by the grid at the power-weighted mean radius (4 px per cycle).
OamSpectrum oam_spectrum(const Field2D& e, int l_max, SpectrumMethod method,
                         const Ring* ring = nullptr, const PolarSampling& polar = {});

/// Complex samples on the polar grid, row-major [radius][angle], by Keys
/// bicubic interpolation; points outside the grid read as zero.
struct PolarField {
  std::vector<double> radius_px;
  std::vector<double> theta;
  std::vector<cplx> values;
  const cplx& at(int r, int t) const { return values[static_cast<std::size_t>(r) * theta.size() + t]; }
};
PolarField polar_resample(const Field2D& e, const PolarSampling& polar = {});

/// Intensity around the ring of peak azimuthally integrated power.
struct RingProfile {
  double radius = 0.0;  // physical units
  std::vector<double> theta;
  std::vector<double> intensity;
};
RingProfile ring_intensity(const Field2D& e, const PolarSampling& polar = {});

}  // namespace hotel::optics
