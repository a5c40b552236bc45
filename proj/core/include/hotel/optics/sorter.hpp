#pragma once

// Log-polar OAM sorter: a transforming mask, a Fourier lens and a phase
// corrector map the ring (r, theta) onto a strip (u, v) = (-a ln(r / b), a theta),
// so that exp(i l theta) becomes a linear phase ramp across the strip.

#include <cstddef>

#include "hotel/optics/field.hpp"

namespace hotel::optics {

struct SorterConfig {
  double a = 0.0;  // scaling: the strip is 2 pi a wide
  double b = 0.0;  // radius imaged to u = 0
  double f = 0.0;  // focal length of the Fourier lens
  double wavelength = kHeNeWavelength;
};

void validate(const SorterConfig& c);

/// Defaults for a grid and ring: f = n pitch^2 / wavelength (the Fourier
/// plane keeps the input pitch), b = ring radius, and a chosen so that the
/// strip is exactly `strip_pixels` rows wide.
SorterConfig default_sorter(const GridSpec& g, const Ring& ring, std::size_t strip_pixels,
                            double wavelength = kHeNeWavelength);

/// phi1(x, y) = a k (y atan2(y, x) - x ln(r / b) + x), k = 2 pi / (wavelength f).
double sorter_phase1(double x, double y, const SorterConfig& c) noexcept;
/// phi2(u, v) = -a b k exp(-u / a) cos(v / a).
double sorter_phase2(double u, double v, const SorterConfig& c) noexcept;

Field2D apply_sorter_mask1(const Field2D& e, const SorterConfig& c);
Field2D apply_sorter_mask2(const Field2D& e, const SorterConfig& c);

/// mask1, Fourier lens, mask2.
Field2D sorter_unwrap(const Field2D& e, const SorterConfig& c);
/// The inverse chain: conj(mask2), inverse lens, conj(mask1).
Field2D sorter_wrap(const Field2D& e, const SorterConfig& c);

}  // namespace hotel::optics
