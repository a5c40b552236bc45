#pragma once

// The xp OAM multiplier: sort the ring into a strip, fan it out into p
// copies, correct the copy phases, demagnify by 1/p so the copies tile one
// azimuthal period, and wrap the strip back into a ring.

#include <cstddef>
#include <string>
#include <vector>

#include "hotel/optics/fanout.hpp"
#include "hotel/optics/field.hpp"
#include "hotel/optics/sorter.hpp"
#include "hotel/optics/spectrum.hpp"

namespace hotel::multiplier {

using optics::cplx;
using optics::Field2D;

struct MultiplierConfig {
  optics::GridSpec grid;
  optics::Ring ring;
  optics::SorterConfig sorter;
  optics::FanoutConfig fanout;
  int p = 3;
  std::size_t strip_pixels = 0;  // rows covered by one azimuthal period after unwrap
  bool phase_correction = true;
};

/// Throws DomainError on inconsistent settings (copies != p, strip too wide
/// for p copies, grating period not matching the strip).
void validate(const MultiplierConfig& c);

/// Desk-scale defaults: ring radius 0.3 n pitch and width 0.2 radius; strip
/// floor(n / (p + 0.2)) rows so p copies fit with a margin; balanced mu; the
/// grating period places copy k exactly k strips away.
MultiplierConfig default_multiplier(int p = 3, const optics::GridSpec& grid = {},
                                    double wavelength = optics::kHeNeWavelength,
                                    double radius_fraction = 0.3, double width_fraction = 0.2);

/// Ring annulus [radius - 2 width, radius + 2 width] holding the input.
struct Annulus {
  double inner = 0.0;
  double outer = 0.0;
};
Annulus design_annulus(const MultiplierConfig& c);
double fraction_outside(const Field2D& e, const Annulus& a);

struct MultiplyResult {
  Field2D field;
  double outside_fraction = 0.0;
  std::vector<std::string> warnings;
};

/// Caches every mask for one configuration; multiply() is const and safe to
/// call from several threads.
class OamMultiplier {
 public:
  explicit OamMultiplier(MultiplierConfig c);

  const MultiplierConfig& config() const noexcept { return cfg_; }

  MultiplyResult multiply(const Field2D& e) const;
  /// Stages, exposed for diagnostics.
  Field2D unwrap(const Field2D& e) const;
  Field2D fan_out(const Field2D& strip) const;
  Field2D demagnify(const Field2D& copies) const;
  Field2D wrap(const Field2D& strip) const;

 private:
  MultiplierConfig cfg_;
  optics::ComplexGrid mask1_;
  optics::ComplexGrid mask2_;
  std::vector<cplx> grating_;     // per row of the fan-out plane
  std::vector<cplx> correction_;  // per row of the image plane
};

MultiplyResult multiply_oam(const Field2D& e, const MultiplierConfig& c);

/// Where the non-target power comes from, as fractions of the input power
/// averaged over the input modes.
struct CrosstalkBudget {
  double fanout_loss = 0.0;     // power diffracted outside the p used orders
  double sorter_leakage = 0.0;  // off-target power after unwrap then wrap alone
  double seam = 0.0;            // the rest of the off-target power
};

struct CrosstalkMatrix {
  std::vector<int> l_in;
  int l_out_max = 0;
  std::vector<std::vector<double>> power;  // [row][l_out + l_out_max]
  CrosstalkBudget budget;

  double at(int in, int out) const;
};

/// Rows are independent and run on up to `threads` threads.
CrosstalkMatrix crosstalk_matrix(const OamMultiplier& m, const std::vector<int>& l_in,
                                 int l_out_max,
                                 optics::SpectrumMethod method = optics::SpectrumMethod::azimuthal,
                                 unsigned threads = 1);

struct PetalResult {
  int petals_in = 0;
  int petals_out = 0;
  double visibility_in = 0.0;
  double visibility_out = 0.0;
  optics::RingProfile ring_in;
  optics::RingProfile ring_out;
};

/// Dominant non-zero harmonic of a ring intensity; AmbiguousHarmonicError if
/// the runner-up carries at least 90% of its power.
int count_petals(const optics::RingProfile& ring);
/// (max - min) / (max + min) along the ring.
double visibility(const optics::RingProfile& ring);

/// Runs (|l> + |-l>) / sqrt 2 through the multiplier and counts petals.
PetalResult petal_test(int l, const OamMultiplier& m);

}  // namespace hotel::multiplier
