#pragma once

// Input states written as text:
//   "h3"                 a single level
//   "(h1+h2)/sqrt2"      superpositions; "/√2" and "/sqrt(2)" also read
//   "h1 - 0.5i*h4"       real, imaginary or complex coefficients
//   "random"             complex-normal amplitudes on the lowest `support`
//                        levels, seeded
// The result is always normalized, so a trailing divisor only documents
// intent.

#include <cstddef>
#include <cstdint>
#include <string>

#include "hotel/well/spectral.hpp"

namespace hotel::io {

/// ConfigError on a syntax error or a level above `modes`.
well::SpectralState parse_input_state(const std::string& expr, const well::WellGeometry& g,
                                      std::size_t modes, std::size_t support = 8,
                                      std::uint64_t seed = 0);

/// Highest level an expression uses (support for "random").
std::size_t input_max_level(const std::string& expr, std::size_t support = 8);

}  // namespace hotel::io
