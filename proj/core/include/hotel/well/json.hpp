#pragma once

// JSON form of a spectral state:
//   {"geometry": {"width": w, "origin": o}, "amps": [[re, im], ...]}

#include <nlohmann/json.hpp>

#include "hotel/well/spectral.hpp"

namespace hotel::well {

void to_json(nlohmann::json& j, const WellGeometry& g);
void from_json(const nlohmann::json& j, WellGeometry& g);
void to_json(nlohmann::json& j, const SpectralState& s);
void from_json(const nlohmann::json& j, SpectralState& s);

}  // namespace hotel::well
