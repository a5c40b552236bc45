#include "hotel/well/json.hpp"

#include "hotel/error.hpp"

namespace hotel::well {

void to_json(nlohmann::json& j, const WellGeometry& g) {
  j = nlohmann::json{{"width", g.width}, {"origin", g.origin}};
}

void from_json(const nlohmann::json& j, WellGeometry& g) {
  g.width = j.at("width").get<double>();
  g.origin = j.value("origin", 0.0);
  validate(g);
}

void to_json(nlohmann::json& j, const SpectralState& s) {
  nlohmann::json amps = nlohmann::json::array();
  for (Eigen::Index k = 0; k < s.amps.size(); ++k) {
    amps.push_back({s.amps[k].real(), s.amps[k].imag()});
  }
  j = nlohmann::json{{"geometry", s.geometry}, {"amps", std::move(amps)}};
}

void from_json(const nlohmann::json& j, SpectralState& s) {
  const auto g = j.at("geometry").get<WellGeometry>();
  const auto& arr = j.at("amps");
  if (!arr.is_array() || arr.empty()) throw ConfigError("amps must be a non-empty array");
  Amplitudes a(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const auto& pair = arr[k];
    if (!pair.is_array() || pair.size() != 2) throw ConfigError("each amplitude is [re, im]");
    a[static_cast<Eigen::Index>(k)] = {pair[0].get<double>(), pair[1].get<double>()};
  }
  s = SpectralState(g, std::move(a));
}

}  // namespace hotel::well
