#pragma once

#include <json.hpp>

#include "iosim/parameters.hpp"

namespace iosim {

// JSON object form of a parameter set, the same layout as the parameter
// files: groups "conductances", "reversal_potentials", "capacitances",
// "coupling" (scalar values broadcast to N) plus the "stimuli" array.
nlohmann::json parameters_to_json(const CellParameters& params);
CellParameters parameters_from_json(const nlohmann::json& j, Eigen::Index n);

}  // namespace iosim
