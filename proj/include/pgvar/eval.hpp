#pragma once

#include "json.hpp"
#include "pgvar/estimation.hpp"
#include "pgvar/metrics.hpp"

namespace pgvar {

nlohmann::ordered_json to_json(const EvalReport& report);
nlohmann::ordered_json to_json(const GridRecord& record);
// Includes the selected coefficients in the model JSON coefficient layout.
nlohmann::ordered_json to_json(const FitReport& report);

}  // namespace pgvar
