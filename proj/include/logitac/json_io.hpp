#pragma once

#include <json.hpp>

#include "logitac/dynamics.hpp"
#include "logitac/learner.hpp"
#include "logitac/logit.hpp"
#include "logitac/measure.hpp"

namespace logitac {

using json = nlohmann::json;

// {"interval":[lo,hi],"atoms":[[x,w],...]}
json to_json(const AtomicMeasure& mu);
AtomicMeasure atomic_measure_from_json(const json& j);

// {"interval":[lo,hi],"grid":M,"values":[...]}
json to_json(const GridDensity& p);
GridDensity grid_density_from_json(const json& j);

json to_json(const RunCheckpoint& cp);

json to_json(const TrajectoryPoint& point);

json to_json(const EquilibriumSet& set);
EquilibriumSet equilibrium_set_from_json(const json& j);

}  // namespace logitac
