#pragma once

#include "mesim/results.hpp"
#include "mesim/scenario.hpp"

namespace mesim {

/// Drive the 15-minute co-simulation loop for one case over the whole
/// horizon. Deterministic; a module fault aborts with step context.
ResultSet run_case(const Scenario& scenario, CaseTag tag);

/// Full-year average conversion efficiency of the reference run,
/// SNG energy out over net electric energy in (auxiliaries excluded).
double calibrate_eta(const Scenario& scenario);

} // namespace mesim
