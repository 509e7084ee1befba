#pragma once

#include <map>
#include <vector>

#include "mesim/plant.hpp"

namespace mesim {

enum class CaseTag { Reference, LPEN, LPGN, LPP2G };

const char* case_name(CaseTag tag);
CaseTag case_from_name(const std::string& name);

struct LpenResult {
    double rpf_mw = 0.0;
    double hv_import_mw = 0.0;
    std::map<int, double> plant_setpoint_kw;
};

struct LpgnResult {
    double import_kgs = 0.0;
    double sng_accepted_kgs = 0.0;
};

/// Single-node electricity balance: surplus and import are the positive
/// parts of the network imbalance, the surplus is split equally across
/// the plants and clamped at electrolyzer capacity.
LpenResult lpen_step(double total_gen_mw, double total_load_mw,
                     const std::vector<PlantParams>& plants);

/// Single-node gas balance: accepted SNG never exceeds the instantaneous
/// withdrawal, the shortfall is imported.
LpgnResult lpgn_step(double total_withdrawal_kgs, double sng_offered_kgs);

/// Fixed-efficiency plant: memoryless affine conversion above the
/// auxiliary threshold.
double lpp2g_step(double el_in_kw, double eta_p2g, double aux_kw);

} // namespace mesim
