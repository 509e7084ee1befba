#include "mesim/lumped.hpp"

#include <algorithm>
#include <string>

#include "mesim/errors.hpp"

namespace mesim {

const char* case_name(CaseTag tag) {
    switch (tag) {
        case CaseTag::Reference: return "reference";
        case CaseTag::LPEN: return "lpen";
        case CaseTag::LPGN: return "lpgn";
        case CaseTag::LPP2G: return "lpp2g";
    }
    return "?";
}

CaseTag case_from_name(const std::string& name) {
    if (name == "reference") return CaseTag::Reference;
    if (name == "lpen") return CaseTag::LPEN;
    if (name == "lpgn") return CaseTag::LPGN;
    if (name == "lpp2g") return CaseTag::LPP2G;
    throw SchemaError("unknown case '" + name + "'");
}

LpenResult lpen_step(double total_gen_mw, double total_load_mw,
                     const std::vector<PlantParams>& plants) {
    LpenResult r;
    r.rpf_mw = std::max(total_gen_mw - total_load_mw, 0.0);
    r.hv_import_mw = std::max(total_load_mw - total_gen_mw, 0.0);
    const double share_kw = plants.empty() ? 0.0 : r.rpf_mw * 1000.0 / plants.size();
    for (const auto& p : plants)
        r.plant_setpoint_kw[p.id] = std::min(share_kw, p.electrolyzer_kw);
    return r;
}

LpgnResult lpgn_step(double total_withdrawal_kgs, double sng_offered_kgs) {
    LpgnResult r;
    r.sng_accepted_kgs = std::min(sng_offered_kgs, total_withdrawal_kgs);
    r.import_kgs = std::max(total_withdrawal_kgs - r.sng_accepted_kgs, 0.0);
    return r;
}

double lpp2g_step(double el_in_kw, double eta_p2g, double aux_kw) {
    return eta_p2g * std::max(el_in_kw - aux_kw, 0.0);
}

} // namespace mesim
