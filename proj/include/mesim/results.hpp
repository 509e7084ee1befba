#pragma once

#include <map>
#include <string>
#include <vector>

#include "mesim/dispatch.hpp"

namespace mesim {

struct PlantRecord {
    double setpoint_kw = 0.0;
    double electric_kw = 0.0;   // including auxiliaries
    double aux_kw = 0.0;
    double soc = 0.0;
    double sng_kg_h = 0.0;
    int curtailment = 0;        // CurtailReason

    bool operator==(const PlantRecord&) const = default;
};

struct StepRecord {
    int step = 0;
    // electricity
    std::vector<double> voltage_pu;          // |v| per load node, empty for LPEN
    std::map<int, double> tr_surplus_mw;     // pre-dispatch RPF
    std::map<int, double> tr_import_mw;      // post-dispatch
    std::map<int, double> tr_rpf_mw;         // post-dispatch residual
    std::map<int, double> tr_demand_mw;      // user load behind the transformer
    std::map<int, double> tr_res_mw;         // VRES generation behind it
    std::map<int, double> tr_absorbed_mw;    // P2G consumption mapped to it
    double total_load_mw = 0.0;              // users only
    double total_gen_mw = 0.0;
    double losses_mw = 0.0;
    double surplus_mw = 0.0;                 // network-level, pre-dispatch
    double hv_import_mw = 0.0;
    double residual_rpf_mw = 0.0;
    double p2g_electric_mw = 0.0;
    // gas
    std::vector<double> gas_pressure_barg;   // per node, empty for LPGN
    std::vector<double> pipe_flow_kgs;       // mean over step, empty for LPGN
    double withdrawal_kgs = 0.0;
    double sng_injected_kgs = 0.0;
    double citygate_import_kgs = 0.0;        // mean over step
    double linepack_kg = 0.0;
    double linepack_kwh = 0.0;
    // plants
    std::map<int, PlantRecord> plants;

    bool operator==(const StepRecord&) const = default;
};

struct ResultSet {
    std::string case_name;
    std::string config_hash;
    std::string start_iso;
    double step_s = 900.0;
    double calibrated_eta = 0.0; // LPP2G only, 0 otherwise
    std::vector<StepRecord> records;

    bool operator==(const ResultSet&) const = default;
};

/// Writes trace.csv (long format, one row per timestep per entity field)
/// and meta.json under `dir`. Values round-trip bit exactly.
void persist_results(const ResultSet& results, const std::string& dir);

ResultSet load_results(const std::string& dir);

} // namespace mesim
