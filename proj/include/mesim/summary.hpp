#pragma once

#include <map>
#include <string>
#include <vector>

#include "mesim/results.hpp"
#include "mesim/scenario.hpp"

namespace mesim {

struct SeasonCells {
    std::map<int, double> plant_el_gwh;
    std::map<int, double> plant_sng_gwh;
    std::map<int, double> tr_demand_gwh;
    std::map<int, double> tr_res_gwh;
    std::map<int, double> tr_surplus_gwh;
    std::map<int, double> tr_absorbed_gwh;
    std::map<int, double> tr_rpf_gwh;
    double plant_el_total_gwh = 0.0;
    double plant_net_el_total_gwh = 0.0; // auxiliaries excluded
    double plant_sng_total_gwh = 0.0;
    double demand_total_gwh = 0.0;
    double res_total_gwh = 0.0;
    double surplus_total_gwh = 0.0;
    double absorbed_total_gwh = 0.0;
    double rpf_total_gwh = 0.0;
    double gas_demand_gwh = 0.0;
    double gas_import_gwh = 0.0;
    double gas_sng_gwh = 0.0;
};

struct SeasonalSummary {
    std::string case_name;
    std::string config_hash;
    SeasonCells heating;
    SeasonCells non_heating;
    SeasonCells year;
};

struct CaseDelta {
    std::string metric;
    std::string season;
    double reference = 0.0;
    double variant = 0.0;
    double relative = 0.0; // (variant - reference)/reference
    double ratio = 0.0;    // variant/reference
    bool defined = true;   // false when reference == 0
};

SeasonalSummary summarize_seasonal(const ResultSet& results, const TimeGrid& time,
                                   const SeasonCalendar& calendar, double sng_lhv_kwh_kg);

std::vector<CaseDelta> compare_cases(const SeasonalSummary& ref, const SeasonalSummary& variant);

/// Tidy plot-ready CSV for one view over a step window [from, to).
std::string emit_plotdata(const ResultSet& results, const TimeGrid& time, const std::string& view,
                          int from_step, int to_step);

std::string render_summary_tables(const SeasonalSummary& s);
std::string render_deltas(const std::vector<CaseDelta>& deltas);

} // namespace mesim
