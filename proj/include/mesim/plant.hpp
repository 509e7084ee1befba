#pragma once

#include <vector>

#include "mesim/errors.hpp"

namespace mesim {

/// Piecewise-linear efficiency vs. load fraction. A single point means
/// a flat curve.
struct EfficiencyCurve {
    std::vector<double> load_fraction{1.0};
    std::vector<double> efficiency{0.61};

    double at(double fraction) const;
};

struct PlantParams {
    int id = 0;
    double electrolyzer_kw = 1200.0;        // electric input
    double methanation_kw = 600.0;          // SNG LHV output
    double buffer_kwh = 3060.0;             // H2 LHV
    double buffer_max_bar = 30.0;
    double methanation_on_bar = 15.0;
    double ramp_up_kg_h = 3.8;              // per 15-min step
    double ramp_down_kg_h = 46.0;
    double min_load_fraction = 0.5;
    double aux_kw = 12.0;                   // 1% of nominal electric load
    EfficiencyCurve electrolyzer_eff;
    double methanation_eff = 0.78;          // H2 LHV -> SNG LHV
    double sng_lhv_kwh_kg = 13.89;
    double h2_lhv_kwh_kg = 33.3;
    int electric_node = 0;
    int gas_node = 0;

    double methanation_capacity_kg_h() const { return methanation_kw / sng_lhv_kwh_kg; }
    double methanation_min_kg_h() const { return min_load_fraction * methanation_capacity_kg_h(); }
    void validate() const;
};

enum class MethanationMode { Standby, Running };

struct PlantState {
    double buffer_kwh = 0.0;
    double methanation_kg_h = 0.0;
    MethanationMode mode = MethanationMode::Standby;
    double electrolyzer_kw = 0.0;
    // cumulative ledgers
    double electric_in_kwh = 0.0;
    double h2_produced_kwh = 0.0;
    double sng_out_kwh = 0.0;

    double soc(const PlantParams& p) const { return buffer_kwh / p.buffer_kwh; }
    double buffer_pressure_bar(const PlantParams& p) const { return soc(p) * p.buffer_max_bar; }
};

struct ElectrolyzerResult {
    double consumed_kw = 0.0;
    double h2_kwh = 0.0;
};

struct MethanationResult {
    double sng_kg_h = 0.0;
    double h2_consumed_kwh = 0.0;
    MethanationMode mode = MethanationMode::Standby;
};

struct PlantStepResult {
    PlantState state;
    double electric_kw = 0.0; // electrolyzer plus auxiliaries
    double sng_kg_h = 0.0;
};

/// Largest electric load the electrolyzer can take this step without
/// overfilling the buffer (capacity clamp included).
double electrolyzer_headroom_kw(const PlantParams& p, const PlantState& s, double dt_s);

ElectrolyzerResult electrolyzer_step(const PlantParams& p, const PlantState& s,
                                     double setpoint_kw, double dt_s);

MethanationResult methanation_step(const PlantParams& p, const PlantState& s,
                                   double commanded_kg_h, double dt_s,
                                   double h2_available_kwh);

PlantState buffer_update(const PlantParams& p, const PlantState& s, double h2_in_kwh,
                         double h2_out_kwh);

PlantStepResult plant_step(const PlantParams& p, const PlantState& s, double el_setpoint_kw,
                           double sng_command_kg_h, double dt_s);

} // namespace mesim
