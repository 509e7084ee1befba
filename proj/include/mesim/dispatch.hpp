#pragma once

#include <map>
#include <unordered_map>
#include <vector>

#include "mesim/electric.hpp"
#include "mesim/gas.hpp"
#include "mesim/plant.hpp"

namespace mesim {

enum class CurtailReason { None, GasPressure, BufferFull };

struct PlantDecision {
    double electrolyzer_setpoint_kw = 0.0;
    double methanation_command_kg_h = 0.0;
    CurtailReason curtailment = CurtailReason::None;
};

struct ControlDecision {
    std::map<int, PlantDecision> plants; // keyed by plant id, ordered for determinism
};

struct ControllerConfig {
    double curtail_barg = 5.00;
    double resume_barg = 4.90;
    double overshoot_tolerance_bar = 0.02;
    bool partial_curtailment = true;          // false: full blocking only
    std::map<int, int> plant_transformer;     // plant id -> transformer id
};

/// Persistent controller memory (pressure-limit hysteresis).
struct CoordinatorState {
    bool gas_curtailment_active = false;
};

std::map<int, double> electrolyzer_dispatch(
    const std::unordered_map<int, TransformerBalance>& balance, const ControllerConfig& cfg,
    const std::vector<PlantParams>& plants, const std::vector<PlantState>& states,
    double dt_s);

/// Methanation commands under the pressure-limit rule. `allowed_injection_kgs`
/// caps the total SNG mass rate; plants are curtailed in reverse priority
/// (full-output units first to survive, then larger stored hydrogen, lower
/// id breaking ties).
std::map<int, PlantDecision> methanation_dispatch(const std::vector<PlantParams>& plants,
                                                  const std::vector<PlantState>& states,
                                                  double allowed_injection_kgs,
                                                  bool curtailment_applies,
                                                  bool partial_curtailment);

/// Total SNG mass rate the gas network can take this step without its
/// max node pressure being pushed past `limit_barg` by the end of it.
double allowed_injection_rate(const GasGrid& grid, const GasState& state,
                              double total_withdrawal_kgs, double limit_barg, double dt_s);

} // namespace mesim
