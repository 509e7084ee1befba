#include "mesim/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mesim {

std::map<int, double> electrolyzer_dispatch(
    const std::unordered_map<int, TransformerBalance>& balance, const ControllerConfig& cfg,
    const std::vector<PlantParams>& plants, const std::vector<PlantState>& states,
    double dt_s) {
    std::map<int, double> setpoints;
    for (size_t i = 0; i < plants.size(); ++i) {
        const PlantParams& p = plants[i];
        auto tr_it = cfg.plant_transformer.find(p.id);
        if (tr_it == cfg.plant_transformer.end())
            throw UnmappedTransformer("plant " + std::to_string(p.id) +
                                      " has no transformer mapping");
        auto bal_it = balance.find(tr_it->second);
        if (bal_it == balance.end())
            throw UnmappedTransformer("plant " + std::to_string(p.id) +
                                      " mapped to unknown transformer " +
                                      std::to_string(tr_it->second));
        double rpf_kw = bal_it->second.rpf_mw * 1000.0;
        double setpoint = std::min(rpf_kw, p.electrolyzer_kw);
        // clamp to buffer headroom now so the post-dispatch power flow sees
        // the load the plant will actually take
        setpoint = std::min(setpoint, electrolyzer_headroom_kw(p, states[i], dt_s));
        setpoints[p.id] = std::max(setpoint, 0.0);
    }
    return setpoints;
}

double allowed_injection_rate(const GasGrid& grid, const GasState& state,
                              double total_withdrawal_kgs, double limit_barg, double dt_s) {
    double p_max = 0.0;
    for (double p : state.pressure_bar) p_max = std::max(p, p_max);
    const double limit_abs = limit_barg + kAtmBar;
    const double rt = grid.props.r_gas_j_kgk * grid.props.temperature_k;
    const double mass_headroom = std::max(limit_abs - p_max, 0.0) * kPaPerBar *
                                 grid.total_volume() / rt;
    return std::max(total_withdrawal_kgs + mass_headroom / dt_s, 0.0);
}

namespace {

struct Eligible {
    int idx;
    bool full_output;
    double buffer_kwh;
    int id;
};

} // namespace

std::map<int, PlantDecision> methanation_dispatch(const std::vector<PlantParams>& plants,
                                                  const std::vector<PlantState>& states,
                                                  double allowed_injection_kgs,
                                                  bool curtailment_applies,
                                                  bool partial_curtailment) {
    std::map<int, PlantDecision> out;
    std::vector<Eligible> eligible;
    for (size_t i = 0; i < plants.size(); ++i) {
        const PlantParams& p = plants[i];
        const PlantState& s = states[i];
        PlantDecision d;
        bool on = s.mode == MethanationMode::Running ||
                  s.buffer_pressure_bar(p) >= p.methanation_on_bar;
        if (on) {
            d.methanation_command_kg_h = p.methanation_capacity_kg_h();
            eligible.push_back({static_cast<int>(i),
                                s.methanation_kg_h >= p.methanation_capacity_kg_h() - 1e-9,
                                s.buffer_kwh, p.id});
        }
        out[p.id] = d;
    }

    if (!curtailment_applies) return out;

    // priority to keep running: full-output units, then larger buffer, lower id
    std::sort(eligible.begin(), eligible.end(), [](const Eligible& a, const Eligible& b) {
        if (a.full_output != b.full_output) return a.full_output > b.full_output;
        if (a.buffer_kwh != b.buffer_kwh) return a.buffer_kwh > b.buffer_kwh;
        return a.id < b.id;
    });

    double budget_kg_h = std::max(allowed_injection_kgs, 0.0) * 3600.0;
    for (const Eligible& e : eligible) {
        const PlantParams& p = plants[e.idx];
        PlantDecision& d = out[p.id];
        double want = d.methanation_command_kg_h;
        if (want <= budget_kg_h + 1e-12) {
            budget_kg_h -= want;
            continue;
        }
        if (partial_curtailment && budget_kg_h >= p.methanation_min_kg_h()) {
            d.methanation_command_kg_h = budget_kg_h;
            budget_kg_h = 0.0;
        } else {
            d.methanation_command_kg_h = 0.0;
        }
        d.curtailment = CurtailReason::GasPressure;
    }
    return out;
}

} // namespace mesim
