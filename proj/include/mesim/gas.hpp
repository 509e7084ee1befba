#pragma once

#include <vector>

#include "mesim/errors.hpp"

namespace mesim {

constexpr double kAtmBar = 1.01325;       // gauge -> absolute offset
constexpr double kPaPerBar = 1e5;

/// Below this squared-pressure difference the pipe characteristic is
/// linear in (Pm^2 - Pn^2); the turbulent law has unbounded slope at the
/// origin, which would make the node dynamics arbitrarily stiff.
constexpr double kRenouardLinearBar2 = 0.2;

struct GasProps {
    double rho_std_kg_m3 = 0.78;          // density at standard conditions
    double r_gas_j_kgk = 518.3;
    double temperature_k = 288.15;
    double sng_lhv_kwh_kg = 13.89;
};

struct GasNode {
    int id = 0;
    double volume_m3 = 0.0;               // 0 = derive from incident pipe volume
    bool citygate = false;
};

struct Pipe {
    int from = 0;
    int to = 0;
    double length_m = 0.0;
    double diameter_mm = 0.0;
};

struct GasGrid {
    std::vector<GasNode> nodes;
    std::vector<Pipe> pipes;
    GasProps props;
    double p_min_barg = 1.5;
    double p_max_barg = 5.0;
    double citygate_setpoint_barg = 3.5;
    double citygate_gain_kgs_per_bar = 2.0;
    double citygate_capacity_kgs = 10.0;
    double substep_s = 5.0;

    int node_index(int id) const;
    int citygate_index() const;
    /// Lumped node volume: the explicit value, or half the internal
    /// volume of each incident pipe when none is given.
    double node_volume(int idx) const;
    double total_volume() const;
    void validate() const;
};

/// Per-node absolute pressures and masses, kept consistent through the
/// ideal-gas relation P * 1e5 * V = m * R * T.
struct GasState {
    std::vector<double> pressure_bar; // absolute
    std::vector<double> mass_kg;
    double clock_s = 0.0;

    static GasState uniform(const GasGrid& grid, double pressure_bar_abs);
};

/// Boundary mass rates for one step; all nonnegative, direction is
/// encoded by the field.
struct GasExchange {
    std::vector<double> injection_kgs;  // per node
    std::vector<double> withdrawal_kgs; // per node
    static GasExchange zero(const GasGrid& grid);
};

struct GasStepResult {
    GasState state;
    double imported_kg = 0.0;                 // citygate intake over the step
    std::vector<double> mean_pipe_flow_kgs;   // signed, positive from->to
};

struct Linepack {
    double mass_kg = 0.0;
    double energy_kwh = 0.0;
};

/// Renouard flow, signed positive m->n. Pressures absolute bar,
/// length m, diameter mm.
double pipe_flow(double p_m_bar, double p_n_bar, const Pipe& pipe, const GasProps& props);

/// Instantaneous city-gate intake rate: proportional on pressure error,
/// clamped at zero (gas never flows MP->HP) and at pipeline capacity.
double citygate_regulate(const GasGrid& grid, const GasState& state);

GasStepResult step_pressures(const GasGrid& grid, const GasState& state, const GasExchange& exch,
                             double dt_s);

Linepack linepack(const GasGrid& grid, const GasState& state);

} // namespace mesim
