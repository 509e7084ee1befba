#include "mesim/gas.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mesim {

int GasGrid::node_index(int id) const {
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].id == id) return static_cast<int>(i);
    throw DanglingReference("unknown gas node id " + std::to_string(id));
}

int GasGrid::citygate_index() const {
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].citygate) return static_cast<int>(i);
    throw SchemaError("gas grid has no citygate node");
}

double GasGrid::node_volume(int idx) const {
    const GasNode& n = nodes[idx];
    if (n.volume_m3 > 0.0) return n.volume_m3;
    double v = 0.0;
    for (const auto& p : pipes) {
        if (p.from != n.id && p.to != n.id) continue;
        double area = M_PI / 4.0 * std::pow(p.diameter_mm / 1000.0, 2);
        v += 0.5 * area * p.length_m;
    }
    return v;
}

double GasGrid::total_volume() const {
    double v = 0.0;
    for (size_t i = 0; i < nodes.size(); ++i) v += node_volume(static_cast<int>(i));
    return v;
}

void GasGrid::validate() const {
    int gates = 0;
    for (const auto& n : nodes) gates += n.citygate ? 1 : 0;
    if (gates != 1) throw SchemaError("gas grid must have exactly one citygate node");
    for (const auto& p : pipes) {
        if (p.length_m <= 0 || p.diameter_mm <= 0)
            throw SchemaError("pipe with nonpositive length or diameter");
        node_index(p.from);
        node_index(p.to);
    }
    if (!(p_max_barg > p_min_barg && p_min_barg > -kAtmBar))
        throw SchemaError("inconsistent gas pressure limits");
    // connectivity
    std::vector<char> seen(nodes.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (const auto& p : pipes) {
            int a = node_index(p.from), b = node_index(p.to);
            int w = (a == u) ? b : (b == u ? a : -1);
            if (w >= 0 && !seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
        }
    }
    for (size_t i = 0; i < nodes.size(); ++i)
        if (!seen[i]) throw SchemaError("gas node " + std::to_string(nodes[i].id) + " unreachable");
}

GasState GasState::uniform(const GasGrid& grid, double pressure_bar_abs) {
    GasState s;
    s.pressure_bar.assign(grid.nodes.size(), pressure_bar_abs);
    s.mass_kg.resize(grid.nodes.size());
    const double rt = grid.props.r_gas_j_kgk * grid.props.temperature_k;
    for (size_t i = 0; i < grid.nodes.size(); ++i)
        s.mass_kg[i] = pressure_bar_abs * kPaPerBar * grid.node_volume(static_cast<int>(i)) / rt;
    return s;
}

GasExchange GasExchange::zero(const GasGrid& grid) {
    GasExchange e;
    e.injection_kgs.assign(grid.nodes.size(), 0.0);
    e.withdrawal_kgs.assign(grid.nodes.size(), 0.0);
    return e;
}

double pipe_flow(double p_m_bar, double p_n_bar, const Pipe& pipe, const GasProps& props) {
    if (!std::isfinite(p_m_bar) || !std::isfinite(p_n_bar))
        throw Error("non-finite pressure in pipe_flow");
    const double dp2 = p_m_bar * p_m_bar - p_n_bar * p_n_bar;
    if (dp2 == 0.0) return 0.0;
    const double a2 = std::max(std::abs(dp2), kRenouardLinearBar2);
    const double q_sm3h =
        std::pow(a2 * std::pow(pipe.diameter_mm, 4.82) / (25.24 * pipe.length_m), 1.0 / 1.82);
    double mag = props.rho_std_kg_m3 / 3600.0 * q_sm3h;
    if (std::abs(dp2) < kRenouardLinearBar2) mag *= std::abs(dp2) / kRenouardLinearBar2;
    return dp2 > 0.0 ? mag : -mag;
}

double citygate_regulate(const GasGrid& grid, const GasState& state) {
    const int cg = grid.citygate_index();
    const double setpoint_abs = grid.citygate_setpoint_barg + kAtmBar;
    const double err = setpoint_abs - state.pressure_bar[cg];
    return std::clamp(grid.citygate_gain_kgs_per_bar * err, 0.0, grid.citygate_capacity_kgs);
}

namespace {

struct Integrator {
    const GasGrid& grid;
    const GasExchange& exch;
    int citygate;
    std::vector<double> volume;
    double rt;
    double h_floor;
    double imported_kg = 0.0;
    std::vector<double> pipe_mass_kg; // net transferred mass, from->to positive
    std::vector<int> pipe_from, pipe_to;
    std::vector<double> pipe_coeff; // D^4.82 / (25.24 L), hoisted out of the hot loop
    std::vector<double> dm, flow;

    explicit Integrator(const GasGrid& g, const GasExchange& e)
        : grid(g), exch(e), citygate(g.citygate_index()) {
        rt = g.props.r_gas_j_kgk * g.props.temperature_k;
        volume.resize(g.nodes.size());
        for (size_t i = 0; i < volume.size(); ++i) volume[i] = g.node_volume(static_cast<int>(i));
        h_floor = g.substep_s / 1024.0;
        pipe_mass_kg.assign(g.pipes.size(), 0.0);
        for (const auto& p : g.pipes) {
            pipe_from.push_back(g.node_index(p.from));
            pipe_to.push_back(g.node_index(p.to));
            pipe_coeff.push_back(std::pow(p.diameter_mm, 4.82) / (25.24 * p.length_m));
        }
        dm.resize(g.nodes.size());
        flow.resize(g.pipes.size());
    }

    double pressure_of(double mass, int idx) const { return mass * rt / (kPaPerBar * volume[idx]); }

    // Same characteristic as pipe_flow above, with the geometry factor
    // precomputed once per pipe.
    double flow_of(size_t p, const GasState& st) const {
        const double pm = st.pressure_bar[pipe_from[p]];
        const double pn = st.pressure_bar[pipe_to[p]];
        const double dp2 = pm * pm - pn * pn;
        if (dp2 == 0.0) return 0.0;
        const double a2 = std::max(std::abs(dp2), kRenouardLinearBar2);
        double mag = grid.props.rho_std_kg_m3 / 3600.0 * std::pow(a2 * pipe_coeff[p], 1.0 / 1.82);
        if (std::abs(dp2) < kRenouardLinearBar2) mag *= std::abs(dp2) / kRenouardLinearBar2;
        return dp2 > 0.0 ? mag : -mag;
    }

    // One explicit Euler attempt over h; bisects when the pressure moves
    // too fast for the current step width.
    void advance(GasState& st, double h) {
        const size_t nn = grid.nodes.size();
        for (size_t i = 0; i < nn; ++i) dm[i] = exch.injection_kgs[i] - exch.withdrawal_kgs[i];
        const double import_rate = citygate_regulate(grid, st);
        dm[citygate] += import_rate;

        for (size_t p = 0; p < grid.pipes.size(); ++p) {
            flow[p] = flow_of(p, st);
            dm[pipe_from[p]] -= flow[p];
            dm[pipe_to[p]] += flow[p];
        }

        bool ok = true;
        double worst = 0.0;
        for (size_t i = 0; i < nn; ++i) {
            double m_new = st.mass_kg[i] + dm[i] * h;
            if (m_new < 0.0) {
                ok = false;
                worst = std::max(worst, 1.0);
                continue;
            }
            double rel = std::abs(pressure_of(m_new, static_cast<int>(i)) - st.pressure_bar[i]) /
                         st.pressure_bar[i];
            worst = std::max(worst, rel);
            if (rel > 0.002) ok = false;
        }

        if (!ok && h > h_floor) {
            advance(st, h / 2.0);
            advance(st, h / 2.0);
            return;
        }
        if (!ok) {
            if (worst > 0.05)
                throw IntegrationUnstable("pressure change " + std::to_string(worst * 100) +
                                          "% within minimal sub-step");
            for (size_t i = 0; i < nn; ++i)
                if (st.mass_kg[i] + dm[i] * h < 0.0)
                    throw NegativeMass("node " + std::to_string(grid.nodes[i].id) +
                                       " mass would go negative");
        }

        for (size_t i = 0; i < nn; ++i) {
            st.mass_kg[i] += dm[i] * h;
            st.pressure_bar[i] = pressure_of(st.mass_kg[i], static_cast<int>(i));
        }
        for (size_t p = 0; p < grid.pipes.size(); ++p) pipe_mass_kg[p] += flow[p] * h;
        imported_kg += import_rate * h;
        st.clock_s += h;
    }
};

} // namespace

GasStepResult step_pressures(const GasGrid& grid, const GasState& state, const GasExchange& exch,
                             double dt_s) {
    if (dt_s <= 0.0) throw Error("step_pressures requires dt > 0");
    Integrator integ(grid, exch);
    GasStepResult out;
    out.state = state;
    double remaining = dt_s;
    while (remaining > 1e-12) {
        double h = std::min(grid.substep_s, remaining);
        integ.advance(out.state, h);
        remaining -= h;
    }
    out.imported_kg = integ.imported_kg;
    out.mean_pipe_flow_kgs.resize(grid.pipes.size());
    for (size_t p = 0; p < grid.pipes.size(); ++p)
        out.mean_pipe_flow_kgs[p] = integ.pipe_mass_kg[p] / dt_s;
    return out;
}

Linepack linepack(const GasGrid& grid, const GasState& state) {
    Linepack lp;
    for (double m : state.mass_kg) lp.mass_kg += m;
    lp.energy_kwh = lp.mass_kg * grid.props.sng_lhv_kwh_kg;
    return lp;
}

} // namespace mesim
