#include "mesim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mesim {

namespace {

struct World {
    std::vector<PlantState> plants;
    GasState gas;
    CoordinatorState coord;
};

cplx with_power_factor(double p_mw, double pf, double s_base_mva) {
    double q = pf >= 1.0 ? 0.0 : p_mw * std::tan(std::acos(pf));
    return cplx{p_mw, q} / s_base_mva;
}

struct Stepper {
    const Scenario& sc;
    CaseTag tag;
    double eta_p2g; // LPP2G only
    std::vector<int> load_node_ids;
    double s_base_mva;
    double dt;
    double dt_h;

    Stepper(const Scenario& s, CaseTag t, double eta) : sc(s), tag(t), eta_p2g(eta) {
        s_base_mva = sc.electric.s_base_va / 1e6;
        dt = sc.time.step_s;
        dt_h = dt / 3600.0;
        for (const auto& n : sc.electric.nodes)
            if (n.id != sc.electric.slack_id) load_node_ids.push_back(n.id);
    }

    NodeInjection base_injection(int t) const {
        NodeInjection inj;
        const size_t n = load_node_ids.size();
        inj.s_load.assign(n, {});
        inj.y_load.assign(n, {});
        inj.s_gen.assign(n, {});
        for (size_t j = 0; j < n; ++j) {
            int id = load_node_ids[j];
            const GridNode& gn = sc.electric.nodes[sc.electric.node_index(id)];
            cplx s = with_power_factor(sc.el_load_mw.at(id, t), sc.load_power_factor, s_base_mva);
            if (gn.model == LoadModel::ConstantAdmittance)
                inj.y_load[j] = std::conj(s); // consumes s at nominal voltage
            else
                inj.s_load[j] = s;
            inj.s_gen[j] = with_power_factor(sc.el_gen_mw.at(id, t), sc.gen_power_factor,
                                             s_base_mva);
        }
        return inj;
    }

    void add_plant_loads(NodeInjection& inj, const std::vector<double>& electric_kw) const {
        for (size_t i = 0; i < sc.plants.size(); ++i) {
            int col = 0;
            for (size_t j = 0; j < load_node_ids.size(); ++j)
                if (load_node_ids[j] == sc.plants[i].electric_node) col = static_cast<int>(j);
            inj.s_load[col] += cplx{electric_kw[i] / 1000.0 / s_base_mva, 0.0};
        }
    }

    void fill_tr_series(StepRecord& rec, int t, const std::vector<double>& electric_kw) const {
        for (const auto& tr : sc.electric.transformers) {
            rec.tr_demand_mw[tr.id] = 0.0;
            rec.tr_res_mw[tr.id] = 0.0;
            rec.tr_absorbed_mw[tr.id] = 0.0;
        }
        for (const auto& n : sc.electric.nodes) {
            if (n.transformer < 0) continue;
            rec.tr_demand_mw[n.transformer] += sc.el_load_mw.at(n.id, t);
            rec.tr_res_mw[n.transformer] += sc.el_gen_mw.at(n.id, t);
        }
        for (size_t i = 0; i < sc.plants.size(); ++i)
            rec.tr_absorbed_mw[sc.control.plant_transformer.at(sc.plants[i].id)] +=
                electric_kw[i] / 1000.0;
    }

    double losses_mw(const FlowSolution& sol) const {
        double p = 0.0;
        for (size_t b = 0; b < sol.i_branch.size(); ++b)
            p += sc.electric.branches[b].z.real() * std::norm(sol.i_branch[b]);
        return p * s_base_mva;
    }

    /// Curtailment budget with pressure-limit hysteresis; updates
    /// `coord` after the fact via note_curtailment().
    double injection_budget(const World& w, double wit_total) const {
        double limit = w.coord.gas_curtailment_active ? sc.control.resume_barg
                                                      : sc.control.curtail_barg;
        return allowed_injection_rate(sc.gas, w.gas, wit_total, limit, dt);
    }

    void note_curtailment(World& w, bool any_curtailed) const {
        double p_max = 0.0;
        for (double p : w.gas.pressure_bar) p_max = std::max(p, p_max);
        if (w.coord.gas_curtailment_active) {
            if (p_max - kAtmBar < sc.control.resume_barg && !any_curtailed)
                w.coord.gas_curtailment_active = false;
        } else if (any_curtailed) {
            w.coord.gas_curtailment_active = true;
        }
    }

    void gas_substep(World& w, StepRecord& rec, const std::vector<double>& sng_kg_h, int t) {
        GasExchange exch = GasExchange::zero(sc.gas);
        for (const auto& [id, series] : sc.gas_withdrawal_kgs.values)
            exch.withdrawal_kgs[sc.gas.node_index(id)] += series[t];
        for (size_t i = 0; i < sc.plants.size(); ++i)
            exch.injection_kgs[sc.gas.node_index(sc.plants[i].gas_node)] += sng_kg_h[i] / 3600.0;

        GasStepResult g = step_pressures(sc.gas, w.gas, exch, dt);
        w.gas = g.state;
        rec.gas_pressure_barg.resize(w.gas.pressure_bar.size());
        for (size_t i = 0; i < w.gas.pressure_bar.size(); ++i)
            rec.gas_pressure_barg[i] = w.gas.pressure_bar[i] - kAtmBar;
        rec.pipe_flow_kgs = g.mean_pipe_flow_kgs;
        rec.citygate_import_kgs = g.imported_kg / dt;
        Linepack lp = linepack(sc.gas, w.gas);
        rec.linepack_kg = lp.mass_kg;
        rec.linepack_kwh = lp.energy_kwh;
    }

    StepRecord step(World& w, int t) {
        switch (tag) {
            case CaseTag::Reference: return step_reference(w, t);
            case CaseTag::LPEN: return step_lpen(w, t);
            case CaseTag::LPGN: return step_lpgn(w, t);
            case CaseTag::LPP2G: return step_lpp2g(w, t);
        }
        throw Error("unreachable");
    }

    StepRecord step_reference(World& w, int t, bool lumped_gas = false) {
        StepRecord rec;
        rec.step = t;
        NodeInjection inj = base_injection(t);
        FlowSolution sol0 = bfs_power_flow(sc.electric, inj);
        if (!sol0.converged) throw NotConverged("pre-dispatch power flow did not converge");
        auto bal0 = transformer_balance(sc.electric, sol0);

        auto setpoints = electrolyzer_dispatch(bal0, sc.control, sc.plants, w.plants, dt);

        const double wit_total = sc.gas_withdrawal_kgs.total(t);
        double budget = lumped_gas ? wit_total : injection_budget(w, wit_total);
        auto commands = methanation_dispatch(sc.plants, w.plants, budget, true,
                                             sc.control.partial_curtailment);

        std::vector<double> electric_kw(sc.plants.size()), sng_kg_h(sc.plants.size());
        bool any_curtailed = false;
        for (size_t i = 0; i < sc.plants.size(); ++i) {
            const PlantParams& p = sc.plants[i];
            const PlantDecision& d = commands.at(p.id);
            double setpoint = setpoints.at(p.id);
            PlantStepResult res =
                plant_step(p, w.plants[i], setpoint, d.methanation_command_kg_h, dt);

            PlantRecord pr;
            pr.setpoint_kw = setpoint;
            pr.electric_kw = res.electric_kw;
            pr.aux_kw = res.electric_kw - res.state.electrolyzer_kw;
            pr.soc = res.state.soc(p);
            pr.sng_kg_h = res.sng_kg_h;
            double tr_rpf_kw = bal0.at(sc.control.plant_transformer.at(p.id)).rpf_mw * 1000.0;
            if (d.curtailment == CurtailReason::GasPressure)
                pr.curtailment = static_cast<int>(CurtailReason::GasPressure);
            else if (setpoint + 1e-9 < std::min(tr_rpf_kw, p.electrolyzer_kw))
                pr.curtailment = static_cast<int>(CurtailReason::BufferFull);
            rec.plants[p.id] = pr;

            w.plants[i] = res.state;
            electric_kw[i] = res.electric_kw;
            sng_kg_h[i] = res.sng_kg_h;
            any_curtailed = any_curtailed || d.curtailment != CurtailReason::None;
        }

        NodeInjection inj2 = base_injection(t);
        add_plant_loads(inj2, electric_kw);
        FlowSolution sol1 = bfs_power_flow(sc.electric, inj2);
        if (!sol1.converged) throw NotConverged("post-dispatch power flow did not converge");
        auto bal1 = transformer_balance(sc.electric, sol1);

        rec.voltage_pu.resize(sol1.v.size());
        for (size_t j = 0; j < sol1.v.size(); ++j) rec.voltage_pu[j] = std::abs(sol1.v[j]);
        for (const auto& tr : sc.electric.transformers) {
            rec.tr_surplus_mw[tr.id] = bal0.at(tr.id).rpf_mw;
            rec.tr_import_mw[tr.id] = bal1.at(tr.id).import_mw;
            rec.tr_rpf_mw[tr.id] = bal1.at(tr.id).rpf_mw;
            rec.surplus_mw += bal0.at(tr.id).rpf_mw;
            rec.hv_import_mw += bal1.at(tr.id).import_mw;
            rec.residual_rpf_mw += bal1.at(tr.id).rpf_mw;
        }
        rec.total_load_mw = sc.el_load_mw.total(t);
        rec.total_gen_mw = sc.el_gen_mw.total(t);
        rec.losses_mw = losses_mw(sol1);
        for (double kw : electric_kw) rec.p2g_electric_mw += kw / 1000.0;
        fill_tr_series(rec, t, electric_kw);

        rec.withdrawal_kgs = wit_total;
        for (double s : sng_kg_h) rec.sng_injected_kgs += s / 3600.0;
        if (lumped_gas) {
            LpgnResult lr = lpgn_step(wit_total, rec.sng_injected_kgs);
            rec.citygate_import_kgs = lr.import_kgs;
        } else {
            gas_substep(w, rec, sng_kg_h, t);
            note_curtailment(w, any_curtailed);
        }
        return rec;
    }

    StepRecord step_lpen(World& w, int t) {
        StepRecord rec;
        rec.step = t;
        const double gen = sc.el_gen_mw.total(t);
        const double load = sc.el_load_mw.total(t);
        LpenResult lr = lpen_step(gen, load, sc.plants);

        const double wit_total = sc.gas_withdrawal_kgs.total(t);
        double budget = injection_budget(w, wit_total);
        auto commands = methanation_dispatch(sc.plants, w.plants, budget, true,
                                             sc.control.partial_curtailment);

        std::vector<double> electric_kw(sc.plants.size()), sng_kg_h(sc.plants.size());
        bool any_curtailed = false;
        for (size_t i = 0; i < sc.plants.size(); ++i) {
            const PlantParams& p = sc.plants[i];
            const PlantDecision& d = commands.at(p.id);
            double setpoint = lr.plant_setpoint_kw.at(p.id);
            PlantStepResult res =
                plant_step(p, w.plants[i], setpoint, d.methanation_command_kg_h, dt);
            PlantRecord pr;
            pr.setpoint_kw = setpoint;
            pr.electric_kw = res.electric_kw;
            pr.aux_kw = res.electric_kw - res.state.electrolyzer_kw;
            pr.soc = res.state.soc(p);
            pr.sng_kg_h = res.sng_kg_h;
            if (d.curtailment == CurtailReason::GasPressure)
                pr.curtailment = static_cast<int>(CurtailReason::GasPressure);
            else if (res.state.electrolyzer_kw + 1e-9 < std::min(setpoint, p.electrolyzer_kw))
                pr.curtailment = static_cast<int>(CurtailReason::BufferFull);
            rec.plants[p.id] = pr;
            w.plants[i] = res.state;
            electric_kw[i] = res.electric_kw;
            sng_kg_h[i] = res.sng_kg_h;
            any_curtailed = any_curtailed || d.curtailment != CurtailReason::None;
        }

        rec.total_load_mw = load;
        rec.total_gen_mw = gen;
        rec.surplus_mw = lr.rpf_mw;
        for (double kw : electric_kw) rec.p2g_electric_mw += kw / 1000.0;
        // single-node balance, Joule losses ignored
        rec.hv_import_mw = std::max(load + rec.p2g_electric_mw - gen, 0.0);
        rec.residual_rpf_mw = std::max(gen - load - rec.p2g_electric_mw, 0.0);

        rec.withdrawal_kgs = wit_total;
        for (double s : sng_kg_h) rec.sng_injected_kgs += s / 3600.0;
        gas_substep(w, rec, sng_kg_h, t);
        note_curtailment(w, any_curtailed);
        return rec;
    }

    StepRecord step_lpgn(World& w, int t) { return step_reference(w, t, /*lumped_gas=*/true); }

    StepRecord step_lpp2g(World& w, int t) {
        StepRecord rec;
        rec.step = t;
        NodeInjection inj = base_injection(t);
        FlowSolution sol0 = bfs_power_flow(sc.electric, inj);
        if (!sol0.converged) throw NotConverged("pre-dispatch power flow did not converge");
        auto bal0 = transformer_balance(sc.electric, sol0);

        std::vector<double> el_net_kw(sc.plants.size()); // electrolysis share, aux excluded
        std::vector<double> setpoint_kw(sc.plants.size());
        for (size_t i = 0; i < sc.plants.size(); ++i) {
            const PlantParams& p = sc.plants[i];
            auto it = sc.control.plant_transformer.find(p.id);
            if (it == sc.control.plant_transformer.end())
                throw UnmappedTransformer("plant " + std::to_string(p.id));
            double rpf_kw = bal0.at(it->second).rpf_mw * 1000.0;
            setpoint_kw[i] = std::clamp(rpf_kw, 0.0, p.electrolyzer_kw);
            el_net_kw[i] = setpoint_kw[i];
        }

        // no buffer: the gas side's refusal feeds straight back to the load
        const double wit_total = sc.gas_withdrawal_kgs.total(t);
        double budget_kgs = injection_budget(w, wit_total);
        double offered_kgs = 0.0;
        std::vector<double> sng_kg_h(sc.plants.size());
        for (size_t i = 0; i < sc.plants.size(); ++i) {
            const PlantParams& p = sc.plants[i];
            double el_total = el_net_kw[i] > 0.0 ? el_net_kw[i] + p.aux_kw : 0.0;
            double sng_kw = lpp2g_step(el_total, eta_p2g, p.aux_kw);
            sng_kg_h[i] = sng_kw / p.sng_lhv_kwh_kg;
            offered_kgs += sng_kg_h[i] / 3600.0;
        }
        bool any_curtailed = false;
        if (offered_kgs > budget_kgs && offered_kgs > 0.0) {
            double scale = std::max(budget_kgs, 0.0) / offered_kgs;
            for (size_t i = 0; i < sc.plants.size(); ++i) {
                el_net_kw[i] *= scale;
                sng_kg_h[i] *= scale;
            }
            any_curtailed = true;
        }

        std::vector<double> electric_kw(sc.plants.size());
        for (size_t i = 0; i < sc.plants.size(); ++i) {
            const PlantParams& p = sc.plants[i];
            electric_kw[i] = el_net_kw[i] > 0.0 ? el_net_kw[i] + p.aux_kw : 0.0;
            PlantRecord pr;
            pr.setpoint_kw = setpoint_kw[i];
            pr.electric_kw = electric_kw[i];
            pr.aux_kw = electric_kw[i] - el_net_kw[i];
            pr.soc = 0.0;
            pr.sng_kg_h = sng_kg_h[i];
            if (any_curtailed && el_net_kw[i] < setpoint_kw[i] - 1e-9)
                pr.curtailment = static_cast<int>(CurtailReason::GasPressure);
            rec.plants[p.id] = pr;
        }

        NodeInjection inj2 = base_injection(t);
        add_plant_loads(inj2, electric_kw);
        FlowSolution sol1 = bfs_power_flow(sc.electric, inj2);
        if (!sol1.converged) throw NotConverged("post-dispatch power flow did not converge");
        auto bal1 = transformer_balance(sc.electric, sol1);

        rec.voltage_pu.resize(sol1.v.size());
        for (size_t j = 0; j < sol1.v.size(); ++j) rec.voltage_pu[j] = std::abs(sol1.v[j]);
        for (const auto& tr : sc.electric.transformers) {
            rec.tr_surplus_mw[tr.id] = bal0.at(tr.id).rpf_mw;
            rec.tr_import_mw[tr.id] = bal1.at(tr.id).import_mw;
            rec.tr_rpf_mw[tr.id] = bal1.at(tr.id).rpf_mw;
            rec.surplus_mw += bal0.at(tr.id).rpf_mw;
            rec.hv_import_mw += bal1.at(tr.id).import_mw;
            rec.residual_rpf_mw += bal1.at(tr.id).rpf_mw;
        }
        rec.total_load_mw = sc.el_load_mw.total(t);
        rec.total_gen_mw = sc.el_gen_mw.total(t);
        rec.losses_mw = losses_mw(sol1);
        for (double kw : electric_kw) rec.p2g_electric_mw += kw / 1000.0;
        fill_tr_series(rec, t, electric_kw);

        rec.withdrawal_kgs = wit_total;
        for (double s : sng_kg_h) rec.sng_injected_kgs += s / 3600.0;
        gas_substep(w, rec, sng_kg_h, t);
        note_curtailment(w, any_curtailed);
        return rec;
    }
};

} // namespace

ResultSet run_case(const Scenario& sc, CaseTag tag) {
    double eta = sc.lpp2g_eta;
    if (tag == CaseTag::LPP2G && eta <= 0.0) eta = calibrate_eta(sc);

    Stepper stepper(sc, tag, eta);
    World w;
    w.plants.resize(sc.plants.size());
    for (size_t i = 0; i < sc.plants.size(); ++i)
        w.plants[i].buffer_kwh = sc.initial_buffer_soc * sc.plants[i].buffer_kwh;
    double p0 = sc.initial_pressure_barg >= 0 ? sc.initial_pressure_barg
                                              : sc.gas.citygate_setpoint_barg;
    w.gas = GasState::uniform(sc.gas, p0 + kAtmBar);

    ResultSet out;
    out.case_name = case_name(tag);
    out.config_hash = sc.config_hash;
    out.start_iso = sc.time.start_iso;
    out.step_s = sc.time.step_s;
    out.calibrated_eta = tag == CaseTag::LPP2G ? eta : 0.0;
    out.records.reserve(sc.time.steps);

    for (int t = 0; t < sc.time.steps; ++t) {
        try {
            out.records.push_back(stepper.step(w, t));
        } catch (const Error& e) {
            throw SimulationFault("step " + std::to_string(t) + " (" +
                                  sc.time.timestamp_of(t) + "): " + e.what());
        }
    }
    return out;
}

double calibrate_eta(const Scenario& sc) {
    ResultSet ref = run_case(sc, CaseTag::Reference);
    const double dt_h = sc.time.step_s / 3600.0;
    double sng_kwh = 0.0, el_net_kwh = 0.0;
    for (const StepRecord& r : ref.records) {
        for (const auto& [id, p] : r.plants) {
            double lhv = 0.0;
            for (const auto& pp : sc.plants)
                if (pp.id == id) lhv = pp.sng_lhv_kwh_kg;
            sng_kwh += p.sng_kg_h * dt_h * lhv;
            el_net_kwh += (p.electric_kw - p.aux_kw) * dt_h;
        }
    }
    if (el_net_kwh <= 0.0)
        throw SimulationFault("calibration impossible: plants never consumed electricity");
    return sng_kwh / el_net_kwh;
}

} // namespace mesim
