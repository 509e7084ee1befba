#include "mesim/summary.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace mesim {

namespace {

void accumulate(SeasonCells& c, const StepRecord& r, double dt_h, double sng_lhv) {
    const double to_gwh = dt_h / 1e6; // kW -> GWh per step
    for (const auto& [id, p] : r.plants) {
        c.plant_el_gwh[id] += p.electric_kw * to_gwh;
        c.plant_sng_gwh[id] += p.sng_kg_h * sng_lhv * to_gwh;
        c.plant_el_total_gwh += p.electric_kw * to_gwh;
        c.plant_net_el_total_gwh += (p.electric_kw - p.aux_kw) * to_gwh;
        c.plant_sng_total_gwh += p.sng_kg_h * sng_lhv * to_gwh;
    }
    const double mw_to_gwh = dt_h / 1e3;
    for (const auto& [id, v] : r.tr_demand_mw) c.tr_demand_gwh[id] += v * mw_to_gwh;
    for (const auto& [id, v] : r.tr_res_mw) c.tr_res_gwh[id] += v * mw_to_gwh;
    for (const auto& [id, v] : r.tr_surplus_mw) c.tr_surplus_gwh[id] += v * mw_to_gwh;
    for (const auto& [id, v] : r.tr_absorbed_mw) c.tr_absorbed_gwh[id] += v * mw_to_gwh;
    for (const auto& [id, v] : r.tr_rpf_mw) c.tr_rpf_gwh[id] += v * mw_to_gwh;
    c.demand_total_gwh += r.total_load_mw * mw_to_gwh;
    c.res_total_gwh += r.total_gen_mw * mw_to_gwh;
    c.surplus_total_gwh += r.surplus_mw * mw_to_gwh;
    c.absorbed_total_gwh += r.p2g_electric_mw * mw_to_gwh;
    c.rpf_total_gwh += r.residual_rpf_mw * mw_to_gwh;

    const double dt_s = dt_h * 3600.0;
    const double kg_to_gwh = sng_lhv / 1e6;
    c.gas_demand_gwh += r.withdrawal_kgs * dt_s * kg_to_gwh;
    c.gas_import_gwh += r.citygate_import_kgs * dt_s * kg_to_gwh;
    c.gas_sng_gwh += r.sng_injected_kgs * dt_s * kg_to_gwh;
}

} // namespace

SeasonalSummary summarize_seasonal(const ResultSet& results, const TimeGrid& time,
                                   const SeasonCalendar& calendar, double sng_lhv_kwh_kg) {
    if (static_cast<int>(results.records.size()) != time.steps)
        throw IncompleteTrace("trace has " + std::to_string(results.records.size()) +
                              " records, horizon is " + std::to_string(time.steps));
    SeasonalSummary s;
    s.case_name = results.case_name;
    s.config_hash = results.config_hash;
    const double dt_h = results.step_s / 3600.0;
    for (const StepRecord& r : results.records) {
        bool heat = calendar.heating(time.month_of(r.step));
        accumulate(heat ? s.heating : s.non_heating, r, dt_h, sng_lhv_kwh_kg);
        accumulate(s.year, r, dt_h, sng_lhv_kwh_kg);
    }
    return s;
}

std::vector<CaseDelta> compare_cases(const SeasonalSummary& ref, const SeasonalSummary& variant) {
    if (ref.config_hash != variant.config_hash)
        throw ScenarioMismatch("summaries come from different scenarios (" + ref.config_hash +
                               " vs " + variant.config_hash + ")");
    std::vector<CaseDelta> out;
    auto emit = [&out](const std::string& metric, const std::string& season, double r, double v) {
        CaseDelta d;
        d.metric = metric;
        d.season = season;
        d.reference = r;
        d.variant = v;
        if (r != 0.0) {
            d.relative = (v - r) / r;
            d.ratio = v / r;
        } else {
            d.defined = false;
        }
        out.push_back(d);
    };
    auto one_season = [&](const std::string& name, const SeasonCells& r, const SeasonCells& v) {
        emit("plant_el_gwh", name, r.plant_el_total_gwh, v.plant_el_total_gwh);
        emit("plant_sng_gwh", name, r.plant_sng_total_gwh, v.plant_sng_total_gwh);
        emit("rpf_gwh", name, r.rpf_total_gwh, v.rpf_total_gwh);
        emit("gas_import_gwh", name, r.gas_import_gwh, v.gas_import_gwh);
        emit("surplus_gwh", name, r.surplus_total_gwh, v.surplus_total_gwh);
        emit("absorbed_gwh", name, r.absorbed_total_gwh, v.absorbed_total_gwh);
        for (const auto& [id, val] : r.plant_el_gwh) {
            auto it = v.plant_el_gwh.find(id);
            if (it != v.plant_el_gwh.end())
                emit("plant_el_gwh[" + std::to_string(id) + "]", name, val, it->second);
        }
        for (const auto& [id, val] : r.plant_sng_gwh) {
            auto it = v.plant_sng_gwh.find(id);
            if (it != v.plant_sng_gwh.end())
                emit("plant_sng_gwh[" + std::to_string(id) + "]", name, val, it->second);
        }
    };
    one_season("heating", ref.heating, variant.heating);
    one_season("non_heating", ref.non_heating, variant.non_heating);
    one_season("year", ref.year, variant.year);
    return out;
}

std::string emit_plotdata(const ResultSet& results, const TimeGrid& time, const std::string& view,
                          int from_step, int to_step) {
    if (from_step < 0 || to_step > static_cast<int>(results.records.size()) ||
        from_step >= to_step)
        throw WindowOutOfRange("window [" + std::to_string(from_step) + ", " +
                               std::to_string(to_step) + ") outside horizon");
    std::ostringstream out;
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    if (view == "balance") {
        out << "timestamp,withdrawal_kgs,sng_injected_kgs,citygate_import_kgs,linepack_kg\n";
        for (int t = from_step; t < to_step; ++t) {
            const StepRecord& r = results.records[t];
            out << time.timestamp_of(t) << ',' << num(r.withdrawal_kgs) << ','
                << num(r.sng_injected_kgs) << ',' << num(r.citygate_import_kgs) << ','
                << num(r.linepack_kg) << '\n';
        }
    } else if (view == "pressure") {
        out << "timestamp,node_id,pressure_barg\n";
        for (int t = from_step; t < to_step; ++t) {
            const StepRecord& r = results.records[t];
            for (size_t i = 0; i < r.gas_pressure_barg.size(); ++i)
                out << time.timestamp_of(t) << ',' << i << ',' << num(r.gas_pressure_barg[i])
                    << '\n';
        }
    } else if (view == "transformer") {
        out << "timestamp,transformer_id,signed_mw,surplus_mw\n";
        for (int t = from_step; t < to_step; ++t) {
            const StepRecord& r = results.records[t];
            for (const auto& [id, imp] : r.tr_import_mw) {
                double rpf = r.tr_rpf_mw.count(id) ? r.tr_rpf_mw.at(id) : 0.0;
                double sur = r.tr_surplus_mw.count(id) ? r.tr_surplus_mw.at(id) : 0.0;
                out << time.timestamp_of(t) << ',' << id << ',' << num(imp - rpf) << ','
                    << num(sur) << '\n';
            }
        }
    } else if (view == "buffer") {
        out << "timestamp,plant_id,soc,sng_kg_h\n";
        for (int t = from_step; t < to_step; ++t) {
            const StepRecord& r = results.records[t];
            for (const auto& [id, p] : r.plants)
                out << time.timestamp_of(t) << ',' << id << ',' << num(p.soc) << ','
                    << num(p.sng_kg_h) << '\n';
        }
    } else {
        throw UnknownView("unknown plot view '" + view + "'");
    }
    return out.str();
}

namespace {

std::string gwh(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%10.3f", v);
    return buf;
}

void render_cells(std::ostringstream& out, const char* title, const SeasonCells& c) {
    out << "  " << title << "\n";
    out << "    P2G plants [GWh]\n";
    for (const auto& [id, v] : c.plant_el_gwh)
        out << "      P2G#" << id << "  el " << gwh(v) << "  sng " << gwh(c.plant_sng_gwh.at(id))
            << "\n";
    out << "      total  el " << gwh(c.plant_el_total_gwh) << "  sng "
        << gwh(c.plant_sng_total_gwh) << "\n";
    out << "    Electricity network [GWh]\n";
    for (const auto& [id, v] : c.tr_demand_gwh)
        out << "      TR#" << id << "  demand " << gwh(v) << "  res " << gwh(c.tr_res_gwh.at(id))
            << "  surplus " << gwh(c.tr_surplus_gwh.at(id)) << "  absorbed "
            << gwh(c.tr_absorbed_gwh.at(id)) << "  rpf " << gwh(c.tr_rpf_gwh.at(id)) << "\n";
    out << "      total  demand " << gwh(c.demand_total_gwh) << "  res " << gwh(c.res_total_gwh)
        << "  surplus " << gwh(c.surplus_total_gwh) << "  absorbed "
        << gwh(c.absorbed_total_gwh) << "  rpf " << gwh(c.rpf_total_gwh) << "\n";
    out << "    Gas network [GWh]\n";
    out << "      demand " << gwh(c.gas_demand_gwh) << "  imported " << gwh(c.gas_import_gwh)
        << "  sng " << gwh(c.gas_sng_gwh) << "\n";
}

} // namespace

std::string render_summary_tables(const SeasonalSummary& s) {
    std::ostringstream out;
    out << "case: " << s.case_name << "  (config " << s.config_hash << ")\n";
    render_cells(out, "Heating season", s.heating);
    render_cells(out, "Non-heating season", s.non_heating);
    render_cells(out, "Whole year", s.year);
    return out.str();
}

std::string render_deltas(const std::vector<CaseDelta>& deltas) {
    std::ostringstream out;
    out << "metric,season,reference,variant,relative_delta,ratio\n";
    for (const CaseDelta& d : deltas) {
        char buf[160];
        if (d.defined)
            std::snprintf(buf, sizeof(buf), "%s,%s,%.6f,%.6f,%+.4f,%.4f", d.metric.c_str(),
                          d.season.c_str(), d.reference, d.variant, d.relative, d.ratio);
        else
            std::snprintf(buf, sizeof(buf), "%s,%s,%.6f,%.6f,undefined,undefined",
                          d.metric.c_str(), d.season.c_str(), d.reference, d.variant);
        out << buf << '\n';
    }
    return out.str();
}

} // namespace mesim
