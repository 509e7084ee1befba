#include "mesim/results.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mesim/errors.hpp"

namespace mesim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void put(std::ostream& out, int step, const char* entity, int id, const char* field, double v) {
    out << step << ',' << entity << ',' << id << ',' << field << ',' << num(v) << '\n';
}

} // namespace

void persist_results(const ResultSet& r, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream meta(fs::path(dir) / "meta.json");
    std::ofstream trace(fs::path(dir) / "trace.csv");
    if (!meta || !trace) throw IoError("cannot write results under " + dir);

    json m{{"case", r.case_name},
           {"config_hash", r.config_hash},
           {"start", r.start_iso},
           {"step_s", r.step_s},
           {"steps", r.records.size()},
           {"calibrated_eta", num(r.calibrated_eta)}};
    meta << m.dump(2) << '\n';

    trace << "step,entity,id,field,value\n";
    for (const StepRecord& s : r.records) {
        for (size_t i = 0; i < s.voltage_pu.size(); ++i)
            put(trace, s.step, "enode", static_cast<int>(i), "voltage_pu", s.voltage_pu[i]);
        for (const auto& [id, v] : s.tr_surplus_mw) put(trace, s.step, "tr", id, "surplus_mw", v);
        for (const auto& [id, v] : s.tr_import_mw) put(trace, s.step, "tr", id, "import_mw", v);
        for (const auto& [id, v] : s.tr_rpf_mw) put(trace, s.step, "tr", id, "rpf_mw", v);
        for (const auto& [id, v] : s.tr_demand_mw) put(trace, s.step, "tr", id, "demand_mw", v);
        for (const auto& [id, v] : s.tr_res_mw) put(trace, s.step, "tr", id, "res_mw", v);
        for (const auto& [id, v] : s.tr_absorbed_mw)
            put(trace, s.step, "tr", id, "absorbed_mw", v);
        put(trace, s.step, "sys", 0, "total_load_mw", s.total_load_mw);
        put(trace, s.step, "sys", 0, "total_gen_mw", s.total_gen_mw);
        put(trace, s.step, "sys", 0, "losses_mw", s.losses_mw);
        put(trace, s.step, "sys", 0, "surplus_mw", s.surplus_mw);
        put(trace, s.step, "sys", 0, "hv_import_mw", s.hv_import_mw);
        put(trace, s.step, "sys", 0, "residual_rpf_mw", s.residual_rpf_mw);
        put(trace, s.step, "sys", 0, "p2g_electric_mw", s.p2g_electric_mw);
        for (size_t i = 0; i < s.gas_pressure_barg.size(); ++i)
            put(trace, s.step, "gnode", static_cast<int>(i), "pressure_barg",
                s.gas_pressure_barg[i]);
        for (size_t i = 0; i < s.pipe_flow_kgs.size(); ++i)
            put(trace, s.step, "pipe", static_cast<int>(i), "flow_kgs", s.pipe_flow_kgs[i]);
        put(trace, s.step, "sys", 0, "withdrawal_kgs", s.withdrawal_kgs);
        put(trace, s.step, "sys", 0, "sng_injected_kgs", s.sng_injected_kgs);
        put(trace, s.step, "sys", 0, "citygate_import_kgs", s.citygate_import_kgs);
        put(trace, s.step, "sys", 0, "linepack_kg", s.linepack_kg);
        put(trace, s.step, "sys", 0, "linepack_kwh", s.linepack_kwh);
        for (const auto& [id, p] : s.plants) {
            put(trace, s.step, "plant", id, "setpoint_kw", p.setpoint_kw);
            put(trace, s.step, "plant", id, "electric_kw", p.electric_kw);
            put(trace, s.step, "plant", id, "aux_kw", p.aux_kw);
            put(trace, s.step, "plant", id, "soc", p.soc);
            put(trace, s.step, "plant", id, "sng_kg_h", p.sng_kg_h);
            put(trace, s.step, "plant", id, "curtailment", p.curtailment);
        }
    }
}

ResultSet load_results(const std::string& dir) {
    std::ifstream meta(fs::path(dir) / "meta.json");
    std::ifstream trace(fs::path(dir) / "trace.csv");
    if (!meta || !trace) throw IoError("cannot read results under " + dir);

    ResultSet r;
    json m = json::parse(meta);
    r.case_name = m.at("case").get<std::string>();
    r.config_hash = m.at("config_hash").get<std::string>();
    r.start_iso = m.at("start").get<std::string>();
    r.step_s = m.at("step_s").get<double>();
    r.calibrated_eta = std::stod(m.at("calibrated_eta").get<std::string>());
    r.records.resize(m.at("steps").get<size_t>());
    for (size_t i = 0; i < r.records.size(); ++i) r.records[i].step = static_cast<int>(i);

    std::string line;
    std::getline(trace, line); // header
    while (std::getline(trace, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string step_s_, entity, id_s, field, value_s;
        std::getline(ss, step_s_, ',');
        std::getline(ss, entity, ',');
        std::getline(ss, id_s, ',');
        std::getline(ss, field, ',');
        std::getline(ss, value_s);
        int step = std::stoi(step_s_);
        int id = std::stoi(id_s);
        double v = std::stod(value_s);
        if (step < 0 || step >= static_cast<int>(r.records.size()))
            throw IoError(dir + "/trace.csv: step out of range");
        StepRecord& s = r.records[step];
        auto at = [&](std::vector<double>& vec) -> double& {
            if (id >= static_cast<int>(vec.size())) vec.resize(id + 1);
            return vec[id];
        };
        if (entity == "enode") {
            at(s.voltage_pu) = v;
        } else if (entity == "gnode") {
            at(s.gas_pressure_barg) = v;
        } else if (entity == "pipe") {
            at(s.pipe_flow_kgs) = v;
        } else if (entity == "tr") {
            if (field == "surplus_mw") s.tr_surplus_mw[id] = v;
            else if (field == "import_mw") s.tr_import_mw[id] = v;
            else if (field == "rpf_mw") s.tr_rpf_mw[id] = v;
            else if (field == "demand_mw") s.tr_demand_mw[id] = v;
            else if (field == "res_mw") s.tr_res_mw[id] = v;
            else if (field == "absorbed_mw") s.tr_absorbed_mw[id] = v;
        } else if (entity == "plant") {
            PlantRecord& p = s.plants[id];
            if (field == "setpoint_kw") p.setpoint_kw = v;
            else if (field == "electric_kw") p.electric_kw = v;
            else if (field == "aux_kw") p.aux_kw = v;
            else if (field == "soc") p.soc = v;
            else if (field == "sng_kg_h") p.sng_kg_h = v;
            else if (field == "curtailment") p.curtailment = static_cast<int>(v);
        } else if (entity == "sys") {
            if (field == "total_load_mw") s.total_load_mw = v;
            else if (field == "total_gen_mw") s.total_gen_mw = v;
            else if (field == "losses_mw") s.losses_mw = v;
            else if (field == "surplus_mw") s.surplus_mw = v;
            else if (field == "hv_import_mw") s.hv_import_mw = v;
            else if (field == "residual_rpf_mw") s.residual_rpf_mw = v;
            else if (field == "p2g_electric_mw") s.p2g_electric_mw = v;
            else if (field == "withdrawal_kgs") s.withdrawal_kgs = v;
            else if (field == "sng_injected_kgs") s.sng_injected_kgs = v;
            else if (field == "citygate_import_kgs") s.citygate_import_kgs = v;
            else if (field == "linepack_kg") s.linepack_kg = v;
            else if (field == "linepack_kwh") s.linepack_kwh = v;
        }
    }
    return r;
}

} // namespace mesim
