#include "mesim/scenario.hpp"

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mesim {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::chrono::sys_seconds parse_iso(const std::string& iso) {
    int y, mo, d, h = 0, mi = 0, s = 0;
    if (std::sscanf(iso.c_str(), "%d-%d-%dT%d:%d:%d", &y, &mo, &d, &h, &mi, &s) < 3)
        throw ParseError("bad ISO-8601 timestamp '" + iso + "'");
    using namespace std::chrono;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw ParseError("invalid calendar date '" + iso + "'");
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

template <typename T>
T require(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw SchemaError(where + ": missing key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw SchemaError(where + ": key '" + key + "': " + e.what());
    }
}

} // namespace

int TimeGrid::month_of(int step) const {
    using namespace std::chrono;
    auto t = parse_iso(start_iso) + seconds{static_cast<long long>(step * step_s)};
    year_month_day ymd{floor<days>(t)};
    return static_cast<int>(static_cast<unsigned>(ymd.month()));
}

std::string TimeGrid::timestamp_of(int step) const {
    using namespace std::chrono;
    auto t = parse_iso(start_iso) + seconds{static_cast<long long>(step * step_s)};
    auto d = floor<days>(t);
    year_month_day ymd{d};
    hh_mm_ss tod{t - d};
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ld",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<long>(tod.hours().count()),
                  static_cast<long>(tod.minutes().count()),
                  static_cast<long>(tod.seconds().count()));
    return buf;
}

double SeriesTable::at(int node_id, int step) const {
    auto it = values.find(node_id);
    if (it == values.end()) return 0.0;
    return it->second[step];
}

double SeriesTable::total(int step) const {
    double t = 0.0;
    for (const auto& [id, v] : values) t += v[step];
    return t;
}

void Scenario::validate() const {
    if (time.step_s <= 0) throw SchemaError("time step must be positive");
    if (time.steps <= 0) throw SchemaError("horizon must be positive");
    build_gamma(electric); // throws NonRadialTopology on a bad grid
    for (const auto& br : electric.branches)
        if (br.z.real() < 0) throw SchemaError("branch with negative resistance");
    gas.validate();
    for (const auto& p : plants) {
        p.validate();
        electric.node_index(p.electric_node);
        gas.node_index(p.gas_node);
        if (!control.plant_transformer.count(p.id))
            throw UnmappedTransformer("plant " + std::to_string(p.id) +
                                      " missing transformer mapping");
    }
    auto check_nodes = [&](const SeriesTable& t, const char* what, bool gas_side) {
        for (const auto& [id, v] : t.values) {
            if (static_cast<int>(v.size()) != time.steps)
                throw HorizonMismatch(std::string(what) + " series for node " +
                                      std::to_string(id) + " has " + std::to_string(v.size()) +
                                      " steps, horizon is " + std::to_string(time.steps));
            if (gas_side)
                gas.node_index(id);
            else
                electric.node_index(id);
        }
    };
    check_nodes(el_load_mw, "electric load", false);
    check_nodes(el_gen_mw, "electric generation", false);
    check_nodes(gas_withdrawal_kgs, "gas withdrawal", true);
}

ElectricGrid load_electric_grid(const std::string& path) {
    json j = read_json(path);
    ElectricGrid g;
    g.s_base_va = j.value("s_base_mva", 10.0) * 1e6;
    g.v_base_v = j.value("v_base_kv", 22.0) * 1e3;
    g.slack_id = require<int>(j, "slack", path);
    const double z_base = g.v_base_v * g.v_base_v / g.s_base_va;
    for (const auto& n : require<json>(j, "nodes", path)) {
        GridNode gn;
        gn.id = require<int>(n, "id", path);
        gn.feeder = n.value("feeder", -1);
        gn.transformer = n.value("transformer", -1);
        std::string model = n.value("model", "constant-power");
        if (model == "constant-power")
            gn.model = LoadModel::ConstantPower;
        else if (model == "constant-admittance")
            gn.model = LoadModel::ConstantAdmittance;
        else
            throw SchemaError(path + ": node " + std::to_string(gn.id) + ": unknown load model '" +
                              model + "'");
        g.nodes.push_back(gn);
    }
    for (const auto& b : require<json>(j, "branches", path)) {
        Branch br;
        br.from = require<int>(b, "from", path);
        br.to = require<int>(b, "to", path);
        if (b.contains("r_pu")) {
            br.z = {b.at("r_pu").get<double>(), b.value("x_pu", 0.0)};
        } else if (b.contains("r_ohm")) {
            br.z = {b.at("r_ohm").get<double>() / z_base, b.value("x_ohm", 0.0) / z_base};
        } else {
            throw SchemaError(path + ": branch needs r_pu or r_ohm");
        }
        g.branches.push_back(br);
    }
    for (const auto& t : require<json>(j, "transformers", path)) {
        Transformer tr;
        tr.id = require<int>(t, "id", path);
        if (t.contains("root_branches")) {
            tr.root_branches = t.at("root_branches").get<std::vector<int>>();
        } else {
            // infer: slack-rooted branches whose far node carries this transformer tag
            for (size_t b = 0; b < g.branches.size(); ++b) {
                const Branch& br = g.branches[b];
                int far = -1;
                if (br.from == g.slack_id) far = br.to;
                if (br.to == g.slack_id) far = br.from;
                if (far < 0) continue;
                if (g.nodes[g.node_index(far)].transformer == tr.id)
                    tr.root_branches.push_back(static_cast<int>(b));
            }
        }
        g.transformers.push_back(tr);
    }
    return g;
}

GasGrid load_gas_grid(const std::string& path) {
    json j = read_json(path);
    GasGrid g;
    for (const auto& n : require<json>(j, "nodes", path)) {
        GasNode gn;
        gn.id = require<int>(n, "id", path);
        gn.volume_m3 = n.value("volume_m3", 0.0);
        gn.citygate = n.value("citygate", false);
        g.nodes.push_back(gn);
    }
    for (const auto& p : require<json>(j, "pipes", path)) {
        Pipe pp;
        pp.from = require<int>(p, "from", path);
        pp.to = require<int>(p, "to", path);
        pp.length_m = require<double>(p, "length_m", path);
        pp.diameter_mm = require<double>(p, "diameter_mm", path);
        g.pipes.push_back(pp);
    }
    if (j.contains("props")) {
        const json& pr = j.at("props");
        g.props.rho_std_kg_m3 = pr.value("rho_std_kg_m3", g.props.rho_std_kg_m3);
        g.props.r_gas_j_kgk = pr.value("r_gas_j_kgk", g.props.r_gas_j_kgk);
        g.props.temperature_k = pr.value("temperature_k", g.props.temperature_k);
        g.props.sng_lhv_kwh_kg = pr.value("sng_lhv_kwh_kg", g.props.sng_lhv_kwh_kg);
    }
    if (j.contains("limits")) {
        g.p_min_barg = j.at("limits").value("min_barg", g.p_min_barg);
        g.p_max_barg = j.at("limits").value("max_barg", g.p_max_barg);
    }
    if (j.contains("citygate")) {
        const json& cg = j.at("citygate");
        g.citygate_setpoint_barg = cg.value("setpoint_barg", g.citygate_setpoint_barg);
        g.citygate_gain_kgs_per_bar = cg.value("gain_kgs_per_bar", g.citygate_gain_kgs_per_bar);
        g.citygate_capacity_kgs = cg.value("capacity_kgs", g.citygate_capacity_kgs);
    }
    g.substep_s = j.value("substep_s", g.substep_s);
    g.validate();
    return g;
}

SeriesTable load_series_csv(const std::string& path, int expected_steps) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    SeriesTable t;
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string ts, id_s, val_s;
        if (!std::getline(ss, ts, ',') || !std::getline(ss, id_s, ',') ||
            !std::getline(ss, val_s))
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected 3 columns");
        try {
            t.values[std::stoi(id_s)].push_back(std::stod(val_s));
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad number");
        }
    }
    for (const auto& [id, v] : t.values)
        if (static_cast<int>(v.size()) != expected_steps)
            throw HorizonMismatch(path + ": node " + std::to_string(id) + " has " +
                                  std::to_string(v.size()) + " rows, expected " +
                                  std::to_string(expected_steps));
    return t;
}

std::string fnv1a_hex(const std::vector<std::string>& file_paths) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](const char* data, size_t n) {
        for (size_t i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(data[i]);
            h *= 0x100000001b3ull;
        }
    };
    for (const auto& p : file_paths) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw IoError("cannot hash missing file " + p);
        std::ostringstream buf;
        buf << in.rdbuf();
        std::string bytes = buf.str();
        mix(bytes.data(), bytes.size());
        mix("\x1f", 1); // file separator
    }
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
    return out;
}

Scenario load_scenario(const std::string& config_path, const ScenarioOverrides& ov) {
    json j = read_json(config_path);
    fs::path base = fs::path(config_path).parent_path();
    if (const char* env = std::getenv("MESIM_DATA_DIR"); env && base.empty()) base = env;
    auto resolve = [&](const std::string& rel) {
        fs::path p(rel);
        return p.is_absolute() ? p.string() : (base / p).string();
    };

    Scenario sc;
    const json& time = require<json>(j, "time", config_path);
    sc.time.start_iso = require<std::string>(time, "start", config_path);
    sc.time.step_s = time.value("step_s", 900.0);
    sc.time.steps = require<int>(time, "steps", config_path);

    std::string egrid_path = resolve(require<std::string>(j, "electric_grid", config_path));
    std::string ggrid_path = resolve(require<std::string>(j, "gas_grid", config_path));
    sc.electric = load_electric_grid(egrid_path);
    sc.gas = load_gas_grid(ggrid_path);

    const json& series = require<json>(j, "series", config_path);
    std::string load_path = resolve(require<std::string>(series, "el_load", config_path));
    std::string gen_path = resolve(require<std::string>(series, "el_gen", config_path));
    std::string wit_path = resolve(require<std::string>(series, "gas_withdrawal", config_path));
    sc.el_load_mw = load_series_csv(load_path, sc.time.steps);
    sc.el_gen_mw = load_series_csv(gen_path, sc.time.steps);
    sc.gas_withdrawal_kgs = load_series_csv(wit_path, sc.time.steps);

    for (const auto& pj : require<json>(j, "plants", config_path)) {
        PlantParams p;
        p.id = require<int>(pj, "id", config_path);
        p.electrolyzer_kw = pj.value("electrolyzer_kw", p.electrolyzer_kw);
        p.methanation_kw = pj.value("methanation_kw", p.methanation_kw);
        p.buffer_kwh = pj.value("buffer_kwh", p.buffer_kwh);
        p.buffer_max_bar = pj.value("buffer_max_bar", p.buffer_max_bar);
        p.methanation_on_bar = pj.value("methanation_on_bar", p.methanation_on_bar);
        p.ramp_up_kg_h = pj.value("ramp_up_kg_h", p.ramp_up_kg_h);
        p.ramp_down_kg_h = pj.value("ramp_down_kg_h", p.ramp_down_kg_h);
        p.min_load_fraction = pj.value("min_load_fraction", p.min_load_fraction);
        p.aux_kw = pj.value("aux_kw", p.aux_kw);
        p.methanation_eff = pj.value("methanation_eff", p.methanation_eff);
        p.sng_lhv_kwh_kg = pj.value("sng_lhv_kwh_kg", p.sng_lhv_kwh_kg);
        p.h2_lhv_kwh_kg = pj.value("h2_lhv_kwh_kg", p.h2_lhv_kwh_kg);
        if (pj.contains("electrolyzer_eff")) {
            const json& e = pj.at("electrolyzer_eff");
            if (e.is_number()) {
                p.electrolyzer_eff = EfficiencyCurve{{1.0}, {e.get<double>()}};
            } else {
                p.electrolyzer_eff.load_fraction =
                    e.at("load_fraction").get<std::vector<double>>();
                p.electrolyzer_eff.efficiency = e.at("efficiency").get<std::vector<double>>();
                if (p.electrolyzer_eff.load_fraction.size() !=
                    p.electrolyzer_eff.efficiency.size())
                    throw SchemaError(config_path + ": efficiency curve arrays differ in length");
            }
        }
        p.electric_node = require<int>(pj, "electric_node", config_path);
        p.gas_node = require<int>(pj, "gas_node", config_path);
        int tr = require<int>(pj, "transformer", config_path);
        sc.control.plant_transformer[p.id] = tr;
        sc.plants.push_back(p);
    }

    if (j.contains("controller")) {
        const json& c = j.at("controller");
        sc.control.curtail_barg = c.value("curtail_barg", sc.control.curtail_barg);
        sc.control.resume_barg = c.value("resume_barg", sc.control.resume_barg);
        sc.control.overshoot_tolerance_bar =
            c.value("overshoot_tolerance_bar", sc.control.overshoot_tolerance_bar);
        sc.control.partial_curtailment =
            c.value("partial_curtailment", sc.control.partial_curtailment);
    }
    if (j.contains("seasons")) {
        sc.seasons.non_heating_months.clear();
        for (int m : j.at("seasons").at("non_heating_months").get<std::vector<int>>())
            sc.seasons.non_heating_months.insert(m);
    }
    sc.selected_case = case_from_name(j.value("case", "reference"));
    sc.lpp2g_eta = j.value("lpp2g_eta", 0.0);
    sc.load_power_factor = j.value("load_power_factor", sc.load_power_factor);
    sc.gen_power_factor = j.value("gen_power_factor", sc.gen_power_factor);
    sc.initial_pressure_barg = j.value("initial_pressure_barg", sc.initial_pressure_barg);
    sc.initial_buffer_soc = j.value("initial_buffer_soc", sc.initial_buffer_soc);

    if (!ov.case_name.empty()) sc.selected_case = case_from_name(ov.case_name);
    if (ov.lpp2g_eta >= 0) sc.lpp2g_eta = ov.lpp2g_eta;

    sc.config_hash =
        fnv1a_hex({config_path, egrid_path, ggrid_path, load_path, gen_path, wit_path});
    sc.validate();
    return sc;
}

} // namespace mesim
