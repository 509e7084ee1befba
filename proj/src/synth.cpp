#include "mesim/synth.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include <json.hpp>

#include "mesim/errors.hpp"
#include "mesim/scenario.hpp"

namespace mesim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double bump(double h, double center, double width) {
    double x = (h - center) / width;
    return std::exp(-x * x);
}

// Diurnal demand shape, peak 1.0 in the evening.
double load_shape(double h) {
    return 0.45 + 0.30 * bump(h, 8.0, 2.5) + 0.55 * bump(h, 19.5, 3.0);
}

// Total network gas draw in kg/s.
double gas_total(double h, bool heating) {
    double m = bump(h, 7.5, 2.5);
    double e = bump(h, 19.0, 3.5);
    if (heating) return 0.20 + 0.26 * m + 0.24 * e;
    return 0.0035 + 0.005 * m + 0.007 * e;
}

// Multi-day weather factor in [0, 1], piecewise values every 3 h with
// cosine blending in between. Clipped so some nights stay calm.
struct Weather {
    std::vector<double> knots;
    double knot_s = 3.0 * 3600.0;

    Weather(int steps, double step_s, std::mt19937& rng) {
        int n = static_cast<int>(steps * step_s / knot_s) + 2;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double prev = u(rng);
        for (int i = 0; i < n; ++i) {
            prev = 0.65 * prev + 0.35 * u(rng); // keeps multi-hour correlation
            knots.push_back(prev);
        }
    }

    double at(double t_s) const {
        double x = t_s / knot_s;
        int i = static_cast<int>(x);
        double f = x - i;
        double blend = 0.5 - 0.5 * std::cos(f * M_PI);
        double w = knots[i] * (1.0 - blend) + knots[i + 1] * blend;
        return std::min(1.0, std::max(0.0, 1.7 * w - 0.3));
    }
};

// Mostly nocturnal availability gate for the wind fleet.
double night_gate(double h) {
    if (h >= 21.0 || h < 6.0) return 1.0;
    if (h < 8.0) return 1.0 - 0.75 * (h - 6.0) / 2.0;
    if (h >= 19.0) return 0.25 + 0.75 * (h - 19.0) / 2.0;
    return 0.25;
}

struct FeederPlan {
    int first_node;
    int count;
    int transformer;
};

void write_electric(const std::string& path) {
    const std::vector<FeederPlan> feeders{
        {1, 8, 1}, {9, 8, 1}, {17, 9, 2}, {26, 8, 2}, {34, 9, 3}};
    json nodes = json::array();
    nodes.push_back({{"id", 0}});
    json branches = json::array();
    for (size_t f = 0; f < feeders.size(); ++f) {
        const FeederPlan& fp = feeders[f];
        int prev = 0;
        for (int k = 0; k < fp.count; ++k) {
            int id = fp.first_node + k;
            nodes.push_back({{"id", id},
                             {"feeder", static_cast<int>(f)},
                             {"transformer", fp.transformer}});
            branches.push_back(
                {{"from", prev}, {"to", id}, {"r_pu", 0.004}, {"x_pu", 0.008}});
            prev = id;
        }
    }
    json j{{"s_base_mva", 10.0},
           {"v_base_kv", 22.0},
           {"slack", 0},
           {"nodes", nodes},
           {"branches", branches},
           {"transformers", json::array({{{"id", 1}}, {{"id", 2}}, {{"id", 3}}})}};
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(1) << '\n';
}

// Backbone of 10 nodes off the citygate, each hosting two 3-node
// laterals. 70 nodes total, lateral ids 10 + 6b + k.
void write_gas(const std::string& path) {
    json nodes = json::array();
    json pipes = json::array();
    nodes.push_back({{"id", 0}, {"volume_m3", 20.0}, {"citygate", true}});
    for (int b = 1; b < 10; ++b) {
        nodes.push_back({{"id", b}, {"volume_m3", 10.0}});
        pipes.push_back(
            {{"from", b - 1}, {"to", b}, {"length_m", 400.0}, {"diameter_mm", 100.0}});
    }
    for (int b = 0; b < 10; ++b) {
        for (int lat = 0; lat < 2; ++lat) {
            int prev = b;
            for (int k = 0; k < 3; ++k) {
                int id = 10 + b * 6 + lat * 3 + k;
                nodes.push_back({{"id", id}, {"volume_m3", 5.0}});
                pipes.push_back({{"from", prev},
                                 {"to", id},
                                 {"length_m", 250.0},
                                 {"diameter_mm", 50.0}});
                prev = id;
            }
        }
    }
    json j{{"nodes", nodes},
           {"pipes", pipes},
           {"limits", {{"min_barg", 0.5}, {"max_barg", 5.0}}},
           {"citygate",
            {{"setpoint_barg", 3.5}, {"gain_kgs_per_bar", 2.0}, {"capacity_kgs", 1.2}}}};
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(1) << '\n';
}

void write_scenario(const std::string& path, const SynthSpec& spec) {
    json plants = json::array();
    auto plant = [](int id, int enode, int tr, int gnode) {
        return json{{"id", id},
                    {"electric_node", enode},
                    {"transformer", tr},
                    {"gas_node", gnode}};
    };
    plants.push_back(plant(1, 4, 1, 4));
    plants.push_back(plant(2, 21, 2, 30));
    plants.push_back(plant(3, 38, 3, 45));
    json j{{"time", {{"start", spec.start_iso}, {"step_s", 900.0}, {"steps", spec.steps}}},
           {"electric_grid", "electric.json"},
           {"gas_grid", "gas.json"},
           {"series",
            {{"el_load", "el_load.csv"},
             {"el_gen", "el_gen.csv"},
             {"gas_withdrawal", "gas_withdrawal.csv"}}},
           {"plants", plants},
           {"initial_buffer_soc", 0.5},
           {"case", "reference"}};
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(1) << '\n';
}

} // namespace

void write_example(const std::string& dir, const SynthSpec& spec) {
    fs::create_directories(dir);
    write_electric((fs::path(dir) / "electric.json").string());
    write_gas((fs::path(dir) / "gas.json").string());
    write_scenario((fs::path(dir) / "scenario.json").string(), spec);

    TimeGrid time{spec.start_iso, 900.0, spec.steps};
    SeasonCalendar seasons;
    std::mt19937 rng(spec.seed);
    Weather weather(spec.steps, time.step_s, rng);

    // Per-node scaling, drawn once so the profiles stay deterministic.
    std::uniform_real_distribution<double> spread(0.85, 1.15);
    std::vector<double> load_scale(43, 0.0);
    for (int id = 1; id <= 42; ++id) {
        double peak_kw = id <= 16 ? 95.0 : (id <= 33 ? 100.0 : 55.0);
        load_scale[id] = peak_kw * spread(rng) / 1000.0; // MW
    }
    struct Turbine {
        int node;
        double cap_mw;
    };
    const std::vector<Turbine> fleet{{6, 1.3}, {36, 1.0}, {40, 1.0}};
    std::vector<double> gas_weight(70, 0.0);
    double weight_sum = 0.0;
    for (int id = 10; id < 70; ++id) {
        gas_weight[id] = spread(rng);
        weight_sum += gas_weight[id];
    }
    std::uniform_real_distribution<double> jitter(0.97, 1.03);

    std::ofstream load(fs::path(dir) / "el_load.csv");
    std::ofstream gen(fs::path(dir) / "el_gen.csv");
    std::ofstream wit(fs::path(dir) / "gas_withdrawal.csv");
    if (!load || !gen || !wit) throw IoError("cannot write series under " + dir);
    load << "timestamp,node_id,value\n";
    gen << "timestamp,node_id,value\n";
    wit << "timestamp,node_id,value\n";

    char buf[64];
    for (int t = 0; t < spec.steps; ++t) {
        std::string ts = time.timestamp_of(t);
        double t_s = t * time.step_s;
        double h = std::fmod(t_s / 3600.0, 24.0);
        bool heating = seasons.heating(time.month_of(t));
        double season_el = heating ? 1.15 : 0.9;

        double lshape = load_shape(h) * season_el;
        for (int id = 1; id <= 42; ++id) {
            double mw = load_scale[id] * lshape * jitter(rng);
            std::snprintf(buf, sizeof(buf), "%s,%d,%.6f\n", ts.c_str(), id, mw);
            load << buf;
        }

        double avail = weather.at(t_s) * night_gate(h);
        for (const Turbine& w : fleet) {
            double mw = w.cap_mw * avail;
            std::snprintf(buf, sizeof(buf), "%s,%d,%.6f\n", ts.c_str(), w.node, mw);
            gen << buf;
        }

        double total = gas_total(h, heating);
        for (int id = 10; id < 70; ++id) {
            double kgs = total * gas_weight[id] / weight_sum * jitter(rng);
            std::snprintf(buf, sizeof(buf), "%s,%d,%.6f\n", ts.c_str(), id, kgs);
            wit << buf;
        }
    }
}

} // namespace mesim
