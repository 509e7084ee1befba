#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mesim/engine.hpp"
#include "mesim/errors.hpp"
#include "mesim/results.hpp"
#include "mesim/scenario.hpp"
#include "mesim/summary.hpp"
#include "mesim/synth.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidationError = 2;
constexpr int kSimulationFault = 3;

mesim::SeasonalSummary summarize_dir(const std::string& dir) {
    mesim::ResultSet r = mesim::load_results(dir);
    mesim::TimeGrid time{r.start_iso, r.step_s, static_cast<int>(r.records.size())};
    mesim::SeasonCalendar cal;
    return mesim::summarize_seasonal(r, time, cal, mesim::GasProps{}.sng_lhv_kwh_kg);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled electricity/gas co-simulation with lumped variants"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, case_sel = "reference";
    std::string trace_dir, ref_dir, variant_dir, view;
    int from_step = 0, to_step = -1;

    CLI::App* run = app.add_subcommand("run", "Simulate one case over the full horizon");
    run->add_option("--scenario", scenario_path, "Scenario config JSON")->required();
    run->add_option("--case", case_sel, "reference|lpen|lpgn|lpp2g");
    run->add_option("--out", out_dir, "Output directory")->required();

    CLI::App* summ = app.add_subcommand("summarize", "Seasonal energy tables for one trace");
    summ->add_option("--trace", trace_dir, "Results directory")->required();

    CLI::App* cmp = app.add_subcommand("compare", "Variant deltas against a reference trace");
    cmp->add_option("--ref", ref_dir, "Reference results directory")->required();
    cmp->add_option("--variant", variant_dir, "Variant results directory")->required();

    CLI::App* plot = app.add_subcommand("plotdata", "Tidy CSV extract of one view");
    plot->add_option("--trace", trace_dir, "Results directory")->required();
    plot->add_option("--view", view, "balance|pressure|transformer|buffer")->required();
    plot->add_option("--from", from_step, "First step (inclusive)");
    plot->add_option("--to", to_step, "Last step (exclusive), default horizon end");

    CLI::App* cal = app.add_subcommand("calibrate", "Derive the lumped plant efficiency");
    cal->add_option("--scenario", scenario_path, "Scenario config JSON")->required();

    CLI::App* gen = app.add_subcommand("gen-example", "Write the bundled example scenario");
    gen->add_option("--out", out_dir, "Target directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kValidationError;
    }

    try {
        if (*run) {
            mesim::ScenarioOverrides ov;
            ov.case_name = case_sel;
            mesim::Scenario sc = mesim::load_scenario(scenario_path, ov);
            mesim::ResultSet r = mesim::run_case(sc, sc.selected_case);
            mesim::persist_results(r, out_dir);
            std::cout << "case " << r.case_name << ": " << r.records.size()
                      << " steps -> " << out_dir << "\n";
        } else if (*summ) {
            std::cout << mesim::render_summary_tables(summarize_dir(trace_dir));
        } else if (*cmp) {
            mesim::SeasonalSummary a = summarize_dir(ref_dir);
            mesim::SeasonalSummary b = summarize_dir(variant_dir);
            std::cout << mesim::render_deltas(mesim::compare_cases(a, b));
        } else if (*plot) {
            mesim::ResultSet r = mesim::load_results(trace_dir);
            mesim::TimeGrid time{r.start_iso, r.step_s, static_cast<int>(r.records.size())};
            if (to_step < 0) to_step = static_cast<int>(r.records.size());
            std::cout << mesim::emit_plotdata(r, time, view, from_step, to_step);
        } else if (*cal) {
            mesim::Scenario sc = mesim::load_scenario(scenario_path);
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.6f", mesim::calibrate_eta(sc));
            std::cout << "eta_p2g " << buf << "\n";
        } else if (*gen) {
            mesim::write_example(out_dir);
            std::cout << "example scenario -> " << out_dir << "/scenario.json\n";
        }
    } catch (const mesim::SimulationFault& e) {
        std::cerr << "simulation fault: " << e.what() << "\n";
        return kSimulationFault;
    } catch (const mesim::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidationError;
    }
    return kOk;
}
