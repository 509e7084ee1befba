#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mesim/dispatch.hpp"
#include "mesim/electric.hpp"
#include "mesim/gas.hpp"
#include "mesim/lumped.hpp"
#include "mesim/plant.hpp"

namespace mesim {

struct TimeGrid {
    std::string start_iso = "2021-01-01T00:00:00";
    double step_s = 900.0;
    int steps = 0;

    /// Calendar month (1-12) at the start of step i.
    int month_of(int step) const;
    /// ISO timestamp label of step i.
    std::string timestamp_of(int step) const;
};

struct SeasonCalendar {
    std::set<int> non_heating_months{4, 5, 6, 7, 8, 9};

    bool heating(int month) const { return non_heating_months.count(month) == 0; }
};

/// Per-node time series, 15-min cadence. Nodes absent from the source
/// file read as zero.
struct SeriesTable {
    std::map<int, std::vector<double>> values; // node id -> per-step values

    double at(int node_id, int step) const;
    double total(int step) const;
};

struct Scenario {
    ElectricGrid electric;
    GasGrid gas;
    std::vector<PlantParams> plants;
    ControllerConfig control;
    CaseTag selected_case = CaseTag::Reference;
    double lpp2g_eta = 0.0; // 0 = derive by calibration run
    TimeGrid time;
    SeasonCalendar seasons;
    SeriesTable el_load_mw;
    SeriesTable el_gen_mw;
    SeriesTable gas_withdrawal_kgs;
    double load_power_factor = 0.95; // inductive
    double gen_power_factor = 1.0;
    double initial_pressure_barg = -1.0; // <0 = citygate setpoint
    double initial_buffer_soc = 0.0;
    std::string config_hash;

    void validate() const;
};

struct ScenarioOverrides {
    std::string case_name;   // empty = keep file value
    double lpp2g_eta = -1.0; // <0 = keep file value
};

/// Load and eagerly validate a scenario rooted at a JSON config file.
/// Relative paths inside the config resolve against its directory; the
/// MESIM_DATA_DIR environment variable supplies a fallback base.
Scenario load_scenario(const std::string& config_path, const ScenarioOverrides& ov = {});

ElectricGrid load_electric_grid(const std::string& path);
GasGrid load_gas_grid(const std::string& path);
SeriesTable load_series_csv(const std::string& path, int expected_steps);

/// FNV-1a over every input byte (canonical across platforms).
std::string fnv1a_hex(const std::vector<std::string>& file_paths);

} // namespace mesim
