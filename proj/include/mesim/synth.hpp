#pragma once

#include <string>

namespace mesim {

/// Knobs for the bundled example scenario. The defaults cover four
/// contiguous weeks straddling the season change, which is enough to
/// exercise both heating and non-heating behaviour in one run.
struct SynthSpec {
    std::string start_iso = "2021-09-17T00:00:00";
    int steps = 2688; // 28 days at 15 min
    unsigned seed = 1337;
};

/// Writes a complete, self-contained scenario bundle into `dir`:
/// electric.json, gas.json, scenario.json plus the three series CSVs.
/// Deterministic for a given spec.
void write_example(const std::string& dir, const SynthSpec& spec = {});

} // namespace mesim
