#include "mesim/plant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mesim {

double EfficiencyCurve::at(double fraction) const {
    if (load_fraction.empty()) throw SchemaError("empty electrolyzer efficiency curve");
    if (load_fraction.size() == 1) return efficiency.front();
    if (fraction <= load_fraction.front()) return efficiency.front();
    if (fraction >= load_fraction.back()) return efficiency.back();
    for (size_t i = 1; i < load_fraction.size(); ++i) {
        if (fraction <= load_fraction[i]) {
            double t = (fraction - load_fraction[i - 1]) /
                       (load_fraction[i] - load_fraction[i - 1]);
            return efficiency[i - 1] + t * (efficiency[i] - efficiency[i - 1]);
        }
    }
    return efficiency.back();
}

void PlantParams::validate() const {
    if (electrolyzer_kw <= 0 || methanation_kw <= 0 || buffer_kwh <= 0)
        throw SchemaError("plant capacities must be positive");
    if (!(min_load_fraction > 0 && min_load_fraction < 1))
        throw SchemaError("methanation min-load fraction must be in (0,1)");
    if (!(methanation_on_bar < buffer_max_bar))
        throw SchemaError("methanation-on threshold must be below buffer max pressure");
    for (double e : electrolyzer_eff.efficiency)
        if (!(e > 0 && e <= 1)) throw SchemaError("electrolyzer efficiency outside (0,1]");
    if (!(methanation_eff > 0 && methanation_eff <= 1))
        throw SchemaError("methanation efficiency outside (0,1]");
}

double electrolyzer_headroom_kw(const PlantParams& p, const PlantState& s, double dt_s) {
    const double dt_h = dt_s / 3600.0;
    const double headroom_kwh = std::max(p.buffer_kwh - s.buffer_kwh, 0.0);
    // efficiency depends on the load itself; a short fixed point settles it
    double load = p.electrolyzer_kw;
    for (int it = 0; it < 32; ++it) {
        double eta = p.electrolyzer_eff.at(load / p.electrolyzer_kw);
        double next = std::min(p.electrolyzer_kw, headroom_kwh / (eta * dt_h));
        if (std::abs(next - load) < 1e-12) { load = next; break; }
        load = next;
    }
    return load;
}

ElectrolyzerResult electrolyzer_step(const PlantParams& p, const PlantState& s,
                                     double setpoint_kw, double dt_s) {
    const double dt_h = dt_s / 3600.0;
    double load = std::min(std::max(setpoint_kw, 0.0), electrolyzer_headroom_kw(p, s, dt_s));
    double eta = p.electrolyzer_eff.at(load / p.electrolyzer_kw);
    double h2 = eta * load * dt_h;
    // never overfill; the fixed point leaves at most rounding error
    h2 = std::min(h2, std::max(p.buffer_kwh - s.buffer_kwh, 0.0));
    return ElectrolyzerResult{load, h2};
}

MethanationResult methanation_step(const PlantParams& p, const PlantState& s,
                                   double commanded_kg_h, double dt_s,
                                   double h2_available_kwh) {
    const double dt_h = dt_s / 3600.0;
    const double cap = p.methanation_capacity_kg_h();
    const double min_load = p.methanation_min_kg_h();

    MethanationResult r;
    double target = 0.0;
    if (s.mode == MethanationMode::Standby) {
        // hot standby: light-off at min load once the buffer holds 15 bar
        if (commanded_kg_h >= min_load && s.buffer_pressure_bar(p) >= p.methanation_on_bar)
            target = min_load;
    } else if (commanded_kg_h < min_load) {
        target = 0.0; // shutdown is exempt from the ramp-down limit
    } else {
        target = std::clamp(commanded_kg_h, s.methanation_kg_h - p.ramp_down_kg_h,
                            s.methanation_kg_h + p.ramp_up_kg_h);
        target = std::clamp(target, min_load, cap);
    }

    if (target > 0.0) {
        double h2_needed = target * dt_h * p.sng_lhv_kwh_kg / p.methanation_eff;
        if (h2_needed > h2_available_kwh) {
            // cannot hold min load from the buffer: shut down
            double h2_min = min_load * dt_h * p.sng_lhv_kwh_kg / p.methanation_eff;
            if (h2_available_kwh < h2_min) {
                target = 0.0;
            } else {
                target = h2_available_kwh * p.methanation_eff / (dt_h * p.sng_lhv_kwh_kg);
                target = std::max(target, min_load);
            }
        }
    }

    r.sng_kg_h = target;
    r.h2_consumed_kwh = target * dt_h * p.sng_lhv_kwh_kg / p.methanation_eff;
    r.mode = target > 0.0 ? MethanationMode::Running : MethanationMode::Standby;
    return r;
}

PlantState buffer_update(const PlantParams& p, const PlantState& s, double h2_in_kwh,
                         double h2_out_kwh) {
    if (h2_in_kwh < 0 || h2_out_kwh < 0)
        throw Error("buffer_update rates must be nonnegative");
    if (h2_out_kwh > s.buffer_kwh + h2_in_kwh + 1e-9)
        throw BufferUnderflow("requested " + std::to_string(h2_out_kwh) + " kWh, available " +
                              std::to_string(s.buffer_kwh + h2_in_kwh));
    PlantState out = s;
    out.buffer_kwh = std::clamp(s.buffer_kwh + h2_in_kwh - h2_out_kwh, 0.0, p.buffer_kwh);
    return out;
}

PlantStepResult plant_step(const PlantParams& p, const PlantState& s, double el_setpoint_kw,
                           double sng_command_kg_h, double dt_s) {
    const double dt_h = dt_s / 3600.0;

    ElectrolyzerResult el = electrolyzer_step(p, s, el_setpoint_kw, dt_s);
    MethanationResult meth =
        methanation_step(p, s, sng_command_kg_h, dt_s, s.buffer_kwh + el.h2_kwh);

    PlantState next = buffer_update(p, s, el.h2_kwh, meth.h2_consumed_kwh);
    next.methanation_kg_h = meth.sng_kg_h;
    next.mode = meth.mode;
    next.electrolyzer_kw = el.consumed_kw;

    const bool energized = el.consumed_kw > 0.0 || meth.sng_kg_h > 0.0;
    const double electric_kw = el.consumed_kw + (energized ? p.aux_kw : 0.0);

    next.electric_in_kwh = s.electric_in_kwh + electric_kw * dt_h;
    next.h2_produced_kwh = s.h2_produced_kwh + el.h2_kwh;
    next.sng_out_kwh = s.sng_out_kwh + meth.sng_kg_h * dt_h * p.sng_lhv_kwh_kg;

    return PlantStepResult{next, electric_kw, meth.sng_kg_h};
}

} // namespace mesim
