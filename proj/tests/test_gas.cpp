#include <doctest.h>

#include <cmath>
#include <random>

#include "mesim/gas.hpp"

using namespace mesim;

namespace {

GasGrid three_node() {
    GasGrid g;
    g.nodes.push_back({0, 20.0, true});
    g.nodes.push_back({1, 10.0, false});
    g.nodes.push_back({2, 10.0, false});
    g.pipes.push_back({0, 1, 400.0, 100.0});
    g.pipes.push_back({1, 2, 250.0, 50.0});
    g.p_min_barg = 0.5;
    g.citygate_setpoint_barg = 3.5;
    return g;
}

} // namespace

TEST_CASE("Renouard flow reproduces the worked example") {
    // 5.0 / 4.9 bar abs over 1 km of DN100: 750.887 Sm3/h, checked at
    // 50-digit precision against the closed form
    Pipe p{0, 1, 1000.0, 100.0};
    GasProps props;
    double m = pipe_flow(5.0, 4.9, p, props);
    CHECK(m == doctest::Approx(0.16269220358494613126).epsilon(1e-14));

    Pipe p2{0, 1, 350.0, 80.0};
    CHECK(pipe_flow(4.2, 4.5, p2, props) ==
          doctest::Approx(-0.27324272810335899679).epsilon(1e-14));
}

TEST_CASE("Renouard antisymmetry and round trip") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> pr(2.0, 7.0);
    std::uniform_real_distribution<double> len(50.0, 2000.0);
    std::uniform_real_distribution<double> dia(40.0, 250.0);
    GasProps props;
    int tested = 0;
    while (tested < 1000) {
        double pm = pr(rng), pn = pr(rng);
        if (std::abs(pm * pm - pn * pn) <= kRenouardLinearBar2 * 1.01) continue;
        Pipe p{0, 1, len(rng), dia(rng)};
        double fwd = pipe_flow(pm, pn, p, props);
        double rev = pipe_flow(pn, pm, p, props);
        CHECK(fwd == -rev); // bitwise antisymmetry

        // invert the characteristic and come back
        double q = std::abs(fwd) * 3600.0 / props.rho_std_kg_m3;
        double dp2 = std::pow(q, 1.82) * 25.24 * p.length_m / std::pow(p.diameter_mm, 4.82);
        double back = std::copysign(1.0, fwd) *
                      props.rho_std_kg_m3 / 3600.0 *
                      std::pow(dp2 * std::pow(p.diameter_mm, 4.82) / (25.24 * p.length_m),
                               1.0 / 1.82);
        CHECK(std::abs(back - fwd) <= 1e-9 * std::abs(fwd));
        ++tested;
    }
}

TEST_CASE("small pressure differences fall on the linear segment") {
    Pipe p{0, 1, 500.0, 100.0};
    GasProps props;
    // continuous at the threshold, linear below it
    double at = pipe_flow(std::sqrt(16.0 + kRenouardLinearBar2), 4.0, p, props);
    double half = pipe_flow(std::sqrt(16.0 + kRenouardLinearBar2 / 2.0), 4.0, p, props);
    CHECK(half == doctest::Approx(at / 2.0).epsilon(1e-12));
    CHECK(pipe_flow(4.0, 4.0, p, props) == 0.0);
}

TEST_CASE("node pressure rate matches the ideal-gas relation") {
    // 0.1 kg/s into 10 m3 at 288.15 K: dP/dt = R T m_dot / (V 1e5)
    // 0.1 kg/s into 10 m3 at 288.15 K, checked against 50-digit arithmetic
    double rt = GasProps{}.r_gas_j_kgk * GasProps{}.temperature_k;
    CHECK(rt * 0.1 / (10.0 * kPaPerBar) == doctest::Approx(0.0149348145).epsilon(1e-12));

    // a gentler rate integrates in a single Euler substep; pipes carry
    // nothing while the pressures are still uniform
    GasGrid g = three_node();
    GasState st = GasState::uniform(g, 4.51325);
    GasExchange ex = GasExchange::zero(g);
    ex.injection_kgs[1] = 0.005;
    GasStepResult res = step_pressures(g, st, ex, g.substep_s);
    double dpdt = rt * 0.005 / (10.0 * kPaPerBar);
    CHECK(res.state.pressure_bar[1] ==
          doctest::Approx(4.51325 + dpdt * g.substep_s).epsilon(1e-12));
}

TEST_CASE("mass conservation against boundary flows") {
    GasGrid g = three_node();
    GasState st = GasState::uniform(g, 4.51325);
    GasExchange ex = GasExchange::zero(g);
    ex.injection_kgs[2] = 0.004;
    ex.withdrawal_kgs[1] = 0.009;

    double m0 = linepack(g, st).mass_kg;
    double imported = 0.0;
    for (int step = 0; step < 96; ++step) {
        GasStepResult r = step_pressures(g, st, ex, 900.0);
        st = r.state;
        imported += r.imported_kg;
    }
    double expected = m0 + imported + (0.004 - 0.009) * 96 * 900.0;
    double m1 = linepack(g, st).mass_kg;
    CHECK(std::abs(m1 - expected) <= 1e-6 * m1);
}

TEST_CASE("citygate regulator is one-way and capacity-limited") {
    GasGrid g = three_node();
    g.citygate_capacity_kgs = 3.0;
    GasState low = GasState::uniform(g, 2.0); // proportional term would be 5.03
    CHECK(citygate_regulate(g, low) == g.citygate_capacity_kgs);
    GasState high = GasState::uniform(g, 6.0);
    CHECK(citygate_regulate(g, high) == 0.0);
    GasState near = GasState::uniform(g, 3.5 + kAtmBar - 0.1);
    CHECK(citygate_regulate(g, near) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("withdrawing from an empty system raises") {
    GasGrid g = three_node();
    GasState st = GasState::uniform(g, 1.1);
    GasExchange ex = GasExchange::zero(g);
    ex.withdrawal_kgs[1] = 5.0;
    g.citygate_capacity_kgs = 0.0; // nothing can come in
    CHECK_THROWS_AS(step_pressures(g, st, ex, 900.0), Error);
}

TEST_CASE("derived node volume is half the incident pipe volume") {
    GasGrid g;
    g.nodes.push_back({0, 0.0, true});
    g.nodes.push_back({1, 0.0, false});
    g.pipes.push_back({0, 1, 1000.0, 200.0});
    double half = 0.5 * M_PI / 4.0 * 0.2 * 0.2 * 1000.0;
    CHECK(g.node_volume(0) == doctest::Approx(half).epsilon(1e-12));
    CHECK(g.total_volume() == doctest::Approx(2 * half).epsilon(1e-12));
}

TEST_CASE("grid validation catches structural faults") {
    GasGrid g = three_node();
    g.nodes[1].citygate = true;
    CHECK_THROWS_AS(g.validate(), SchemaError);

    GasGrid h = three_node();
    h.nodes.push_back({9, 5.0, false}); // never connected
    CHECK_THROWS_AS(h.validate(), SchemaError);

    GasGrid k = three_node();
    k.pipes[0].diameter_mm = 0.0;
    CHECK_THROWS_AS(k.validate(), SchemaError);
}

TEST_CASE("linepack energy uses the SNG heating value") {
    GasGrid g = three_node();
    GasState st = GasState::uniform(g, 4.0);
    Linepack lp = linepack(g, st);
    CHECK(lp.energy_kwh == doctest::Approx(lp.mass_kg * 13.89).epsilon(1e-12));
}
