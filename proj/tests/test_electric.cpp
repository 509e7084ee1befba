#include <doctest.h>

#include <random>

#include "mesim/electric.hpp"
#include "support.hpp"

using namespace mesim;

namespace {

ElectricGrid two_node() {
    ElectricGrid g;
    g.slack_id = 0;
    g.nodes.push_back({0, -1, -1, LoadModel::ConstantPower});
    g.nodes.push_back({1, 0, 1, LoadModel::ConstantPower});
    g.branches.push_back({0, 1, {0.02, 0.04}});
    g.transformers.push_back({1, {0}});
    return g;
}

} // namespace

TEST_CASE("gamma of a simple feeder chain") {
    ElectricGrid g;
    g.slack_id = 0;
    for (int i = 0; i <= 3; ++i) g.nodes.push_back({i, i == 0 ? -1 : 0, i == 0 ? -1 : 1});
    g.branches.push_back({0, 1, {0.01, 0.01}});
    g.branches.push_back({1, 2, {0.01, 0.01}});
    g.branches.push_back({2, 3, {0.01, 0.01}});
    g.transformers.push_back({1, {0}});

    PathMatrix gamma = build_gamma(g);
    CHECK(gamma.branches == 3);
    CHECK(gamma.load_nodes == 3);
    // branch 0 feeds everyone, branch 2 only node 3
    CHECK(gamma(0, gamma.column_of(1)) == 1);
    CHECK(gamma(0, gamma.column_of(3)) == 1);
    CHECK(gamma(2, gamma.column_of(1)) == 0);
    CHECK(gamma(2, gamma.column_of(3)) == 1);
    CHECK(gamma(1, gamma.column_of(2)) == 1);
}

TEST_CASE("loops and islands are rejected") {
    ElectricGrid g;
    g.slack_id = 0;
    for (int i = 0; i <= 2; ++i) g.nodes.push_back({i, i == 0 ? -1 : 0, i == 0 ? -1 : 1});
    g.branches.push_back({0, 1, {0.01, 0.01}});
    g.branches.push_back({1, 2, {0.01, 0.01}});
    g.branches.push_back({2, 0, {0.01, 0.01}});
    CHECK_THROWS_AS(build_gamma(g), NonRadialTopology);

    g.branches.pop_back();
    g.branches.pop_back();
    g.nodes.push_back({3, 0, 1});
    g.branches.push_back({2, 3, {0.01, 0.01}}); // 2 and 3 detached from slack
    CHECK_THROWS_AS(build_gamma(g), NonRadialTopology);
}

TEST_CASE("two-node solution matches the closed-form fixed point") {
    // independently computed at 50-digit precision:
    // v = 1 - z conj(s / v), z = 0.02 + 0.04i, s = 0.10 + 0.05i
    ElectricGrid g = two_node();
    NodeInjection inj;
    inj.s_load = {{0.10, 0.05}};
    inj.y_load = {0.0};
    inj.s_gen = {0.0};

    // default stopping rule leaves ~1e-10 behind, so tighten it here
    FlowSolution sol = bfs_power_flow(g, inj, {1.0, 0.0}, 1e-14);
    REQUIRE(sol.converged);
    CHECK(sol.v[0].real() == doctest::Approx(0.99597479774682100272).epsilon(1e-12));
    CHECK(sol.v[0].imag() == doctest::Approx(-0.003).epsilon(1e-12));
    // slack active power carries the I^2 R loss on top of the load
    double slack_p = (sol.v_slack * std::conj(sol.i_branch[0])).real();
    CHECK(slack_p == doctest::Approx(0.10025202253178997276).epsilon(1e-12));
    CHECK(power_balance_residual(g, inj, sol) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("sweep agrees with the Newton oracle on random radial networks") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        testsupport::RandomCase rc = testsupport::random_radial(rng);
        FlowSolution sol = bfs_power_flow(rc.grid, rc.inj);
        REQUIRE(sol.converged);
        std::vector<cplx> ref = testsupport::newton_power_flow(rc.grid, rc.inj);
        REQUIRE(ref.size() == sol.v.size());
        for (size_t i = 0; i < ref.size(); ++i)
            CHECK(std::abs(ref[i] - sol.v[i]) < 1e-8);
    }
}

TEST_CASE("transformer balance splits import and reverse flow") {
    ElectricGrid g = two_node();
    NodeInjection inj;
    inj.s_load = {{0.10, 0.05}};
    inj.y_load = {0.0};
    inj.s_gen = {0.0};
    auto bal = transformer_balance(g, bfs_power_flow(g, inj));
    CHECK(bal.at(1).import_mw == doctest::Approx(1.0025202253).epsilon(1e-8));
    CHECK(bal.at(1).rpf_mw == 0.0);

    inj.s_gen = {{0.4, 0.0}}; // generation dominates: flow reverses
    bal = transformer_balance(g, bfs_power_flow(g, inj));
    CHECK(bal.at(1).import_mw == 0.0);
    CHECK(bal.at(1).rpf_mw > 2.9);
}

TEST_CASE("voltage collapse raises instead of silently diverging") {
    ElectricGrid g = two_node();
    NodeInjection inj;
    inj.s_load = {{30.0, 10.0}}; // far beyond the feeder's loadability
    inj.y_load = {0.0};
    inj.s_gen = {0.0};
    CHECK_THROWS_AS(bfs_power_flow(g, inj), VoltageCollapse);
}

TEST_CASE("constant-admittance loads draw less power at depressed voltage") {
    ElectricGrid g = two_node();
    g.nodes[1].model = LoadModel::ConstantAdmittance;
    NodeInjection inj;
    inj.s_load = {0.0};
    inj.y_load = {std::conj(cplx{0.10, 0.05})};
    inj.s_gen = {0.0};
    FlowSolution sol = bfs_power_flow(g, inj);
    REQUIRE(sol.converged);
    double drawn = (sol.v[0] * std::conj(inj.y_load[0] * sol.v[0])).real();
    CHECK(drawn < 0.10);
    CHECK(drawn > 0.095);
    CHECK(power_balance_residual(g, inj, sol) == doctest::Approx(0.0).epsilon(1e-10));
}
