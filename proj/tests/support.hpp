#pragma once

// Shared helpers for the unit and acceptance suites: a random radial
// network generator and an independent Newton power-flow solver used as
// an oracle for the sweep solver.

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mesim/electric.hpp"

namespace testsupport {

struct RandomCase {
    mesim::ElectricGrid grid;
    mesim::NodeInjection inj;
};

inline RandomCase random_radial(std::mt19937& rng, int max_nodes = 15) {
    std::uniform_int_distribution<int> n_dist(2, max_nodes);
    std::uniform_real_distribution<double> r_dist(0.005, 0.05);
    std::uniform_real_distribution<double> p_dist(0.0, 0.25);
    std::uniform_real_distribution<double> q_dist(0.0, 0.1);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    RandomCase rc;
    int n = n_dist(rng);
    rc.grid.slack_id = 0;
    rc.grid.nodes.push_back({0, -1, -1, mesim::LoadModel::ConstantPower});
    for (int i = 1; i <= n; ++i) {
        mesim::GridNode node;
        node.id = i;
        node.feeder = 0;
        node.transformer = 1;
        node.model = u(rng) < 0.25 ? mesim::LoadModel::ConstantAdmittance
                                   : mesim::LoadModel::ConstantPower;
        rc.grid.nodes.push_back(node);
        std::uniform_int_distribution<int> parent(0, i - 1);
        mesim::Branch br;
        br.from = parent(rng);
        br.to = i;
        br.z = {r_dist(rng), r_dist(rng)};
        rc.grid.branches.push_back(br);
    }
    rc.grid.transformers.push_back({1, {}});
    for (size_t b = 0; b < rc.grid.branches.size(); ++b)
        if (rc.grid.branches[b].from == 0)
            rc.grid.transformers[0].root_branches.push_back(static_cast<int>(b));

    rc.inj.s_load.resize(n);
    rc.inj.y_load.resize(n);
    rc.inj.s_gen.resize(n);
    for (int i = 0; i < n; ++i) {
        mesim::cplx s{p_dist(rng), q_dist(rng)};
        if (rc.grid.nodes[i + 1].model == mesim::LoadModel::ConstantAdmittance) {
            rc.inj.y_load[i] = std::conj(s); // nominal power at 1 pu
        } else {
            rc.inj.s_load[i] = s;
        }
        if (u(rng) < 0.3) rc.inj.s_gen[i] = {p_dist(rng), 0.0};
    }
    return rc;
}

/// Full Newton-Raphson on the nodal admittance formulation, numeric
/// Jacobian. Entirely independent of the sweep implementation.
inline std::vector<mesim::cplx> newton_power_flow(const mesim::ElectricGrid& grid,
                                                  const mesim::NodeInjection& inj,
                                                  mesim::cplx v_slack = {1.0, 0.0},
                                                  int max_iter = 60) {
    const int n = static_cast<int>(grid.nodes.size()) - 1;
    // column index per load node, matching NodeInjection order
    std::vector<int> col(grid.nodes.size(), -1);
    {
        int c = 0;
        for (size_t i = 0; i < grid.nodes.size(); ++i)
            if (grid.nodes[i].id != grid.slack_id) col[i] = c++;
    }
    auto col_of_id = [&](int id) { return col[grid.node_index(id)]; };

    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n + 1, n + 1); // row/col n = slack
    auto ridx = [&](int id) { return id == grid.slack_id ? n : col_of_id(id); };
    for (const auto& br : grid.branches) {
        mesim::cplx adm = 1.0 / br.z;
        int a = ridx(br.from), b = ridx(br.to);
        y(a, a) += adm;
        y(b, b) += adm;
        y(a, b) -= adm;
        y(b, a) -= adm;
    }
    for (int i = 0; i < n; ++i) y(i, i) += inj.y_load[i];

    auto mismatch = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXcd v(n + 1);
        for (int i = 0; i < n; ++i) v(i) = {x(2 * i), x(2 * i + 1)};
        v(n) = v_slack;
        Eigen::VectorXcd cur = y * v;
        Eigen::VectorXd f(2 * n);
        for (int i = 0; i < n; ++i) {
            mesim::cplx s_inj = v(i) * std::conj(cur(i));
            mesim::cplx target = inj.s_gen[i] - inj.s_load[i];
            f(2 * i) = s_inj.real() - target.real();
            f(2 * i + 1) = s_inj.imag() - target.imag();
        }
        return f;
    };

    Eigen::VectorXd x(2 * n);
    for (int i = 0; i < n; ++i) {
        x(2 * i) = 1.0;
        x(2 * i + 1) = 0.0;
    }
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd f = mismatch(x);
        if (f.lpNorm<Eigen::Infinity>() < 1e-13) break;
        Eigen::MatrixXd jac(2 * n, 2 * n);
        const double h = 1e-7;
        for (int k = 0; k < 2 * n; ++k) {
            Eigen::VectorXd xp = x;
            xp(k) += h;
            jac.col(k) = (mismatch(xp) - f) / h;
        }
        x -= jac.fullPivLu().solve(f);
    }
    std::vector<mesim::cplx> out(n);
    for (int i = 0; i < n; ++i) out[i] = {x(2 * i), x(2 * i + 1)};
    return out;
}

} // namespace testsupport
