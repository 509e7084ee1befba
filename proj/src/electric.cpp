#include "mesim/electric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mesim {

int ElectricGrid::node_index(int id) const {
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].id == id) return static_cast<int>(i);
    throw DanglingReference("unknown electric node id " + std::to_string(id));
}

int PathMatrix::column_of(int node_id) const {
    for (size_t i = 0; i < load_node_ids.size(); ++i)
        if (load_node_ids[i] == node_id) return static_cast<int>(i);
    throw DanglingReference("node id " + std::to_string(node_id) + " has no path-matrix column");
}

PathMatrix build_gamma(const ElectricGrid& grid) {
    const int b_count = static_cast<int>(grid.branches.size());
    const int n_count = static_cast<int>(grid.nodes.size()) - 1;
    if (n_count != b_count)
        throw NonRadialTopology("node count " + std::to_string(n_count) + " != branch count " +
                                std::to_string(b_count));

    PathMatrix gamma;
    gamma.branches = b_count;
    gamma.load_nodes = n_count;
    gamma.cell.assign(static_cast<size_t>(b_count) * n_count, 0);
    for (const auto& n : grid.nodes)
        if (n.id != grid.slack_id) gamma.load_node_ids.push_back(n.id);

    // adjacency: node id -> incident branch indices
    std::unordered_map<int, std::vector<int>> adj;
    for (int b = 0; b < b_count; ++b) {
        adj[grid.branches[b].from].push_back(b);
        adj[grid.branches[b].to].push_back(b);
    }

    // BFS from the slack, recording the branch path to every node
    std::unordered_map<int, int> parent_branch; // node id -> branch reaching it
    std::unordered_map<int, int> parent_node;   // node id -> slack-side neighbor
    std::vector<int> frontier{grid.slack_id};
    std::unordered_map<int, bool> seen{{grid.slack_id, true}};
    while (!frontier.empty()) {
        std::vector<int> next;
        for (int u : frontier) {
            for (int b : adj[u]) {
                const auto& br = grid.branches[b];
                int w = (br.from == u) ? br.to : br.from;
                if (seen.count(w)) {
                    bool is_own_parent = parent_branch.count(u) && parent_branch.at(u) == b;
                    if (!is_own_parent && w != u)
                        throw NonRadialTopology("cycle through branch " + std::to_string(b));
                    continue;
                }
                seen[w] = true;
                parent_branch[w] = b;
                parent_node[w] = u;
                gamma.branch_order.push_back(b);
                next.push_back(w);
            }
        }
        frontier = std::move(next);
    }
    if (static_cast<int>(parent_branch.size()) != b_count)
        throw NonRadialTopology("disconnected component detected");

    for (int col = 0; col < n_count; ++col) {
        int node = gamma.load_node_ids[col];
        while (node != grid.slack_id) {
            int b = parent_branch.at(node);
            gamma.cell[static_cast<size_t>(b) * n_count + col] = 1;
            node = parent_node.at(node);
        }
    }
    return gamma;
}

FlowSolution bfs_power_flow(const ElectricGrid& grid, const NodeInjection& inj, cplx slack_voltage,
                            double tol, int max_iter, double voltage_floor) {
    const PathMatrix gamma = build_gamma(grid);
    const int n = gamma.load_nodes;
    const int b_count = gamma.branches;

    FlowSolution sol;
    sol.v_slack = slack_voltage;
    sol.v.assign(n, slack_voltage); // flat start
    sol.i_branch.assign(b_count, cplx{});

    std::vector<cplx> i_node(n);
    for (int k = 1; k <= max_iter; ++k) {
        // backward: node currents, then branch currents via gamma^T
        for (int j = 0; j < n; ++j) {
            cplx s_net = inj.s_load[j] - inj.s_gen[j];
            i_node[j] = inj.y_load[j] * sol.v[j] + std::conj(s_net / sol.v[j]);
        }
        for (int b = 0; b < b_count; ++b) {
            cplx acc{};
            for (int j = 0; j < n; ++j)
                if (gamma(b, j)) acc += i_node[j];
            sol.i_branch[b] = acc;
        }
        // forward: voltage drops accumulated along each path
        double dv_max = 0.0;
        for (int j = 0; j < n; ++j) {
            cplx drop{};
            for (int b = 0; b < b_count; ++b)
                if (gamma(b, j)) drop += grid.branches[b].z * sol.i_branch[b];
            cplx v_new = slack_voltage - drop;
            dv_max = std::max(dv_max, std::abs(v_new - sol.v[j]));
            sol.v[j] = v_new;
            if (std::abs(v_new) < voltage_floor)
                throw VoltageCollapse("voltage " + std::to_string(std::abs(v_new)) +
                                      " pu below floor at node " +
                                      std::to_string(gamma.load_node_ids[j]));
        }
        sol.iterations = k;
        if (dv_max <= tol) {
            sol.converged = true;
            break;
        }
    }

    const double s_base_mw = grid.s_base_va / 1e6;
    for (const auto& tr : grid.transformers) {
        double p = 0.0;
        for (int b : tr.root_branches)
            p += (slack_voltage * std::conj(sol.i_branch[b])).real();
        sol.transformer_mw[tr.id] = p * s_base_mw;
    }
    return sol;
}

std::unordered_map<int, TransformerBalance> transformer_balance(const ElectricGrid& grid,
                                                                const FlowSolution& sol) {
    std::unordered_map<int, TransformerBalance> out;
    for (const auto& tr : grid.transformers) {
        double p = sol.transformer_mw.at(tr.id);
        out[tr.id] = TransformerBalance{std::max(p, 0.0), std::max(-p, 0.0)};
    }
    return out;
}

double power_balance_residual(const ElectricGrid& grid, const NodeInjection& inj,
                              const FlowSolution& sol) {
    double slack_p = 0.0;
    for (const auto& tr : grid.transformers)
        slack_p += sol.transformer_mw.at(tr.id) / (grid.s_base_va / 1e6);

    double load_p = 0.0, gen_p = 0.0, adm_p = 0.0, loss_p = 0.0;
    for (size_t j = 0; j < sol.v.size(); ++j) {
        load_p += inj.s_load[j].real();
        gen_p += inj.s_gen[j].real();
        adm_p += (inj.y_load[j] * sol.v[j] * std::conj(sol.v[j])).real();
    }
    for (size_t b = 0; b < sol.i_branch.size(); ++b)
        loss_p += grid.branches[b].z.real() * std::norm(sol.i_branch[b]);

    return slack_p + gen_p - load_p - adm_p - loss_p;
}

} // namespace mesim
