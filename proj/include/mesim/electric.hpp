#pragma once

#include <complex>
#include <unordered_map>
#include <vector>

#include "mesim/errors.hpp"

namespace mesim {

using cplx = std::complex<double>;

enum class LoadModel { ConstantPower, ConstantAdmittance };

struct GridNode {
    int id = 0;
    int feeder = -1;      // -1 for the slack
    int transformer = -1; // -1 for the slack
    LoadModel model = LoadModel::ConstantPower;
};

struct Branch {
    int from = 0;
    int to = 0;
    cplx z; // series impedance, per unit
};

struct Transformer {
    int id = 0;
    std::vector<int> root_branches; // indices into ElectricGrid::branches
};

/// Radial MV grid. `nodes` contains every node including the slack;
/// the N = nodes.size()-1 load nodes must equal the branch count.
struct ElectricGrid {
    std::vector<GridNode> nodes;
    std::vector<Branch> branches;
    int slack_id = 0;
    std::vector<Transformer> transformers;
    double s_base_va = 10e6;
    double v_base_v = 22e3;

    int node_index(int id) const; // throws DanglingReference on unknown id
};

/// Per load node, per unit. Indexed like PathMatrix columns
/// (grid nodes in declaration order, slack skipped).
struct NodeInjection {
    std::vector<cplx> s_load;  // constant-power demand
    std::vector<cplx> y_load;  // constant-admittance load
    std::vector<cplx> s_gen;   // generation (consumed as negative load)
};

/// B x N binary path matrix: gamma(b, n) == 1 iff branch b lies on the
/// unique slack-to-node path of load node n.
struct PathMatrix {
    int branches = 0;
    int load_nodes = 0;
    std::vector<char> cell;               // row-major
    std::vector<int> load_node_ids;       // column -> node id
    std::vector<int> branch_order;        // topological order, root first

    char operator()(int b, int n) const { return cell[static_cast<size_t>(b) * load_nodes + n]; }
    int column_of(int node_id) const;
};

struct FlowSolution {
    std::vector<cplx> v;        // per load node, per unit (PathMatrix column order)
    std::vector<cplx> i_branch; // per branch, per unit
    cplx v_slack{1.0, 0.0};
    int iterations = 0;
    bool converged = false;
    std::unordered_map<int, double> transformer_mw; // signed, positive = HV -> MV
};

struct TransformerBalance {
    double import_mw = 0.0;
    double rpf_mw = 0.0;
};

PathMatrix build_gamma(const ElectricGrid& grid);

FlowSolution bfs_power_flow(const ElectricGrid& grid, const NodeInjection& inj,
                            cplx slack_voltage = {1.0, 0.0}, double tol = 1e-8,
                            int max_iter = 100, double voltage_floor = 0.5);

std::unordered_map<int, TransformerBalance> transformer_balance(const ElectricGrid& grid,
                                                                const FlowSolution& sol);

/// Slack active power injection minus load, losses and generation, per unit.
/// Zero (to tolerance) at convergence.
double power_balance_residual(const ElectricGrid& grid, const NodeInjection& inj,
                              const FlowSolution& sol);

} // namespace mesim
