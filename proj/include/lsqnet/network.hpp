#ifndef LSQNET_NETWORK_HPP
#define LSQNET_NETWORK_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "lsqnet/matrix.hpp"

namespace lsqnet {

struct LocalData; // problem.hpp

/// Undirected weighted graph with mandatory self-arcs: symmetric weighting
/// matrix W, degree matrix D (row sums), Laplacian L = D - W, and neighbor
/// lists N_i = {j : w_ij > 0} (each agent neighbors itself). Immutable after
/// construction.
struct NetworkModel {
    std::size_t m = 0;
    Matrix W;
    Matrix D;
    Matrix L;
    Vector degrees;
    std::vector<std::vector<std::size_t>> neighbors;
};

/// Per-agent positive gains and their diagonal matrix.
struct Gains {
    Vector kappa;
    Matrix K;
};

/// Validates and derives a NetworkModel from a square weight matrix.
/// Errors (each with offending indices in the message): asymmetric_weights,
/// negative_weight, zero_self_weight, disconnected_graph.
NetworkModel build(const Matrix& weights);

/// The distributed gain choice kappa_i = 1/d_i.
Gains default_gains(const NetworkModel& net);

Gains make_gains(const NetworkModel& net, const Vector& kappa);

struct GainConditionVerdict {
    double min_eigenvalue = 0.0;
    bool pass = false;
};

/// Tests D K D - W K W >= 0 (the convergence theorem's gain condition);
/// pass means min eigenvalue >= -1e-9 * max|entry|.
GainConditionVerdict check_gain_condition(const NetworkModel& net, const Gains& g);

struct DegenerateDirectionReport {
    bool exists = false;
    std::optional<Vector> witness; // u in R^{mn} with Abar u = 0, Sbar u = 0, Lbar u != 0
};

/// Looks for a nonzero u with Abar u = 0 and ((DKD-WKW) kron I_n) u = 0 but
/// Lbar u != 0; such a u means the theorem requires c > 0. Computed as a basis
/// of the kernel intersection followed by a containment test against ker Lbar.
DegenerateDirectionReport check_degenerate_direction(const NetworkModel& net, const Gains& g,
                                                     const std::vector<LocalData>& blocks,
                                                     double tol = 1e-9);

} // namespace lsqnet

#endif
