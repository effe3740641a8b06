#include "lsqnet/network.hpp"

#include <cmath>
#include <queue>
#include <string>

#include "lsqnet/error.hpp"
#include "lsqnet/problem.hpp"

namespace lsqnet {

NetworkModel build(const Matrix& weights) {
    if (weights.rows() != weights.cols() || weights.rows() == 0)
        throw Error(ErrorCode::dimension_mismatch, "weight matrix must be square and nonempty");
    const std::size_t m = weights.rows();

    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double w = weights(i, j);
            if (w < 0.0)
                throw Error(ErrorCode::negative_weight,
                            "negative weight at (" + std::to_string(i + 1) + "," +
                                std::to_string(j + 1) + ")");
            if (j > i && w != weights(j, i))
                throw Error(ErrorCode::asymmetric_weights,
                            "weights (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                ") and (" + std::to_string(j + 1) + "," +
                                std::to_string(i + 1) + ") differ");
        }
        if (weights(i, i) <= 0.0)
            throw Error(ErrorCode::zero_self_weight,
                        "agent " + std::to_string(i + 1) + " lacks a positive self-weight");
    }

    // connectivity over the nonzero off-diagonal pattern (weights' magnitudes ignored)
    std::vector<bool> seen(m, false);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    seen[0] = true;
    while (!frontier.empty()) {
        const std::size_t i = frontier.front();
        frontier.pop();
        for (std::size_t j = 0; j < m; ++j)
            if (j != i && weights(i, j) > 0.0 && !seen[j]) {
                seen[j] = true;
                frontier.push(j);
            }
    }
    for (std::size_t i = 0; i < m; ++i)
        if (!seen[i])
            throw Error(ErrorCode::disconnected_graph,
                        "graph is disconnected: agent " + std::to_string(i + 1) +
                            " unreachable from agent 1");

    NetworkModel net;
    net.m = m;
    net.W = weights;
    net.degrees.resize(m);
    net.neighbors.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            d += weights(i, j);
            if (weights(i, j) > 0.0) net.neighbors[i].push_back(j);
        }
        net.degrees[i] = d;
    }
    net.D = Matrix::diagonal(net.degrees);
    net.L = net.D - net.W;
    return net;
}

Gains default_gains(const NetworkModel& net) {
    Vector kappa(net.m);
    for (std::size_t i = 0; i < net.m; ++i) kappa[i] = 1.0 / net.degrees[i];
    return make_gains(net, kappa);
}

Gains make_gains(const NetworkModel& net, const Vector& kappa) {
    if (kappa.size() != net.m)
        throw Error(ErrorCode::dimension_mismatch, "gain count does not match agent count");
    for (std::size_t i = 0; i < net.m; ++i)
        if (!(kappa[i] > 0.0))
            throw Error(ErrorCode::invalid_argument,
                        "gain for agent " + std::to_string(i + 1) + " must be positive");
    return Gains{kappa, Matrix::diagonal(kappa)};
}

GainConditionVerdict check_gain_condition(const NetworkModel& net, const Gains& g) {
    if (g.kappa.size() != net.m)
        throw Error(ErrorCode::dimension_mismatch, "gains do not match network size");
    const Matrix S = net.D * g.K * net.D - net.W * g.K * net.W;
    const Vector eigs = sym_eigenvalues(S);
    GainConditionVerdict verdict;
    verdict.min_eigenvalue = eigs.front();
    verdict.pass = verdict.min_eigenvalue >= -1e-9 * max_abs(S);
    return verdict;
}

DegenerateDirectionReport check_degenerate_direction(const NetworkModel& net, const Gains& g,
                                                     const std::vector<LocalData>& blocks,
                                                     double tol) {
    const StackedSystem sys = assemble(blocks);
    if (sys.m != net.m)
        throw Error(ErrorCode::dimension_mismatch, "block count does not match network size");
    const std::size_t n = sys.n;
    const std::size_t mn = net.m * n;

    const std::vector<Vector> kerA = nullspace(sys.Abar, tol);
    if (kerA.empty()) return {};

    const Matrix S = net.D * g.K * net.D - net.W * g.K * net.W;
    const Matrix Sbar = kron(S, Matrix::identity(n));

    // coefficients alpha with Sbar * (B alpha) = 0, B = ker(Abar) basis
    Matrix B(mn, kerA.size());
    for (std::size_t k = 0; k < kerA.size(); ++k)
        for (std::size_t i = 0; i < mn; ++i) B(i, k) = kerA[k][i];
    const std::vector<Vector> coeffs = nullspace(Sbar * B, tol);
    if (coeffs.empty()) return {};

    // intersection basis has orthonormal columns (B orthonormal, alpha orthonormal)
    const Matrix Lbar = kron(net.L, Matrix::identity(n));
    const double threshold = tol * std::max(frobenius_norm(Lbar), 1.0);
    DegenerateDirectionReport report;
    double best = threshold;
    for (const Vector& alpha : coeffs) {
        const Vector u = B * alpha;
        const double image = norm2(Lbar * u);
        if (image > best) {
            best = image;
            report.exists = true;
            report.witness = u;
        }
    }
    return report;
}

} // namespace lsqnet
