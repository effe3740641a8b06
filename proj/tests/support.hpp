#ifndef LSQNET_TESTS_SUPPORT_HPP
#define LSQNET_TESTS_SUPPORT_HPP

#include <cstdint>
#include <vector>

#include "lsqnet/agent.hpp"
#include "lsqnet/network.hpp"
#include "lsqnet/problem.hpp"
#include "lsqnet/simulator.hpp"

namespace testsupport {

using namespace lsqnet;

/// The paper's five-node example: weight matrix, degrees {3,4,5,5,2}, and the
/// five single-row equation blocks over n = 4 unknowns.
inline Matrix fixture_weights() {
    return Matrix::from_rows({{0.9, 1.5, 0.0, 0.6, 0.0},
                              {1.5, 0.7, 1.8, 0.0, 0.0},
                              {0.0, 1.8, 1.0, 2.2, 0.0},
                              {0.6, 0.0, 2.2, 0.8, 1.4},
                              {0.0, 0.0, 0.0, 1.4, 0.6}});
}

inline std::vector<LocalData> fixture_blocks() {
    std::vector<LocalData> blocks;
    blocks.push_back({0, Matrix::from_rows({{1, 2, 3, 4}}), {10}});
    blocks.push_back({1, Matrix::from_rows({{4, 5, 6, 7}}), {20}});
    blocks.push_back({2, Matrix::from_rows({{1, 2, 3, 4}}), {15}});
    blocks.push_back({3, Matrix::from_rows({{5, 6, 3, 4}}), {17}});
    blocks.push_back({4, Matrix::from_rows({{4, 3, 2, 1}}), {6}});
    return blocks;
}

// Frozen from an independent pseudo-inverse computation (numpy, minimum-norm
// solution of the stacked 5x4 system; exact value (-105, 351, -59, 397)/176).
inline Vector fixture_min_norm_solution() {
    return {-0.596590909090909, 1.994318181818182, -0.335227272727273, 2.255681818181818};
}

/// Single-agent scalar fixture: A = [1], b = 1, w11 = 1, kappa = 1, c = 0,
/// cbar = 1; its update system is [[2, 1], [-1, 1]].
struct ScalarFixture {
    NetworkModel net = build(Matrix::from_rows({{1.0}}));
    Gains gains = make_gains(net, {1.0});
    Hyperparams hp{0.0, 1.0};
    std::vector<LocalData> blocks{LocalData{0, Matrix::from_rows({{1.0}}), {1.0}}};
};

/// Deterministic random connected graph with self-arcs: spanning tree plus
/// extra edges, weights in [0.5, 2.5], self-weights in [0.5, 1.5].
inline Matrix random_connected_weights(std::uint64_t& rng, std::size_t m) {
    Matrix w(m, m);
    for (std::size_t v = 1; v < m; ++v) {
        const std::size_t u =
            static_cast<std::size_t>(uniform_draw(rng, 0.0, static_cast<double>(v)));
        const double value = uniform_draw(rng, 0.5, 2.5);
        w(u, v) = w(v, u) = value;
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j)
            if (w(i, j) == 0.0 && uniform_draw(rng, 0.0, 1.0) < 0.4)
                w(i, j) = w(j, i) = uniform_draw(rng, 0.5, 2.5);
        w(i, i) = uniform_draw(rng, 0.5, 1.5);
    }
    return w;
}

struct RandomInstance {
    NetworkModel net;
    Gains gains;
    std::vector<LocalData> blocks;
    Hyperparams hp;
};

/// Small random instance for the cross-module corpora: m <= 4 agents, n <= 3
/// unknowns, n_i <= 2 rows per agent, default gains.
inline RandomInstance random_instance(std::uint64_t& rng, bool force_full_rank = false) {
    RandomInstance inst;
    const std::size_t m = static_cast<std::size_t>(uniform_draw(rng, 2.0, 4.999));
    const std::size_t n = static_cast<std::size_t>(uniform_draw(rng, 1.0, 3.999));
    inst.net = build(random_connected_weights(rng, m));
    inst.gains = default_gains(inst.net);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t ni = static_cast<std::size_t>(uniform_draw(rng, 1.0, 2.999));
        Matrix A(ni, n);
        for (std::size_t r = 0; r < ni; ++r)
            for (std::size_t c = 0; c < n; ++c) A(r, c) = uniform_draw(rng, -2.0, 2.0);
        Vector b(ni);
        for (double& v : b) v = uniform_draw(rng, -3.0, 3.0);
        inst.blocks.push_back({i, std::move(A), std::move(b)});
    }
    if (force_full_rank) {
        // widen until the stacked matrix has full column rank
        StackedSystem sys = assemble(inst.blocks);
        while (rank(sys.A, 1e-9) < n) {
            Matrix extra(1, n);
            for (std::size_t c = 0; c < n; ++c) extra(0, c) = uniform_draw(rng, -2.0, 2.0);
            Matrix& A0 = inst.blocks[0].A;
            Matrix grown(A0.rows() + 1, n);
            for (std::size_t r = 0; r < A0.rows(); ++r)
                for (std::size_t c = 0; c < n; ++c) grown(r, c) = A0(r, c);
            for (std::size_t c = 0; c < n; ++c) grown(A0.rows(), c) = extra(0, c);
            A0 = grown;
            inst.blocks[0].b.push_back(uniform_draw(rng, -3.0, 3.0));
            sys = assemble(inst.blocks);
        }
    }
    const double cs[] = {0.0, 0.5, 2.0};
    const double cbars[] = {0.5, 1.0, 2.0};
    inst.hp.c = cs[static_cast<int>(uniform_draw(rng, 0.0, 2.999))];
    inst.hp.cbar = cbars[static_cast<int>(uniform_draw(rng, 0.0, 2.999))];
    return inst;
}

/// Constructed instance whose gain matrix makes D K D - W K W singular with a
/// non-consensus kernel (indefinite: the gain condition itself fails, which is
/// unavoidable: 1'(DKD-WKW)1 = 0 identically, so the PSD cone is exactly the
/// kappa = t/d ray whose kernel is consensus). Frozen from a numerical search.
struct DegenerateFixture {
    NetworkModel net = build(Matrix::from_rows(
        {{1.968577707627808, 0.375486881611387, 1.4101443065549775},
         {0.375486881611387, 2.939155655418068, 0.9890715910025417},
         {1.4101443065549775, 0.9890715910025417, 0.6313430712535059}}));
    Gains gains = make_gains(net, {235.8725554512404, 5.714382930631645e-04, 1.0});
    // kernel direction of the singular S, not a consensus vector
    Vector mu{8.8533441367831338e-04, -0.96508503694764147, 0.26193527376576325};
};

} // namespace testsupport

#endif
