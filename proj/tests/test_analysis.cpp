#include <doctest.h>

#include <cmath>
#include <complex>

#include "lsqnet/analysis.hpp"
#include "lsqnet/error.hpp"
#include "lsqnet/simulator.hpp"
#include "support.hpp"

using namespace lsqnet;
using namespace testsupport;

namespace {

Vector stacked_x(const std::vector<AgentState>& states) {
    Vector v;
    for (const AgentState& s : states) v.insert(v.end(), s.x.begin(), s.x.end());
    return v;
}

Vector stacked_z(const std::vector<AgentState>& states) {
    Vector v;
    for (const AgentState& s : states) v.insert(v.end(), s.z.begin(), s.z.end());
    return v;
}

} // namespace

TEST_CASE("build_global: scalar fixture matches the hand product") {
    const ScalarFixture fx;
    const GlobalSystem gs = build_global(fx.net, fx.gains, fx.hp, fx.blocks);
    // left = [[2,1],[-1,1]], right = [[1,1],[-1,1]]:
    // Q = (1/3)[[1,-1],[1,2]] * [[1,1],[-1,1]] = (1/3)[[2,0],[-1,3]]
    CHECK(gs.Q(0, 0) == doctest::Approx(2.0 / 3).epsilon(1e-14));
    CHECK(gs.Q(0, 1) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(gs.Q(1, 0) == doctest::Approx(-1.0 / 3).epsilon(1e-14));
    CHECK(gs.Q(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
    // offset = (1/3)[[1,-1],[1,2]] [1, 0]' = (1/3, 1/3)
    CHECK(gs.offset[0] == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(gs.offset[1] == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("build_global: degenerate single agent with zero data gives Q = I") {
    const NetworkModel net = build(Matrix::from_rows({{1.0}}));
    const Gains g = make_gains(net, {1.0});
    std::vector<LocalData> blocks{{0, Matrix::from_rows({{0.0}}), {0.0}}};
    const GlobalSystem gs = build_global(net, g, Hyperparams{0.0, 1.0}, blocks);
    CHECK(max_abs(gs.Q - Matrix::identity(2)) < 1e-14);

    const SpectralReport report = spectral_report(gs, net, blocks);
    CHECK(report.algebraic_one == 2); // n + dim ker A = 1 + 1
    CHECK(report.geometric_one == 2);
    CHECK(report.structural_one == 2);
}

TEST_CASE("spectral_report: the paper example certifies all spectrum claims") {
    const NetworkModel net = build(fixture_weights());
    const Gains g = default_gains(net);
    for (double c : {0.0, 2.0}) {
        const GlobalSystem gs = build_global(net, g, Hyperparams{c, 1.0}, fixture_blocks());
        const SpectralReport report = spectral_report(gs, net, fixture_blocks());
        CHECK(report.eigenvalues.size() == 40);
        CHECK(report.max_magnitude <= 1.0 + 1e-9);
        CHECK(report.nearest_to_minus_one > 0.01);
        CHECK(report.algebraic_one == 5); // n + dim ker A = 4 + 1
        CHECK(report.geometric_one == 5);
        CHECK(report.structural_one == 5);
        CHECK(report.pass());
    }
}

TEST_CASE("spectral_report: full-column-rank instance has multiplicity n") {
    std::uint64_t rng = 808;
    const RandomInstance inst = random_instance(rng, /*force_full_rank=*/true);
    const GlobalSystem gs = build_global(inst.net, inst.gains, inst.hp, inst.blocks);
    const SpectralReport report = spectral_report(gs, inst.net, inst.blocks);
    CHECK(report.algebraic_one == gs.n);
    CHECK(report.geometric_one == gs.n);
    CHECK(report.structural_one == gs.n);
    CHECK(report.pass());
}

TEST_CASE("pencil: scalar fixture roots match the non-unit spectrum of Q") {
    const ScalarFixture fx;
    const GlobalSystem gs = build_global(fx.net, fx.gains, fx.hp, fx.blocks);
    const QuadraticPencil p = make_pencil(gs);
    // scalars: M2 = 3, M1 = -5, M0 = 2; roots of 3 l^2 - 5 l + 2 are 1 and 2/3
    CHECK(p.M2(0, 0) == doctest::Approx(3.0));
    CHECK(p.M1(0, 0) == doctest::Approx(-5.0));
    CHECK(p.M0(0, 0) == doctest::Approx(2.0));

    const auto eigs = gen_eigenvalues(gs.Q);
    for (const Complex& l : eigs) {
        CHECK(std::fabs(l.imag()) < 1e-12);
        const double quad =
            p.M2(0, 0) * l.real() * l.real() + p.M1(0, 0) * l.real() + p.M0(0, 0);
        CHECK(std::fabs(quad) < 1e-10); // every eigenvalue of Q annihilates the pencil
    }

    const PencilReport report = pencil_check(p, gs);
    CHECK(report.pass());
    CHECK(report.eigenpairs_checked == 1); // only lambda = 2/3 is non-unit
}

TEST_CASE("pencil_check: paper example passes for c = 0 and c = 2") {
    const NetworkModel net = build(fixture_weights());
    const Gains g = default_gains(net);
    for (double c : {0.0, 2.0}) {
        const GlobalSystem gs = build_global(net, g, Hyperparams{c, 1.0}, fixture_blocks());
        const PencilReport report = pencil_check(make_pencil(gs), gs);
        CHECK(report.min_eig_M2 > 0);
        CHECK(report.min_eig_M0 > 0);
        CHECK(report.min_eig_M_minus_one > 0);
        CHECK(report.max_pencil_residual < 1e-6);
        CHECK(report.max_reconstruction_error < 1e-6);
        CHECK(report.eigenpairs_checked > 0);
        CHECK(report.pass());
    }
}

TEST_CASE("pencil: M(-1) positive definite across a random corpus") {
    std::uint64_t rng = 1212;
    for (int trial = 0; trial < 50; ++trial) {
        const RandomInstance inst = random_instance(rng);
        const GlobalSystem gs = build_global(inst.net, inst.gains, inst.hp, inst.blocks);
        const QuadraticPencil p = make_pencil(gs);
        CHECK(sym_eigenvalues(p.M2 - p.M1 + p.M0).front() > 0);
        CHECK(sym_eigenvalues(p.M2).front() > 0);
        CHECK(sym_eigenvalues(p.M0).front() > 0);
    }
}

TEST_CASE("equilibrium_residual: converged run satisfies both characterizations") {
    const NetworkModel net = build(fixture_weights());
    const Gains g = default_gains(net);
    const Hyperparams hp{0.0, 1.0};
    RunConfig cfg;
    cfg.max_rounds = 5000;
    cfg.tol = 1e-18;
    const RunTrajectory traj = run(net, g, hp, fixture_blocks(), cfg);
    REQUIRE(traj.reason == TerminationReason::tolerance);

    const GlobalSystem gs = build_global(net, g, hp, fixture_blocks());
    const EquilibriumResidual res =
        equilibrium_residual(gs, stacked_x(traj.final_states), stacked_z(traj.final_states));
    CHECK(res.r1 < 1e-8);
    CHECK(res.r2 < 1e-8);
    CHECK(res.fixed_point < 1e-8);
}

TEST_CASE("equilibrium_residual: zero state against nonzero data") {
    const NetworkModel net = build(fixture_weights());
    const Gains g = default_gains(net);
    const Hyperparams hp{0.0, 2.5};
    const GlobalSystem gs = build_global(net, g, hp, fixture_blocks());
    const std::size_t mn = 20;
    const EquilibriumResidual res = equilibrium_residual(gs, Vector(mn, 0.0), Vector(mn, 0.0));
    const double expected = hp.cbar * norm2(transpose(gs.Abar) * gs.b);
    CHECK(res.r1 == doctest::Approx(expected).epsilon(1e-12));
    CHECK(res.r2 == doctest::Approx(0.0));
    CHECK(res.fixed_point > 0.0);
}

TEST_CASE("lagrangian_value: consensus least-squares point and zero multiplier") {
    const NetworkModel net = build(fixture_weights());
    const Hyperparams hp{0.0, 1.0};
    const StackedSystem sys = assemble(fixture_blocks());
    const LsqSolution sol = lsq_oracle(sys);

    Vector xstack(20), zzero(20, 0.0);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t k = 0; k < 4; ++k) xstack[i * 4 + k] = sol.x_star[k];

    // consensus kills the coupling term for ANY multiplier; the value is the
    // scaled optimal residual
    std::uint64_t rng = 3;
    Vector zrand(20);
    for (double& v : zrand) v = uniform_draw(rng, -5.0, 5.0);
    const double expected = hp.cbar * sol.residual; // (cbar/2)|Ax-b|^2 = cbar * residual
    CHECK(lagrangian_value(xstack, zzero, fixture_blocks(), net, hp) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(lagrangian_value(xstack, zrand, fixture_blocks(), net, hp) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("lagrangian_value: finite-difference gradient matches the analytic one") {
    std::uint64_t rng = 56;
    const RandomInstance inst = random_instance(rng);
    const std::size_t n = inst.blocks[0].A.cols();
    const std::size_t mn = inst.net.m * n;
    Vector x(mn), z(mn);
    for (double& v : x) v = uniform_draw(rng, -2.0, 2.0);
    for (double& v : z) v = uniform_draw(rng, -2.0, 2.0);

    const GlobalSystem gs = build_global(inst.net, inst.gains, inst.hp, inst.blocks);
    const Vector grad_x =
        inst.hp.cbar * (gs.AtAbar * x - transpose(gs.Abar) * gs.b) + gs.Lbar * z;
    const Vector grad_z = gs.Lbar * x;

    const double h = 1e-6;
    for (std::size_t k = 0; k < mn; ++k) {
        Vector xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        const double fd = (lagrangian_value(xp, z, inst.blocks, inst.net, inst.hp) -
                           lagrangian_value(xm, z, inst.blocks, inst.net, inst.hp)) /
                          (2 * h);
        CHECK(fd == doctest::Approx(grad_x[k]).epsilon(1e-5));

        Vector zp = z, zm = z;
        zp[k] += h;
        zm[k] -= h;
        const double fdz = (lagrangian_value(x, zp, inst.blocks, inst.net, inst.hp) -
                            lagrangian_value(x, zm, inst.blocks, inst.net, inst.hp)) /
                           (2 * h);
        CHECK(fdz == doctest::Approx(grad_z[k]).epsilon(1e-5));
    }
}

TEST_CASE("agent stepping equals the global affine iteration") {
    std::uint64_t rng = 6060;
    for (int trial = 0; trial < 10; ++trial) {
        const RandomInstance inst = random_instance(rng);
        const std::size_t n = inst.blocks[0].A.cols();
        const std::size_t mn = inst.net.m * n;
        const GlobalSystem gs = build_global(inst.net, inst.gains, inst.hp, inst.blocks);

        std::vector<AgentUpdater> updaters;
        for (std::size_t i = 0; i < inst.net.m; ++i)
            updaters.push_back(precompute(i, inst.net, inst.gains, inst.hp, inst.blocks[i]));

        std::vector<AgentState> states(inst.net.m, AgentState{Vector(n, 0.0), Vector(n, 0.0)});
        Vector y(2 * mn, 0.0);
        for (int round = 0; round < 100; ++round) {
            const std::vector<AgentState> snapshot = states;
            for (std::size_t i = 0; i < inst.net.m; ++i) {
                MessageSet msgs;
                for (std::size_t j : inst.net.neighbors[i]) msgs.emplace(j, snapshot[j]);
                states[i] = updaters[i].step(snapshot[i], msgs);
            }
            const Vector qy = gs.Q * y;
            for (std::size_t k = 0; k < 2 * mn; ++k) y[k] = qy[k] + gs.offset[k];

            double dev = 0.0;
            for (std::size_t i = 0; i < inst.net.m; ++i)
                for (std::size_t k = 0; k < n; ++k) {
                    dev = std::max(dev, std::fabs(states[i].x[k] - y[i * n + k]));
                    dev = std::max(dev, std::fabs(states[i].z[k] - y[mn + i * n + k]));
                }
            CHECK(dev <= 1e-10 * (1.0 + max_abs(y)));
        }
    }
}
