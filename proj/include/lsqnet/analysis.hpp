#ifndef LSQNET_ANALYSIS_HPP
#define LSQNET_ANALYSIS_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "lsqnet/agent.hpp"
#include "lsqnet/matrix.hpp"
#include "lsqnet/network.hpp"
#include "lsqnet/problem.hpp"

namespace lsqnet {

/// The stacked iteration y(t+1) = Q y(t) + offset over y = col{x, z}, plus the
/// lifted operators it was built from (kept for the spectral checks).
struct GlobalSystem {
    std::size_t m = 0;
    std::size_t n = 0;
    Hyperparams hp;
    Matrix Q;      // 2mn x 2mn
    Vector offset; // 2mn
    Matrix Abar;   // block-diagonal data matrix
    Vector b;      // stacked right-hand side
    Matrix Lbar, Dbar, Wbar, Kbar;
    Matrix AtAbar; // Abar' Abar
};

/// Builds Q and the offset by LU-solving the left block system against the
/// right block system and the data column.
GlobalSystem build_global(const NetworkModel& net, const Gains& g, const Hyperparams& hp,
                          const std::vector<LocalData>& blocks);

struct SpectralReport {
    std::vector<Complex> eigenvalues;
    double max_magnitude = 0.0;
    double nearest_to_minus_one = 0.0;     // min |lambda + 1|
    std::size_t algebraic_one = 0;         // count of |lambda - 1| < 1e-6
    std::size_t geometric_one = 0;         // 2mn - rank(Q - I, 1e-8)
    std::size_t structural_one = 0;        // n + dim ker A (the eigenspace structure)
    bool pass_unit_circle = false;         // max |lambda| <= 1 + tol
    bool pass_minus_one = false;           // min |lambda + 1| > 0.01
    bool pass_multiplicity = false;        // all three multiplicity counts agree
    bool pass() const { return pass_unit_circle && pass_minus_one && pass_multiplicity; }
};

/// Numerically certifies the spectrum claims: unit-circle bound, -1 excluded,
/// and the eigenvalue-1 multiplicity structure (algebraic = geometric =
/// n + dim ker A).
SpectralReport spectral_report(const GlobalSystem& gs, const NetworkModel& net,
                               const std::vector<LocalData>& blocks, double tol = 1e-9);

/// Symmetric mn x mn coefficients of the quadratic pencil
/// M(lambda) = lambda^2 M2 + lambda M1 + M0 whose singularity characterizes
/// the non-unit eigenvalues of Q.
struct QuadraticPencil {
    Matrix M0, M1, M2;
};

QuadraticPencil make_pencil(const GlobalSystem& gs);

struct PencilReport {
    double min_eig_M2 = 0.0;
    double min_eig_M0 = 0.0;
    double min_eig_M_minus_one = 0.0; // M(-1) = M2 - M1 + M0
    std::size_t eigenpairs_checked = 0;
    double max_pencil_residual = 0.0;       // max ||M(l)u|| / (||u|| ||M(l)||_F)
    double max_reconstruction_error = 0.0;  // ubar vs (1/(l-1)) Kbar (l Dbar - Wbar) u
    std::vector<std::string> violations;
    bool pass() const { return violations.empty(); }
};

/// For every eigenpair (lambda, col{u, ubar}) of Q with |lambda - 1| > 10*tol:
/// asserts M(lambda) u = 0 within tol and that ubar is reconstructed from u by
/// the eigen-relation; also asserts M2, M0, and M(-1) are positive definite.
/// Eigenvectors are recovered by nullspace(Q - lambda I) per distinct
/// eigenvalue (complex lambda via the 2x-size real embedding).
PencilReport pencil_check(const QuadraticPencil& pencil, const GlobalSystem& gs,
                          double tol = 1e-6);

struct EquilibriumResidual {
    double r1 = 0.0;          // ||cbar (Abar'Abar x - Abar'b) + Lbar z||
    double r2 = 0.0;          // ||Lbar x||
    double fixed_point = 0.0; // ||(I - Q) y - offset||
};

/// The KKT residuals at (x, z) together with the fixed-point residual of the
/// iteration; the two vanish together.
EquilibriumResidual equilibrium_residual(const GlobalSystem& gs, const Vector& x,
                                         const Vector& z);

/// G(x, z) = (cbar/2) (Abar x - b)'(Abar x - b) + z' Lbar x.
double lagrangian_value(const Vector& x, const Vector& z, const std::vector<LocalData>& blocks,
                        const NetworkModel& net, const Hyperparams& hp);

} // namespace lsqnet

#endif
