#ifndef LSQNET_PROBLEM_HPP
#define LSQNET_PROBLEM_HPP

#include <cstddef>
#include <vector>

#include "lsqnet/matrix.hpp"

namespace lsqnet {

/// Agent i's private slice of the partitioned system: A_i (n_i x n) and b_i.
struct LocalData {
    std::size_t index = 0; // 0-based agent index
    Matrix A;
    Vector b;
};

/// Row-stacked and block-diagonal forms of the partitioned system, with the
/// normal-equation operators cached.
struct StackedSystem {
    std::size_t m = 0; // agents
    std::size_t n = 0; // unknowns
    Matrix A;          // col{A_1..A_m}, (sum n_i) x n
    Vector b;          // col{b_1..b_m}
    Matrix Abar;       // diag{A_1..A_m}, (sum n_i) x mn
    Matrix AtA;        // A'A, n x n
    Vector Atb;        // A'b
};

/// Stacks the per-agent blocks; throws dimension_mismatch naming the agent
/// whose column count disagrees.
StackedSystem assemble(const std::vector<LocalData>& blocks);

struct LsqSolution {
    Vector x_star;          // minimum-norm least squares solution
    double residual = 0.0;  // (1/2) sum_i |A_i x* - b_i|^2
    std::size_t kernel_dim = 0;
};

/// Centralized ground truth: minimum-norm solution of A'A x = A'b via the
/// symmetric eigendecomposition of A'A (eigenvalues below 1e-10 * max treated
/// as zero).
LsqSolution lsq_oracle(const StackedSystem& sys);

/// True iff ||A'A x - A'b||_2 <= tol * (1 + ||A'b||_2).
bool is_lsq_solution(const StackedSystem& sys, const Vector& x, double tol);

} // namespace lsqnet

#endif
