#include "lsqnet/problem.hpp"

#include <string>

#include "lsqnet/error.hpp"

namespace lsqnet {

StackedSystem assemble(const std::vector<LocalData>& blocks) {
    if (blocks.empty())
        throw Error(ErrorCode::invalid_argument, "at least one agent block required");
    const std::size_t n = blocks.front().A.cols();
    std::size_t total_rows = 0;
    for (const LocalData& blk : blocks) {
        if (blk.A.rows() == 0)
            throw Error(ErrorCode::dimension_mismatch,
                        "agent " + std::to_string(blk.index + 1) + " has an empty A block");
        if (blk.A.cols() != n)
            throw Error(ErrorCode::dimension_mismatch,
                        "agent " + std::to_string(blk.index + 1) + " has " +
                            std::to_string(blk.A.cols()) + " columns, expected " +
                            std::to_string(n));
        if (blk.b.size() != blk.A.rows())
            throw Error(ErrorCode::dimension_mismatch,
                        "agent " + std::to_string(blk.index + 1) +
                            " has b length != A row count");
        total_rows += blk.A.rows();
    }

    StackedSystem sys;
    sys.m = blocks.size();
    sys.n = n;
    sys.A = Matrix(total_rows, n);
    sys.Abar = Matrix(total_rows, sys.m * n);
    sys.b.resize(total_rows);
    std::size_t r0 = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const Matrix& Ai = blocks[i].A;
        for (std::size_t r = 0; r < Ai.rows(); ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                sys.A(r0 + r, c) = Ai(r, c);
                sys.Abar(r0 + r, i * n + c) = Ai(r, c);
            }
            sys.b[r0 + r] = blocks[i].b[r];
        }
        r0 += Ai.rows();
    }
    sys.AtA = transpose(sys.A) * sys.A;
    sys.Atb = transpose(sys.A) * sys.b;
    return sys;
}

LsqSolution lsq_oracle(const StackedSystem& sys) {
    const SymmetricEigen eig = sym_eigen(sys.AtA);
    const double lambda_max = eig.eigenvalues.back();
    const double cutoff = 1e-10 * std::max(lambda_max, 0.0);

    LsqSolution sol;
    sol.x_star.assign(sys.n, 0.0);
    for (std::size_t k = 0; k < sys.n; ++k) {
        const double lambda = eig.eigenvalues[k];
        if (lambda <= cutoff) {
            ++sol.kernel_dim;
            continue;
        }
        double proj = 0.0;
        for (std::size_t i = 0; i < sys.n; ++i) proj += eig.eigenvectors(i, k) * sys.Atb[i];
        proj /= lambda;
        for (std::size_t i = 0; i < sys.n; ++i) sol.x_star[i] += proj * eig.eigenvectors(i, k);
    }
    const Vector r = sys.A * sol.x_star - sys.b;
    sol.residual = 0.5 * dot(r, r);
    return sol;
}

bool is_lsq_solution(const StackedSystem& sys, const Vector& x, double tol) {
    if (x.size() != sys.n)
        throw Error(ErrorCode::dimension_mismatch, "candidate solution has wrong dimension");
    if (!(tol > 0)) throw Error(ErrorCode::invalid_argument, "tolerance must be positive");
    return norm2(sys.AtA * x - sys.Atb) <= tol * (1.0 + norm2(sys.Atb));
}

} // namespace lsqnet
