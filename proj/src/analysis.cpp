#include "lsqnet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "lsqnet/error.hpp"

namespace lsqnet {

GlobalSystem build_global(const NetworkModel& net, const Gains& g, const Hyperparams& hp,
                          const std::vector<LocalData>& blocks) {
    validate(hp);
    const StackedSystem sys = assemble(blocks);
    if (sys.m != net.m)
        throw Error(ErrorCode::dimension_mismatch, "block count does not match network");

    GlobalSystem gs;
    gs.m = net.m;
    gs.n = sys.n;
    gs.hp = hp;
    const Matrix In = Matrix::identity(sys.n);
    gs.Lbar = kron(net.L, In);
    gs.Dbar = kron(net.D, In);
    gs.Wbar = kron(net.W, In);
    gs.Kbar = kron(g.K, In);
    gs.Abar = sys.Abar;
    gs.b = sys.b;
    gs.AtAbar = transpose(sys.Abar) * sys.Abar;

    const std::size_t mn = gs.m * gs.n;
    const Matrix KD = gs.Kbar * gs.Dbar;
    const Matrix KW = gs.Kbar * gs.Wbar;

    Matrix left(2 * mn, 2 * mn);
    Matrix right(2 * mn, 2 * mn);
    for (std::size_t i = 0; i < mn; ++i) {
        for (std::size_t j = 0; j < mn; ++j) {
            left(i, j) = hp.cbar * (gs.Kbar * gs.AtAbar)(i, j) + hp.c * KD(i, j);
            left(i, mn + j) = KD(i, j);
            left(mn + i, j) = -KD(i, j);
            right(i, j) = hp.c * KW(i, j);
            right(i, mn + j) = KW(i, j);
            right(mn + i, j) = -KW(i, j);
        }
        left(i, i) += 1.0;
        left(mn + i, mn + i) = 1.0;
        right(i, i) += 1.0;
        right(mn + i, mn + i) = 1.0;
    }

    Vector rhs(2 * mn, 0.0);
    const Vector Atb = transpose(gs.Abar) * gs.b;
    for (std::size_t i = 0; i < mn; ++i) rhs[i] = hp.cbar * (gs.Kbar * Atb)[i];

    LuFactorization lu(left);
    gs.Q = lu.solve(right);
    gs.offset = lu.solve(rhs);
    return gs;
}

namespace {

constexpr double kUnitWindow = 1e-6;   // |lambda - 1| window for the algebraic count
constexpr double kRankTol = 1e-8;      // rank tolerance for Q - I
constexpr double kMinusOneMargin = 0.01;
constexpr double kEigvecTol = 1e-8;    // nullspace tolerance for eigenvector recovery

} // namespace

SpectralReport spectral_report(const GlobalSystem& gs, const NetworkModel& net,
                               const std::vector<LocalData>& blocks, double tol) {
    if (!(tol > 0)) throw Error(ErrorCode::invalid_argument, "tolerance must be positive");
    SpectralReport report;
    report.eigenvalues = gen_eigenvalues(gs.Q);

    report.max_magnitude = 0.0;
    report.nearest_to_minus_one = std::numeric_limits<double>::infinity();
    for (const Complex& l : report.eigenvalues) {
        report.max_magnitude = std::max(report.max_magnitude, std::abs(l));
        report.nearest_to_minus_one = std::min(report.nearest_to_minus_one, std::abs(l + 1.0));
        if (std::abs(l - 1.0) < kUnitWindow) ++report.algebraic_one;
    }

    const std::size_t dim = 2 * gs.m * gs.n;
    report.geometric_one = dim - rank(gs.Q - Matrix::identity(dim), kRankTol);

    // Eigenvectors of eigenvalue 1 are col{u, ubar} with Abar u = 0, Lbar u = 0,
    // Lbar ubar = 0: u ranges over ker(A) lifted to consensus, ubar over
    // ker(Lbar), so the dimension is dim ker A + n * dim ker L.
    const StackedSystem sys = assemble(blocks);
    report.structural_one =
        nullspace(sys.A, 1e-9).size() + gs.n * nullspace(net.L, 1e-9).size();

    report.pass_unit_circle = report.max_magnitude <= 1.0 + tol;
    report.pass_minus_one = report.nearest_to_minus_one > kMinusOneMargin;
    report.pass_multiplicity = report.algebraic_one == report.geometric_one &&
                               report.geometric_one == report.structural_one;
    return report;
}

QuadraticPencil make_pencil(const GlobalSystem& gs) {
    const std::size_t mn = gs.m * gs.n;
    Matrix Kinv(mn, mn);
    for (std::size_t i = 0; i < mn; ++i) Kinv(i, i) = 1.0 / gs.Kbar(i, i);

    const double c = gs.hp.c;
    const double cbar = gs.hp.cbar;
    QuadraticPencil p;
    p.M2 = gs.Dbar * gs.Kbar * gs.Dbar + Kinv + c * gs.Dbar + cbar * gs.AtAbar;
    p.M1 = (-1.0) * (gs.Wbar * gs.Kbar * gs.Dbar + gs.Dbar * gs.Kbar * gs.Wbar) +
           (-2.0) * Kinv + (-c) * gs.Dbar + (-c) * gs.Wbar + (-cbar) * gs.AtAbar;
    p.M0 = gs.Wbar * gs.Kbar * gs.Wbar + Kinv + c * gs.Wbar;
    return p;
}

namespace {

struct ComplexVec {
    Vector re, im;
    std::size_t size() const { return re.size(); }
};

double cnorm(const ComplexVec& v) {
    return std::sqrt(dot(v.re, v.re) + dot(v.im, v.im));
}

ComplexVec apply(const Matrix& m, const ComplexVec& v) {
    return ComplexVec{m * v.re, m * v.im};
}

// v <- v + s * w for complex scalar s
void axpy(ComplexVec& v, Complex s, const ComplexVec& w) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Complex val =
            Complex(v.re[i], v.im[i]) + s * Complex(w.re[i], w.im[i]);
        v.re[i] = val.real();
        v.im[i] = val.imag();
    }
}

/// Eigenvector basis of Q for eigenvalue lambda. Real lambda: nullspace of
/// Q - lambda I. Complex lambda: nullspace of the doubled real embedding
/// [[Q - pI, qI], [-qI, Q - pI]] acting on col{Re u, Im u}.
std::vector<ComplexVec> eigenvectors_for(const Matrix& Q, Complex lambda) {
    const std::size_t dim = Q.rows();
    std::vector<ComplexVec> out;
    if (lambda.imag() == 0.0) {
        Matrix shifted = Q;
        for (std::size_t i = 0; i < dim; ++i) shifted(i, i) -= lambda.real();
        for (const Vector& v : nullspace(shifted, kEigvecTol))
            out.push_back(ComplexVec{v, Vector(dim, 0.0)});
        return out;
    }
    const double p = lambda.real(), q = lambda.imag();
    Matrix embed(2 * dim, 2 * dim);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            embed(i, j) = Q(i, j);
            embed(dim + i, dim + j) = Q(i, j);
        }
        embed(i, i) -= p;
        embed(dim + i, dim + i) -= p;
        embed(i, dim + i) = q;
        embed(dim + i, i) = -q;
    }
    for (const Vector& v : nullspace(embed, kEigvecTol)) {
        ComplexVec u;
        u.re.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(dim));
        u.im.assign(v.begin() + static_cast<std::ptrdiff_t>(dim), v.end());
        out.push_back(std::move(u));
    }
    return out;
}

std::string format_complex(Complex l) {
    std::ostringstream os;
    os << l.real() << (l.imag() >= 0 ? "+" : "") << l.imag() << "i";
    return os.str();
}

} // namespace

PencilReport pencil_check(const QuadraticPencil& pencil, const GlobalSystem& gs, double tol) {
    if (!(tol > 0)) throw Error(ErrorCode::invalid_argument, "tolerance must be positive");
    PencilReport report;

    report.min_eig_M2 = sym_eigenvalues(pencil.M2).front();
    report.min_eig_M0 = sym_eigenvalues(pencil.M0).front();
    const Matrix Mneg1 = pencil.M2 - pencil.M1 + pencil.M0;
    report.min_eig_M_minus_one = sym_eigenvalues(Mneg1).front();
    if (report.min_eig_M2 <= 0)
        report.violations.push_back("M2 not positive definite");
    if (report.min_eig_M0 <= 0)
        report.violations.push_back("M0 not positive definite");
    if (report.min_eig_M_minus_one <= 0)
        report.violations.push_back("M(-1) not positive definite");

    const std::size_t mn = gs.m * gs.n;

    // distinct eigenvalues, one representative per conjugate pair
    std::vector<Complex> eigs = gen_eigenvalues(gs.Q);
    std::vector<Complex> distinct;
    for (const Complex& l : eigs) {
        if (std::abs(l - 1.0) <= 10.0 * tol) continue; // unit eigenvalue: separate theory
        if (l.imag() < 0.0) continue;                  // conjugate handled with its partner
        bool seen = false;
        for (const Complex& d : distinct)
            if (std::abs(d - l) < 1e-8) seen = true;
        if (!seen) distinct.push_back(l);
    }

    const double f2 = frobenius_norm(pencil.M2);
    const double f1 = frobenius_norm(pencil.M1);
    const double f0 = frobenius_norm(pencil.M0);

    for (const Complex& lambda : distinct) {
        const Complex l2 = lambda * lambda;
        // coefficient bound on ||M(lambda)||; the assembled norm itself can
        // vanish at a root in the 1x1 case
        const double mnorm = std::abs(l2) * f2 + std::abs(lambda) * f1 + f0;

        for (const ComplexVec& y : eigenvectors_for(gs.Q, lambda)) {
            ComplexVec u{Vector(y.re.begin(), y.re.begin() + static_cast<std::ptrdiff_t>(mn)),
                         Vector(y.im.begin(), y.im.begin() + static_cast<std::ptrdiff_t>(mn))};
            ComplexVec ubar{Vector(y.re.begin() + static_cast<std::ptrdiff_t>(mn), y.re.end()),
                            Vector(y.im.begin() + static_cast<std::ptrdiff_t>(mn), y.im.end())};
            const double unorm = cnorm(u);
            if (unorm < 1e-12) {
                report.violations.push_back("eigenvector at lambda=" + format_complex(lambda) +
                                            " has vanishing u component");
                continue;
            }

            // M(lambda) u = lambda^2 M2 u + lambda M1 u + M0 u
            ComplexVec residual = apply(pencil.M0, u);
            axpy(residual, lambda, apply(pencil.M1, u));
            axpy(residual, l2, apply(pencil.M2, u));
            const double rel = cnorm(residual) / (unorm * std::max(mnorm, 1e-300));
            report.max_pencil_residual = std::max(report.max_pencil_residual, rel);
            if (rel > tol)
                report.violations.push_back("pencil residual " + std::to_string(rel) +
                                            " at lambda=" + format_complex(lambda));

            // ubar = (1/(lambda-1)) Kbar (lambda Dbar - Wbar) u
            ComplexVec recon = apply(gs.Kbar * gs.Dbar, u);
            ComplexVec wterm = apply(gs.Kbar * gs.Wbar, u);
            ComplexVec rhs{Vector(mn, 0.0), Vector(mn, 0.0)};
            axpy(rhs, lambda / (lambda - 1.0), recon);
            axpy(rhs, -1.0 / (lambda - 1.0), wterm);
            axpy(rhs, -1.0, ubar);
            const double rec = cnorm(rhs) / std::max(cnorm(ubar), unorm);
            report.max_reconstruction_error = std::max(report.max_reconstruction_error, rec);
            if (rec > tol)
                report.violations.push_back("ubar reconstruction error " + std::to_string(rec) +
                                            " at lambda=" + format_complex(lambda));
            ++report.eigenpairs_checked;
        }
    }
    return report;
}

EquilibriumResidual equilibrium_residual(const GlobalSystem& gs, const Vector& x,
                                         const Vector& z) {
    const std::size_t mn = gs.m * gs.n;
    if (x.size() != mn || z.size() != mn)
        throw Error(ErrorCode::dimension_mismatch, "stacked state has wrong dimension");

    EquilibriumResidual res;
    const Vector grad = gs.AtAbar * x - transpose(gs.Abar) * gs.b;
    res.r1 = norm2(gs.hp.cbar * grad + gs.Lbar * z);
    res.r2 = norm2(gs.Lbar * x);

    Vector y(2 * mn);
    for (std::size_t i = 0; i < mn; ++i) {
        y[i] = x[i];
        y[mn + i] = z[i];
    }
    const Vector qy = gs.Q * y;
    Vector fp(2 * mn);
    for (std::size_t i = 0; i < 2 * mn; ++i) fp[i] = y[i] - qy[i] - gs.offset[i];
    res.fixed_point = norm2(fp);
    return res;
}

double lagrangian_value(const Vector& x, const Vector& z, const std::vector<LocalData>& blocks,
                        const NetworkModel& net, const Hyperparams& hp) {
    validate(hp);
    const StackedSystem sys = assemble(blocks);
    const std::size_t mn = sys.m * sys.n;
    if (x.size() != mn || z.size() != mn)
        throw Error(ErrorCode::dimension_mismatch, "stacked state has wrong dimension");
    const Vector r = sys.Abar * x - sys.b;
    const Vector Lx = kron(net.L, Matrix::identity(sys.n)) * x;
    return 0.5 * hp.cbar * dot(r, r) + dot(z, Lx);
}

} // namespace lsqnet
