#include "lsqnet/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lsqnet/error.hpp"

namespace lsqnet {

namespace {

void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) throw Error(code, what);
}

constexpr double kPivotRelTol = 1e-13;

} // namespace

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(const Vector& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        require(row.size() == c, ErrorCode::dimension_mismatch, "ragged initializer rows");
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

Matrix Matrix::column(const Vector& v) {
    Matrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return m;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::dimension_mismatch,
            "matrix addition shape mismatch");
    Matrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
    return r;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::dimension_mismatch,
            "matrix subtraction shape mismatch");
    Matrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) - b(i, j);
    return r;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.rows(), ErrorCode::dimension_mismatch,
            "matrix product inner dimension mismatch");
    Matrix r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
        }
    }
    return r;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = s * a(i, j);
    return r;
}

Vector operator*(const Matrix& a, const Vector& v) {
    require(a.cols() == v.size(), ErrorCode::dimension_mismatch,
            "matrix-vector dimension mismatch");
    Vector r(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

Matrix transpose(const Matrix& a) {
    Matrix r(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(j, i) = a(i, j);
    return r;
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (double v : a.data()) m = std::max(m, std::fabs(v));
    return m;
}

double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    return std::sqrt(s);
}

double dot(const Vector& a, const Vector& b) {
    require(a.size() == b.size(), ErrorCode::dimension_mismatch, "dot dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

double max_abs(const Vector& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

Vector operator+(const Vector& a, const Vector& b) {
    require(a.size() == b.size(), ErrorCode::dimension_mismatch, "vector sum mismatch");
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Vector operator-(const Vector& a, const Vector& b) {
    require(a.size() == b.size(), ErrorCode::dimension_mismatch, "vector difference mismatch");
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Vector operator*(double s, const Vector& v) {
    Vector r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = s * v[i];
    return r;
}

// ---------------------------------------------------------------------------
// LU with partial pivoting
// ---------------------------------------------------------------------------

LuFactorization::LuFactorization(const Matrix& m) : lu_(m), perm_(m.rows()) {
    require(m.rows() == m.cols(), ErrorCode::dimension_mismatch, "LU needs a square matrix");
    const std::size_t n = m.rows();
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    const double pivot_floor = kPivotRelTol * max_abs(m);

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(lu_(i, k)) > std::fabs(lu_(p, k))) p = i;
        if (std::fabs(lu_(p, k)) <= pivot_floor)
            throw Error(ErrorCode::singular_matrix,
                        "singular matrix: pivot " + std::to_string(k) + " below tolerance");
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu_(p, j), lu_(k, j));
            std::swap(perm_[p], perm_[k]);
            perm_sign_ = -perm_sign_;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            lu_(i, k) /= lu_(k, k);
            const double f = lu_(i, k);
            if (f == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
        }
    }
}

Vector LuFactorization::solve(const Vector& rhs) const {
    const std::size_t n = lu_.rows();
    require(rhs.size() == n, ErrorCode::dimension_mismatch, "LU solve rhs size mismatch");
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rhs[perm_[i]];
    for (std::size_t i = 1; i < n; ++i) {
        double s = x[i];
        for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= lu_(ii, j) * x[j];
        x[ii] = s / lu_(ii, ii);
    }
    return x;
}

Matrix LuFactorization::solve(const Matrix& rhs) const {
    require(rhs.rows() == lu_.rows(), ErrorCode::dimension_mismatch,
            "LU solve rhs rows mismatch");
    Matrix x(rhs.rows(), rhs.cols());
    Vector col(rhs.rows());
    for (std::size_t j = 0; j < rhs.cols(); ++j) {
        for (std::size_t i = 0; i < rhs.rows(); ++i) col[i] = rhs(i, j);
        Vector sol = solve(col);
        for (std::size_t i = 0; i < rhs.rows(); ++i) x(i, j) = sol[i];
    }
    return x;
}

double LuFactorization::determinant() const {
    double det = perm_sign_;
    for (std::size_t i = 0; i < lu_.rows(); ++i) det *= lu_(i, i);
    return det;
}

Matrix lu_solve(const Matrix& m, const Matrix& rhs) { return LuFactorization(m).solve(rhs); }
Vector lu_solve(const Matrix& m, const Vector& rhs) { return LuFactorization(m).solve(rhs); }

// ---------------------------------------------------------------------------
// Symmetric eigenproblem: cyclic Jacobi
// ---------------------------------------------------------------------------

namespace {

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

} // namespace

SymmetricEigen sym_eigen(const Matrix& s) {
    require(s.rows() == s.cols(), ErrorCode::dimension_mismatch,
            "symmetric eigensolver needs a square matrix");
    const std::size_t n = s.rows();
    const double scale = max_abs(s);
    double asym = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            asym = std::max(asym, std::fabs(s(i, j) - s(j, i)));
    require(asym <= 1e-9 * std::max(scale, 1e-300), ErrorCode::non_symmetric,
            "matrix is not symmetric within tolerance");

    Matrix a = s;
    Matrix v = Matrix::identity(n);
    const double target = 1e-12 * (1.0 + frobenius_norm(s));
    const int max_sweeps = 64;

    int sweep = 0;
    while (off_diagonal_norm(a) > target) {
        if (++sweep > max_sweeps)
            throw Error(ErrorCode::eigen_non_convergence, "Jacobi sweeps exhausted");
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    SymmetricEigen out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
    }
    return out;
}

Vector sym_eigenvalues(const Matrix& s) { return sym_eigen(s).eigenvalues; }

// ---------------------------------------------------------------------------
// General eigenvalues: balance + Hessenberg + Francis double-shift QR
// ---------------------------------------------------------------------------

namespace {

// Parlett-Reinsch balancing (radix-2 diagonal similarity); eigenvalues unchanged.
void balance(Matrix& a) {
    const std::size_t n = a.rows();
    const double radix = 2.0, sq = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::fabs(a(j, i));
                r += std::fabs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            const double s = c + r;
            double f = 1.0, g = r / radix;
            while (c < g) { f *= radix; c *= sq; }
            g = r * radix;
            while (c > g) { f /= radix; c /= sq; }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                const double ginv = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= ginv;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

// Householder similarity reduction to upper Hessenberg form.
void to_hessenberg(Matrix& a) {
    const std::size_t n = a.rows();
    if (n < 3) return;
    Vector v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) xnorm += a(i, k) * a(i, k);
        xnorm = std::sqrt(xnorm);
        if (xnorm == 0.0) continue;
        const double alpha = a(k + 1, k) >= 0 ? -xnorm : xnorm;
        double vnorm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            v[i] = a(i, k);
            if (i == k + 1) v[i] -= alpha;
            vnorm2 += v[i] * v[i];
        }
        if (vnorm2 == 0.0) continue;
        const double beta = 2.0 / vnorm2;
        // left: A <- (I - beta v v') A on rows k+1..n-1
        for (std::size_t j = k; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) s += v[i] * a(i, j);
            s *= beta;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
        }
        // right: A <- A (I - beta v v') on cols k+1..n-1
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
            s *= beta;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * v[j];
        }
        a(k + 1, k) = alpha;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
}

// Eigenvalues of the trailing/leading 2x2 block [[a,b],[c,d]], stably.
void block2x2_eigenvalues(double a, double b, double c, double d, Complex& l1, Complex& l2) {
    const double tr2 = 0.5 * (a + d);
    const double det = a * d - b * c;
    const double disc = tr2 * tr2 - det;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        double big = tr2 + (tr2 >= 0 ? root : -root);
        if (big == 0.0) {
            l1 = Complex(0.0, 0.0);
            l2 = Complex(0.0, 0.0);
        } else {
            l1 = Complex(big, 0.0);
            l2 = Complex(det / big, 0.0);
        }
    } else {
        const double im = std::sqrt(-disc);
        l1 = Complex(tr2, im);
        l2 = Complex(tr2, -im);
    }
}

// Francis double-shift QR on a Hessenberg matrix. Destroys h.
std::vector<Complex> hessenberg_qr(Matrix& h) {
    const std::size_t n = h.rows();
    std::vector<Complex> eig;
    eig.reserve(n);
    if (n == 0) return eig;

    const double eps = std::numeric_limits<double>::epsilon();
    double anorm = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = (i > 0 ? i - 1 : 0); j < n; ++j) anorm += std::fabs(h(i, j));
    if (anorm == 0.0) anorm = 1.0;

    const long iter_cap = static_cast<long>(10) * static_cast<long>(n) * static_cast<long>(n);
    long total_iters = 0;
    double shift_accum = 0.0; // exceptional-shift diagonal offset, restored on output

    long hi = static_cast<long>(n) - 1;
    int its = 0;
    while (hi >= 0) {
        // find the active block [lo..hi]: split at negligible subdiagonals
        long lo = hi;
        while (lo > 0) {
            double s = std::fabs(h(lo - 1, lo - 1)) + std::fabs(h(lo, lo));
            if (s == 0.0) s = anorm;
            if (std::fabs(h(lo, lo - 1)) <= eps * s) {
                h(lo, lo - 1) = 0.0;
                break;
            }
            --lo;
        }

        if (lo == hi) {
            eig.emplace_back(h(hi, hi) + shift_accum, 0.0);
            --hi;
            its = 0;
            continue;
        }
        if (lo == hi - 1) {
            Complex l1, l2;
            block2x2_eigenvalues(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi),
                                 l1, l2);
            eig.push_back(l1 + shift_accum);
            eig.push_back(l2 + shift_accum);
            hi -= 2;
            its = 0;
            continue;
        }

        if (++total_iters > iter_cap)
            throw Error(ErrorCode::eigen_non_convergence,
                        "QR iteration cap exceeded (10 n^2 sweeps)");

        double x = h(hi, hi);
        double y = h(hi - 1, hi - 1);
        double w = h(hi, hi - 1) * h(hi - 1, hi);
        if (its == 10 || its == 20 || its == 30) {
            // exceptional shift to break symmetric stalls
            shift_accum += x;
            for (long i = 0; i <= hi; ++i) h(i, i) -= x;
            const double s = std::fabs(h(hi, hi - 1)) + std::fabs(h(hi - 1, hi - 2));
            x = y = 0.75 * s;
            w = -0.4375 * s * s;
        }
        if (its >= 45)
            throw Error(ErrorCode::eigen_non_convergence,
                        "QR failed to deflate an eigenvalue block");
        ++its;

        // first column of (H - aI)(H - bI) with a+b, ab from the trailing 2x2
        double p = 0.0, q = 0.0, r = 0.0;
        long m = hi - 2;
        for (; m >= lo; --m) {
            const double z = h(m, m);
            const double rr = x - z;
            const double ss = y - z;
            p = (rr * ss - w) / h(m + 1, m) + h(m, m + 1);
            q = h(m + 1, m + 1) - z - rr - ss;
            r = h(m + 2, m + 1);
            const double s = std::fabs(p) + std::fabs(q) + std::fabs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == lo) break;
            const double u = std::fabs(h(m, m - 1)) * (std::fabs(q) + std::fabs(r));
            const double v = std::fabs(p) * (std::fabs(h(m - 1, m - 1)) + std::fabs(z) +
                                             std::fabs(h(m + 1, m + 1)));
            if (u <= eps * v) break;
        }
        for (long i = m + 2; i <= hi; ++i) {
            h(i, i - 2) = 0.0;
            if (i != m + 2) h(i, i - 3) = 0.0;
        }

        // bulge chase
        for (long k = m; k <= hi - 1; ++k) {
            if (k != m) {
                p = h(k, k - 1);
                q = h(k + 1, k - 1);
                r = (k != hi - 1) ? h(k + 2, k - 1) : 0.0;
                x = std::fabs(p) + std::fabs(q) + std::fabs(r);
                if (x != 0.0) {
                    p /= x;
                    q /= x;
                    r /= x;
                }
            }
            double s = std::sqrt(p * p + q * q + r * r);
            if (p < 0) s = -s;
            if (s == 0.0) continue;
            if (k == m) {
                if (lo != m) h(k, k - 1) = -h(k, k - 1);
            } else {
                h(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            double z = r / s;
            q /= p;
            r /= p;
            for (long j = k; j <= hi; ++j) {
                double pp = h(k, j) + q * h(k + 1, j);
                if (k != hi - 1) {
                    pp += r * h(k + 2, j);
                    h(k + 2, j) -= pp * z;
                }
                h(k + 1, j) -= pp * y;
                h(k, j) -= pp * x;
            }
            const long mmin = std::min(hi, k + 3);
            for (long i = lo; i <= mmin; ++i) {
                double pp = x * h(i, k) + y * h(i, k + 1);
                if (k != hi - 1) {
                    pp += z * h(i, k + 2);
                    h(i, k + 2) -= pp * r;
                }
                h(i, k + 1) -= pp * q;
                h(i, k) -= pp;
            }
        }
    }
    return eig;
}

} // namespace

std::vector<Complex> gen_eigenvalues(const Matrix& m) {
    require(m.rows() == m.cols(), ErrorCode::dimension_mismatch,
            "general eigensolver needs a square matrix");
    if (m.rows() == 0) return {};
    Matrix h = m;
    balance(h);
    to_hessenberg(h);
    return hessenberg_qr(h);
}

// ---------------------------------------------------------------------------
// Rank and nullspace
// ---------------------------------------------------------------------------

std::size_t rank(const Matrix& m, double tol) {
    require(tol > 0, ErrorCode::invalid_argument, "rank tolerance must be positive");
    Matrix a = m;
    const std::size_t r = a.rows(), c = a.cols();
    const double floor = tol * max_abs(m);
    std::size_t rk = 0;
    std::size_t row = 0;
    std::vector<std::size_t> cols(c);
    std::iota(cols.begin(), cols.end(), std::size_t{0});

    for (std::size_t k = 0; row < r && k < c; ++k) {
        // full pivoting over the remaining submatrix
        std::size_t pi = row, pj = k;
        double best = 0.0;
        for (std::size_t i = row; i < r; ++i)
            for (std::size_t j = k; j < c; ++j)
                if (std::fabs(a(i, cols[j])) > best) {
                    best = std::fabs(a(i, cols[j]));
                    pi = i;
                    pj = j;
                }
        if (best <= floor) break;
        if (pi != row)
            for (std::size_t j = 0; j < c; ++j) std::swap(a(pi, j), a(row, j));
        std::swap(cols[pj], cols[k]);
        const double piv = a(row, cols[k]);
        for (std::size_t i = row + 1; i < r; ++i) {
            const double f = a(i, cols[k]) / piv;
            if (f == 0.0) continue;
            for (std::size_t j = k; j < c; ++j) a(i, cols[j]) -= f * a(row, cols[j]);
        }
        ++rk;
        ++row;
    }
    return rk;
}

std::vector<Vector> nullspace(const Matrix& m, double tol) {
    require(tol > 0, ErrorCode::invalid_argument, "nullspace tolerance must be positive");
    const std::size_t c = m.cols();
    const std::size_t r = rank(m, tol);
    const std::size_t dim = c - r;
    if (dim == 0) return {};
    // The dim smallest eigenpairs of M'M give an orthonormal basis with
    // ||Mv|| = sqrt(eigenvalue); rank() fixes the dimension.
    SymmetricEigen eig = sym_eigen(transpose(m) * m);
    std::vector<Vector> basis;
    basis.reserve(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        Vector v(c);
        for (std::size_t i = 0; i < c; ++i) v[i] = eig.eigenvectors(i, k);
        basis.push_back(std::move(v));
    }
    return basis;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix r(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double aij = a(i, j);
            if (aij == 0.0) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    r(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return r;
}

} // namespace lsqnet
