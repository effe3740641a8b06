#ifndef LSQNET_MATRIX_HPP
#define LSQNET_MATRIX_HPP

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace lsqnet {

using Vector = std::vector<double>;
using Complex = std::complex<double>;

/// Dense real matrix, row-major, double precision. Desk scale (n up to a few
/// hundred); all operations on it are pure functions returning new values.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    static Matrix identity(std::size_t n);
    static Matrix diagonal(const Vector& d);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix column(const Vector& v);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Vector operator*(const Matrix& a, const Vector& v);

Matrix transpose(const Matrix& a);
double max_abs(const Matrix& a);
double frobenius_norm(const Matrix& a);

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& v);
double max_abs(const Vector& v);
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& v);

/// LU factorization with partial pivoting, reusable across right-hand sides.
/// Throws Error{singular_matrix} when a pivot falls below 1e-13 * max|entry|.
class LuFactorization {
public:
    explicit LuFactorization(const Matrix& m);

    Vector solve(const Vector& rhs) const;
    Matrix solve(const Matrix& rhs) const;
    double determinant() const;

private:
    Matrix lu_;
    std::vector<std::size_t> perm_;
    int perm_sign_ = 1;
};

/// Solves M X = rhs by LU with partial pivoting.
Matrix lu_solve(const Matrix& m, const Matrix& rhs);
Vector lu_solve(const Matrix& m, const Vector& rhs);

struct SymmetricEigen {
    Vector eigenvalues;   // ascending
    Matrix eigenvectors;  // column k pairs with eigenvalues[k]; orthonormal
};

/// Cyclic Jacobi rotations; input must satisfy |S - S'|_max <= 1e-9 * |S|_max.
SymmetricEigen sym_eigen(const Matrix& s);
Vector sym_eigenvalues(const Matrix& s);

/// All n eigenvalues of a general square real matrix: balancing, Householder
/// reduction to Hessenberg form, then Francis double-shift QR iterations.
std::vector<Complex> gen_eigenvalues(const Matrix& m);

/// Numerical rank by Gaussian elimination with full pivoting; pivots below
/// tol * max|entry of m| count as zero.
std::size_t rank(const Matrix& m, double tol = 1e-9);

/// Orthonormal basis of {v : ||Mv|| <= tol * ||M|| * ||v||}, of dimension
/// cols - rank(m, tol). Derived from the small eigenpairs of M'M.
std::vector<Vector> nullspace(const Matrix& m, double tol = 1e-9);

Matrix kron(const Matrix& a, const Matrix& b);

} // namespace lsqnet

#endif
