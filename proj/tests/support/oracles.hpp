#pragma once

// Reference computations used only by the tests. Nothing here calls into the
// library's factorization kernels: the SVD is a one-sided Jacobi iteration and
// the pseudoinverse is built from it.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

struct Svd
{
    Matrix U;  // m x k
    Vector s;  // k, descending
    Matrix V;  // n x k
};

// One-sided Jacobi (Hestenes) on the columns of M, m >= n assumed; wide
// matrices go through the transpose.
inline Svd jacobi_svd(const Matrix& M)
{
    if (M.rows() < M.cols()) {
        Svd t = jacobi_svd(M.transpose());
        return {t.V, t.s, t.U};
    }
    const Index m = M.rows();
    const Index n = M.cols();
    Matrix X = M;
    Matrix V = Matrix::Identity(n, n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Index i = 0; i < n - 1; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                const double a = X.col(i).squaredNorm();
                const double b = X.col(j).squaredNorm();
                const double c = X.col(i).dot(X.col(j));
                if (c == 0.0 || std::abs(c) <= 1e-17 * std::sqrt(a * b))
                    continue;
                off = std::max(off, std::abs(c) / std::sqrt(a * b));
                const double zeta = (b - a) / (2.0 * c);
                const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                for (Index k = 0; k < m; ++k) {
                    const double xi = X(k, i), xj = X(k, j);
                    X(k, i) = cs * xi - sn * xj;
                    X(k, j) = sn * xi + cs * xj;
                }
                for (Index k = 0; k < n; ++k) {
                    const double vi = V(k, i), vj = V(k, j);
                    V(k, i) = cs * vi - sn * vj;
                    V(k, j) = sn * vi + cs * vj;
                }
            }
        }
        if (off < 1e-15)
            break;
    }
    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        order[static_cast<std::size_t>(i)] = i;
    Vector norms(n);
    for (Index i = 0; i < n; ++i)
        norms(i) = X.col(i).norm();
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return norms(a) > norms(b); });

    Svd out{Matrix::Zero(m, n), Vector(n), Matrix(n, n)};
    for (Index k = 0; k < n; ++k) {
        const Index j = order[static_cast<std::size_t>(k)];
        out.s(k) = norms(j);
        out.V.col(k) = V.col(j);
        if (norms(j) > 0.0)
            out.U.col(k) = X.col(j) / norms(j);
    }
    return out;
}

/// Singular values at or below rtol * max(s_max, ref) are treated as zero;
/// ref lets a product be judged against the size of its factors.
inline Matrix pinv(const Matrix& M, double rtol = 1e-12, double ref = 0.0)
{
    const Svd f = jacobi_svd(M);
    const double cut = f.s.size() ? rtol * std::max(f.s(0), ref) : 0.0;
    Matrix P = Matrix::Zero(M.cols(), M.rows());
    for (Index k = 0; k < f.s.size(); ++k)
        if (f.s(k) > cut)
            P += f.V.col(k) * f.U.col(k).transpose() / f.s(k);
    return P;
}

inline Index rank(const Matrix& M, double rtol = 1e-10)
{
    const Svd f = jacobi_svd(M);
    if (f.s.size() == 0 || f.s(0) == 0.0)
        return 0;
    return static_cast<Index>((f.s.array() > rtol * f.s(0)).count());
}

/// Minimum-norm minimizer of |A x - b|^2 + mu^2 |L x|^2 for mu > 0.
inline Vector stacked_min_norm(const Matrix& A, const Matrix& L, const Vector& b, double mu)
{
    Matrix S(A.rows() + L.rows(), A.cols());
    S << A, mu * L;
    Vector rhs = Vector::Zero(S.rows());
    rhs.head(A.rows()) = b;
    return pinv(S) * rhs;
}

/// mu = 0 limit: among least-squares solutions of A x = b, the minimizer of
/// |L x|, and of those the one of minimum norm. x0 = A^+ b is orthogonal to
/// N(A) and the pseudoinverse picks the minimum-norm t, so x0 + N t is the
/// minimum-norm member.
inline Vector min_seminorm_least_squares(const Matrix& A, const Matrix& L, const Vector& b)
{
    const Index n = A.cols();
    Matrix padded = Matrix::Zero(std::max(A.rows(), n), n);
    padded.topRows(A.rows()) = A;
    const Svd f = jacobi_svd(padded);
    const double cut = f.s(0) * 1e-12;
    const Index r = static_cast<Index>((f.s.array() > cut).count());
    const Vector x0 = pinv(A) * b;
    if (r == n)
        return x0;
    const Matrix N = f.V.rightCols(n - r);
    return x0 + N * (pinv(L * N, 1e-12, L.norm()) * (-L * x0));
}

/// (A^T A + mu^2 L^T L) x = A^T b by full-pivot LU.
inline Vector normal_equations(const Matrix& A, const Matrix& L, const Vector& b, double mu)
{
    const Matrix N = A.transpose() * A + mu * mu * L.transpose() * L;
    return N.fullPivLu().solve(A.transpose() * b);
}

inline double rel(const Vector& x, const Vector& ref)
{
    const double d = ref.norm();
    return d > 0 ? (x - ref).norm() / d : (x - ref).norm();
}

inline double rel(const Matrix& X, const Matrix& ref)
{
    const double d = ref.norm();
    return d > 0 ? (X - ref).norm() / d : (X - ref).norm();
}

// Test-side random matrices; independent of the library's generator.
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double normal() { return dist_(eng_); }
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng_); }
    Index integer(Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(eng_); }

    Matrix gaussian(Index r, Index c)
    {
        Matrix M(r, c);
        for (Index j = 0; j < c; ++j)
            for (Index i = 0; i < r; ++i)
                M(i, j) = normal();
        return M;
    }
    Vector gaussian(Index r) { return gaussian(r, 1).col(0); }

    Matrix orthonormal(Index r, Index c)
    {
        Eigen::HouseholderQR<Matrix> qr(gaussian(r, c));
        return qr.householderQ() * Matrix::Identity(r, c);
    }

    /// m x n with prescribed singular values (length <= min(m, n)).
    Matrix with_singular_values(Index m, Index n, const Vector& s)
    {
        const Index k = s.size();
        return orthonormal(m, k) * s.asDiagonal() * orthonormal(n, k).transpose();
    }

    /// Product of random factors, rank <= r.
    Matrix low_rank(Index m, Index n, Index r) { return gaussian(m, r) * gaussian(r, n); }

private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> dist_;
};

inline Matrix d1(Index n)
{
    Matrix L = Matrix::Zero(n - 1, n);
    for (Index i = 0; i < n - 1; ++i) {
        L(i, i) = 1;
        L(i, i + 1) = -1;
    }
    return L;
}

inline Matrix d2(Index n)
{
    Matrix L = Matrix::Zero(n - 2, n);
    for (Index i = 0; i < n - 2; ++i) {
        L(i, i) = 1;
        L(i, i + 1) = -2;
        L(i, i + 2) = 1;
    }
    return L;
}

inline double orthonormality_defect(const Matrix& Q)
{
    if (Q.cols() == 0)
        return 0.0;
    return (Q.transpose() * Q - Matrix::Identity(Q.cols(), Q.cols())).cwiseAbs().maxCoeff();
}

/// Orthonormality defect over the nonzero columns only.
inline double orthonormality_defect_nonzero(const Matrix& Q)
{
    std::vector<Index> keep;
    for (Index j = 0; j < Q.cols(); ++j)
        if (Q.col(j).norm() > 0.5)
            keep.push_back(j);
    Matrix S(Q.rows(), static_cast<Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k)
        S.col(static_cast<Index>(k)) = Q.col(keep[k]);
    return orthonormality_defect(S);
}

} // namespace oracle
