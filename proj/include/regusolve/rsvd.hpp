#pragma once

// Randomized SVD and the spectral solvers for standard-form Tikhonov / TSVD.

#include "regusolve/matcore.hpp"
#include "regusolve/random.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace regusolve {

struct SketchConfig
{
    Index sample_size = 50;       // l
    std::uint64_t seed = 0;
    Index power_iterations = 0;   // 0 reproduces the plain sketch
};

namespace detail {

inline Matrix orthonormal_basis(const Matrix& Y)
{
    Eigen::HouseholderQR<Matrix> qr(Y);
    return thin_q(qr, Y.cols());
}

} // namespace detail

/// Rank-l approximate SVD K ~ U diag(s) V^T from a Gaussian sketch.
///
/// For m <= n the sketch acts on the left: Y = Omega K (l x n), Q = qr(Y^T),
/// B = K Q, B = U S H^T and V = Q H. For m > n the mirrored sketch Y = K Omega
/// is used. Each power iteration re-orthonormalizes before applying K and K^T.
inline SvdFactorization rsvd(const Matrix& K, const SketchConfig& cfg)
{
    detail::require_nonempty(K, "rsvd");
    const Index m = K.rows();
    const Index n = K.cols();
    const Index l = cfg.sample_size;
    if (l < 1 || l > std::min(m, n))
        throw std::invalid_argument("rsvd: sample size l = " + std::to_string(l) + " must lie in [1, "
                                    + std::to_string(std::min(m, n)) + "] for a " + detail::shape(m, n) + " matrix");
    detail::require_finite(K, "rsvd");

    SvdFactorization f;
    if (m <= n) {
        const Matrix Omega = gaussian_matrix(l, m, cfg.seed, RandomStream::sketch);
        Matrix Q = detail::orthonormal_basis((Omega * K).transpose());  // n x l
        for (Index it = 0; it < cfg.power_iterations; ++it) {
            const Matrix P = detail::orthonormal_basis(K * Q);          // m x l
            Q = detail::orthonormal_basis(K.transpose() * P);
        }
        const Matrix B = K * Q;                                          // m x l
        const SvdFactorization small = svd(B);
        f.U = small.U;
        f.singular_values = small.singular_values;
        f.V = Q * small.V;
    } else {
        const Matrix Omega = gaussian_matrix(n, l, cfg.seed, RandomStream::sketch);
        Matrix Q = detail::orthonormal_basis(K * Omega);                 // m x l
        for (Index it = 0; it < cfg.power_iterations; ++it) {
            const Matrix P = detail::orthonormal_basis(K.transpose() * Q);
            Q = detail::orthonormal_basis(K * P);
        }
        const Matrix B = Q.transpose() * K;                              // l x n
        const SvdFactorization small = svd(B);
        f.U = Q * small.U;
        f.singular_values = small.singular_values;
        f.V = small.V;
    }
    normalize_signs(f);
    return f;
}

/// y = sum_i s_i^2 / (s_i^2 + mu^2) * (u_i^T b / s_i) v_i, skipping numerically zero s_i.
inline Vector tikhonov_filtered(const SvdFactorization& f, const Vector& b, double mu)
{
    if (b.size() != f.rows())
        throw std::invalid_argument("tikhonov_filtered: b has length " + std::to_string(b.size()) + ", expected "
                                    + std::to_string(f.rows()));
    if (!(mu >= 0.0))
        throw std::invalid_argument("tikhonov_filtered: mu must be nonnegative");

    const double tol = f.tolerance();
    const Vector beta = f.U.transpose() * b;
    Vector coef = Vector::Zero(f.size());
    for (Index i = 0; i < f.size(); ++i) {
        const double s = f.singular_values(i);
        if (s <= tol)
            continue;
        coef(i) = s * beta(i) / (s * s + mu * mu);
    }
    return f.V * coef;
}

/// x_k = sum_{i <= k} (u_i^T b / s_i) v_i.
inline Vector tsvd_solve(const SvdFactorization& f, const Vector& b, Index k)
{
    if (b.size() != f.rows())
        throw std::invalid_argument("tsvd_solve: b has length " + std::to_string(b.size()) + ", expected "
                                    + std::to_string(f.rows()));
    const Index r = f.rank();
    if (k < 1 || k > r)
        throw std::invalid_argument("tsvd_solve: truncation k = " + std::to_string(k) + " outside [1, "
                                    + std::to_string(r) + "]");
    const Vector beta = f.U.leftCols(k).transpose() * b;
    return f.V.leftCols(k) * beta.cwiseQuotient(f.singular_values.head(k));
}

} // namespace regusolve
