#pragma once

// General-form solvers on top of the GSVD: Tikhonov, truncated GSVD and the
// randomized variant that restricts the pair (A, L) to a sketched right
// subspace before factorizing.

#include "regusolve/matcore.hpp"
#include "regusolve/rsvd.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace regusolve {

/// x_mu = sum_i c_i / (c_i^2 + mu^2 s_i^2) (u_i^T b) g_i.
/// Indices with c_i = 0 are skipped; the s_i = 0 block gets filter value 1.
inline Vector cgsvd_tikhonov(const GsvdFactorization& f, const Vector& b, double mu)
{
    if (b.size() != f.rows_a())
        throw std::invalid_argument("cgsvd_tikhonov: b has length " + std::to_string(b.size()) + ", expected "
                                    + std::to_string(f.rows_a()));
    if (!(mu >= 0.0))
        throw std::invalid_argument("cgsvd_tikhonov: mu must be nonnegative");

    const Vector beta = f.U.transpose() * b;
    Vector coef = Vector::Zero(f.size());
    for (Index i = 0; i < f.size(); ++i) {
        const double c = f.c(i);
        if (c == 0.0)
            continue;
        const double s = f.s(i);
        coef(i) = c * beta(i) / (c * c + mu * mu * s * s);
    }
    return f.G * coef;
}

/// Keeps the k largest generalized singular values of the regularized block
/// plus the whole unregularized block.
inline Vector tgsvd_solve(const GsvdFactorization& f, const Vector& b, Index k)
{
    if (b.size() != f.rows_a())
        throw std::invalid_argument("tgsvd_solve: b has length " + std::to_string(b.size()) + ", expected "
                                    + std::to_string(f.rows_a()));
    const Index p = f.regularized_count();
    if (k < 1 || k > p)
        throw std::invalid_argument("tgsvd_solve: truncation k = " + std::to_string(k) + " outside [1, "
                                    + std::to_string(p) + "]");

    const Vector beta = f.U.transpose() * b;
    Vector coef = Vector::Zero(f.size());
    for (Index i = p - k; i < f.size(); ++i)
        if (f.c(i) != 0.0)
            coef(i) = beta(i) / f.c(i);
    return f.G * coef;
}

struct RgsvdFactors
{
    Matrix basis;       // V1~, n x (l + augmentations), orthonormal columns
    GsvdFactorization inner;  // GSVD of (A V1~, L V1~)
    Index skipped_augmentations = 0;
};

/// Sketches the right singular subspace of A, optionally appends the parts of
/// `augment` orthogonal to it, and factorizes the reduced pair.
/// Augmentation vectors already inside the sketched span (|w| <= 1e-10 |e|)
/// are skipped and counted.
inline RgsvdFactors rgsvd(const Matrix& A, const Matrix& L, const SketchConfig& cfg,
                          const std::vector<Vector>& augment = {})
{
    if (A.cols() != L.cols())
        throw std::invalid_argument("rgsvd: A is " + detail::shape(A.rows(), A.cols()) + " but L is "
                                    + detail::shape(L.rows(), L.cols()));
    const Index n = A.cols();
    for (const auto& e : augment)
        if (e.size() != n)
            throw std::invalid_argument("rgsvd: augmentation vector has length " + std::to_string(e.size())
                                        + ", expected " + std::to_string(n));

    RgsvdFactors out;
    Matrix basis = rsvd(A, cfg).V;
    for (const auto& e : augment) {
        const double enorm = e.norm();
        Vector w = e;
        for (int pass = 0; pass < 2; ++pass)
            w -= basis * (basis.transpose() * w);
        const double wn = w.norm();
        if (enorm == 0.0 || wn <= 1e-10 * enorm) {
            ++out.skipped_augmentations;
            continue;
        }
        basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
        basis.col(basis.cols() - 1) = w / wn;
    }
    out.inner = gsvd(A * basis, L * basis);
    out.basis = std::move(basis);
    return out;
}

/// x = V1~ x^, x^ the Tikhonov solution of the reduced pair.
inline Vector rgsvd_tikhonov(const RgsvdFactors& f, const Vector& b, double mu)
{
    return f.basis * cgsvd_tikhonov(f.inner, b, mu);
}

inline Vector rgsvd_tgsvd(const RgsvdFactors& f, const Vector& b, Index k)
{
    return f.basis * tgsvd_solve(f.inner, b, k);
}

struct RegularizedSolution
{
    Vector x;
    double mu = 0.0;
    std::optional<Index> truncation;
    std::optional<double> rel_err;
    double elapsed = 0.0;  // seconds
};

inline double relative_error(const Vector& x, const Vector& x_exact)
{
    if (x.size() != x_exact.size())
        throw std::invalid_argument("relative_error: length mismatch");
    const double ref = x_exact.norm();
    return ref > 0.0 ? (x - x_exact).norm() / ref : (x - x_exact).norm();
}

} // namespace regusolve
