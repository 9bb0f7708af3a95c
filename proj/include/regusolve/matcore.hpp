#pragma once

// Dense factorization kernels shared by every solver in the library:
// SVD, column-pivoted QR, complete orthogonal decomposition, the CS
// decomposition of a column-orthonormal pair and the generalized SVD.
//
// All matrices are Eigen::MatrixXd (column-major storage, rows()*cols()
// doubles). Factorizations are plain values; nothing is cached or shared.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace regusolve {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index  = Eigen::Index;
using Permutation = Eigen::ColPivHouseholderQR<Matrix>::PermutationType;

/// Numerical rank threshold: singular values at or below
/// eps * max(rows, cols) * sigma_max are treated as zero.
inline double rank_tolerance(Index rows, Index cols, double sigma_max)
{
    return std::numeric_limits<double>::epsilon()
         * static_cast<double>(std::max<Index>({rows, cols, 1}))
         * sigma_max;
}

namespace detail {

inline std::string shape(Index r, Index c)
{
    std::ostringstream os;
    os << r << "x" << c;
    return os.str();
}

inline void require_finite(const Matrix& M, const char* what)
{
    if (!M.allFinite())
        throw std::invalid_argument(std::string(what) + ": matrix " + shape(M.rows(), M.cols())
                                    + " has non-finite entries");
}

inline void require_nonempty(const Matrix& M, const char* what)
{
    if (M.rows() == 0 || M.cols() == 0)
        throw std::invalid_argument(std::string(what) + ": empty matrix " + shape(M.rows(), M.cols()));
}

// +1 if the largest-magnitude entry (first one on ties) is nonnegative, else -1.
inline double dominant_sign(const Eigen::Ref<const Vector>& v)
{
    if (v.size() == 0)
        return 1.0;
    Index k = 0;
    v.cwiseAbs().maxCoeff(&k);
    return v(k) < 0.0 ? -1.0 : 1.0;
}

inline Matrix thin_q(const Eigen::HouseholderQR<Matrix>& qr, Index cols)
{
    return qr.householderQ() * Matrix::Identity(qr.rows(), cols);
}

} // namespace detail

//
// SVD
//

struct SvdFactorization
{
    Matrix U;                // m x k, orthonormal columns
    Vector singular_values;  // length k, nonincreasing
    Matrix V;                // n x k, orthonormal columns

    Index size() const { return singular_values.size(); }
    Index rows() const { return U.rows(); }
    Index cols() const { return V.rows(); }

    double tolerance() const
    {
        const double smax = size() > 0 ? singular_values(0) : 0.0;
        return rank_tolerance(rows(), cols(), smax);
    }

    Index rank() const
    {
        const double tol = tolerance();
        return static_cast<Index>((singular_values.array() > tol).count());
    }

    Matrix reconstruct() const { return U * singular_values.asDiagonal() * V.transpose(); }
};

// Fixes the sign of each singular pair so the largest |entry| of v_i is positive.
inline void normalize_signs(SvdFactorization& f)
{
    for (Index i = 0; i < f.size(); ++i) {
        if (detail::dominant_sign(f.V.col(i)) < 0.0) {
            f.V.col(i) *= -1.0;
            f.U.col(i) *= -1.0;
        }
    }
}

/// Thin SVD M = U diag(s) V^T with k = min(rows, cols).
inline SvdFactorization svd(const Matrix& M)
{
    detail::require_nonempty(M, "svd");
    detail::require_finite(M, "svd");

    Eigen::BDCSVD<Matrix> dec(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (dec.info() != Eigen::Success)
        throw std::runtime_error("svd: iteration failed to converge for matrix "
                                 + detail::shape(M.rows(), M.cols()));

    SvdFactorization f{dec.matrixU(), dec.singularValues(), dec.matrixV()};
    normalize_signs(f);
    return f;
}

//
// QR with column pivoting:  M * P = Q1 * T1
//

struct PivotedQr
{
    Matrix Q1;                // m x r, orthonormal columns spanning R(M)
    Matrix T1;                // r x n, upper trapezoidal, full row rank
    Permutation permutation;  // n x n column permutation P
    Index numerical_rank = 0;

    // T1^T = pinv_basis * pinv_factor (thin QR), kept for pseudoinverse
    // applications when T1 is wide.
    Matrix pinv_basis;   // n x r
    Matrix pinv_factor;  // r x r upper triangular

    Index rows() const { return Q1.rows(); }
    Index cols() const { return T1.cols(); }
};

/// floor is an absolute lower bound on the rank tolerance, for products whose
/// rounding noise is set by a larger factor than M itself.
inline PivotedQr qr_pivoted(const Matrix& M, double floor = 0.0)
{
    detail::require_nonempty(M, "qr_pivoted");
    detail::require_finite(M, "qr_pivoted");

    const Index m = M.rows();
    const Index n = M.cols();

    Eigen::ColPivHouseholderQR<Matrix> dec(m, n);
    dec.setThreshold(std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(m, n)));
    dec.compute(M);
    const double pivot = std::abs(dec.maxPivot());
    if (floor > 0.0 && pivot > 0.0)
        dec.setThreshold(std::max(dec.threshold(), floor / pivot));

    PivotedQr f;
    f.numerical_rank = dec.rank();
    const Index r    = f.numerical_rank;
    f.permutation    = dec.colsPermutation();
    f.Q1 = dec.householderQ() * Matrix::Identity(m, r);
    f.T1 = dec.matrixR().topRows(r).template triangularView<Eigen::Upper>();

    if (r > 0 && r < n) {
        Eigen::HouseholderQR<Matrix> tq(f.T1.transpose());
        f.pinv_basis  = detail::thin_q(tq, r);
        f.pinv_factor = tq.matrixQR().topRows(r).template triangularView<Eigen::Upper>();
    }
    return f;
}

/// Minimum-norm least-squares solution M^+ v from a pivoted QR of M,
/// i.e. P * T1^T (T1 T1^T)^{-1} * Q1^T v.
inline Vector pinv_apply(const PivotedQr& f, const Vector& v)
{
    if (v.size() != f.rows())
        throw std::invalid_argument("pinv_apply: vector length " + std::to_string(v.size())
                                    + " does not match factored row count " + std::to_string(f.rows()));

    const Index r = f.numerical_rank;
    const Index n = f.cols();
    Vector z = Vector::Zero(n);
    if (r == 0)
        return z;

    const Vector w = f.Q1.transpose() * v;
    if (r == n) {
        z = f.T1.template triangularView<Eigen::Upper>().solve(w);
    } else {
        // T1 = R^T Qt^T  =>  T1^+ w = Qt R^{-T} w
        const Vector u = f.pinv_factor.transpose().template triangularView<Eigen::Lower>().solve(w);
        z = f.pinv_basis * u;
    }
    return f.permutation * z;
}

/// Column-wise pinv_apply.
inline Matrix pinv_apply(const PivotedQr& f, const Matrix& V)
{
    Matrix out(f.cols(), V.cols());
    for (Index j = 0; j < V.cols(); ++j)
        out.col(j) = pinv_apply(f, Vector(V.col(j)));
    return out;
}

//
// Complete orthogonal decomposition:  U^T M V = [T 0; 0 0]
//

struct CompleteOrthDecomp
{
    Matrix U;  // m x m orthogonal
    Matrix V;  // n x n orthogonal
    Matrix T;  // r x r nonsingular, lower triangular
    Index numerical_rank = 0;

    /// Orthonormal basis of R(M): first r columns of U.
    Matrix range_basis() const { return U.leftCols(numerical_rank); }
    /// Orthonormal basis of N(M): last n - r columns of V.
    Matrix null_basis() const { return V.rightCols(V.cols() - numerical_rank); }
};

inline CompleteOrthDecomp complete_orthogonal(const Matrix& M)
{
    detail::require_nonempty(M, "complete_orthogonal");
    detail::require_finite(M, "complete_orthogonal");

    const Index m = M.rows();
    const Index n = M.cols();

    Eigen::ColPivHouseholderQR<Matrix> dec(m, n);
    dec.setThreshold(std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(m, n)));
    dec.compute(M);
    const Index r = dec.rank();

    CompleteOrthDecomp f;
    f.numerical_rank = r;
    f.U = dec.householderQ() * Matrix::Identity(m, m);

    const Permutation P = dec.colsPermutation();
    if (r == 0) {
        f.V = P * Matrix::Identity(n, n);
        f.T.resize(0, 0);
    } else {
        // R1 = [R11 R12] (r x n). R1^T = Z [S; 0]  =>  M P = Q [S^T 0; 0 0] Z^T.
        const Matrix R1 = dec.matrixR().topRows(r).template triangularView<Eigen::Upper>();
        Eigen::HouseholderQR<Matrix> zq(R1.transpose());
        const Matrix Z = zq.householderQ() * Matrix::Identity(n, n);
        const Matrix S = zq.matrixQR().topRows(r).template triangularView<Eigen::Upper>();
        f.T = S.transpose();
        f.V = P * Z;
    }

    for (Index j = 0; j < m; ++j) {
        const double su = detail::dominant_sign(f.U.col(j));
        if (su < 0.0) {
            f.U.col(j) *= -1.0;
            if (j < r) f.T.row(j) *= -1.0;
        }
    }
    for (Index j = 0; j < n; ++j) {
        const double sv = detail::dominant_sign(f.V.col(j));
        if (sv < 0.0) {
            f.V.col(j) *= -1.0;
            if (j < r) f.T.col(j) *= -1.0;
        }
    }
    return f;
}

//
// CS decomposition:  Qa = U C W^T,  Ql = V S W^T
//

struct CsDecomposition
{
    Matrix U;  // m x n
    Matrix V;  // p x n
    Vector c;  // nondecreasing, in [0, 1]
    Vector s;  // nonincreasing, c_i^2 + s_i^2 = 1
    Matrix W;  // n x n orthogonal
};

namespace detail {

// Assumes [Qa; Ql] has orthonormal columns.
//
// Ql = V S W^T comes from an SVD (s descending, zero-padded when p < n). That
// SVD cannot resolve directions whose s_i cluster near 1, so the block with
// s_i > 1/sqrt(2) is rotated by the right singular vectors of Qa W on that
// block, which resolves the small c_i instead. Afterwards the columns of Qa W
// and Ql W are orthogonal to rounding, and QRs taken in order of decreasing
// c_i (resp. s_i) yield U, C and V, S. Each pair is completed from whichever
// value is well conditioned. Values at or below the rank tolerance are
// snapped to the exact (0, 1) / (1, 0) pairs.
inline CsDecomposition cs_decompose_unchecked(const Matrix& Qa, const Matrix& Ql)
{
    const Index m = Qa.rows();
    const Index p = Ql.rows();
    const Index n = Qa.cols();
    const Index kl = std::min(p, n);
    const double tol = rank_tolerance(m + p, n, 1.0);
    const double split = std::sqrt(0.5);

    CsDecomposition cs;
    Vector sv = Vector::Zero(n);
    if (p > 0) {
        Eigen::BDCSVD<Matrix> dec(Ql, Eigen::ComputeFullV);
        if (dec.info() != Eigen::Success)
            throw std::runtime_error("cs_decompose: SVD of the " + shape(p, n)
                                     + " block failed to converge");
        sv.head(kl) = dec.singularValues();
        cs.W = dec.matrixV();
    } else {
        cs.W = Matrix::Identity(n, n);
    }

    // Leading block with s_i > 1/sqrt(2): small c_i, resolved from Qa.
    Index k1 = 0;
    while (k1 < n && sv(k1) > split)
        ++k1;
    if (k1 > 1) {
        Eigen::BDCSVD<Matrix> dec(Qa * cs.W.leftCols(k1), Eigen::ComputeFullV);
        if (dec.info() != Eigen::Success)
            throw std::runtime_error("cs_decompose: SVD of the small-cosine block failed to converge");
        // ascending singular values so c stays nondecreasing
        const Matrix Z = dec.matrixV().rowwise().reverse();
        cs.W.leftCols(k1) = cs.W.leftCols(k1) * Z;
    }

    // U and the cosines: QR of Qa W, largest c first.
    const Matrix X = Qa * cs.W;
    const Index kq = std::min(m, n);
    Matrix Xr(m, kq);
    for (Index j = 0; j < kq; ++j)
        Xr.col(j) = X.col(n - 1 - j);
    cs.U = Matrix::Zero(m, n);
    Vector cnorm = Vector::Zero(n);
    if (kq > 0) {
        Eigen::HouseholderQR<Matrix> qr(Xr);
        const Matrix Q = thin_q(qr, kq);
        for (Index j = 0; j < kq; ++j) {
            const double rjj = qr.matrixQR()(j, j);
            const Index i = n - 1 - j;
            cnorm(i) = std::abs(rjj);
            cs.U.col(i) = rjj < 0.0 ? Vector(-Q.col(j)) : Vector(Q.col(j));
        }
    }

    // V and the sines: QR of Ql W, largest s first.
    cs.V = Matrix::Zero(p, n);
    Vector snorm = Vector::Zero(n);
    if (kl > 0) {
        Eigen::HouseholderQR<Matrix> qr(Ql * cs.W.leftCols(kl));
        const Matrix Q = thin_q(qr, kl);
        for (Index i = 0; i < kl; ++i) {
            const double rii = qr.matrixQR()(i, i);
            snorm(i) = std::abs(rii);
            cs.V.col(i) = rii < 0.0 ? Vector(-Q.col(i)) : Vector(Q.col(i));
        }
    }

    cs.c.resize(n);
    cs.s.resize(n);
    for (Index i = 0; i < n; ++i) {
        if (i < k1) {
            cs.c(i) = cnorm(i);
            cs.s(i) = std::sqrt((1.0 - cs.c(i)) * (1.0 + cs.c(i)));
        } else {
            cs.s(i) = i < kl ? snorm(i) : 0.0;
            cs.c(i) = std::sqrt((1.0 - cs.s(i)) * (1.0 + cs.s(i)));
        }
        if (cs.s(i) <= tol) {
            cs.s(i) = 0.0;
            cs.c(i) = 1.0;
        } else if (cs.c(i) <= tol) {
            cs.c(i) = 0.0;
            cs.s(i) = 1.0;
        }
    }
    // Rounding-level repairs of the ordering.
    for (Index i = 1; i < n; ++i) {
        cs.c(i) = std::max(cs.c(i), cs.c(i - 1));
        cs.s(i) = std::min(cs.s(i), cs.s(i - 1));
    }
    return cs;
}

} // namespace detail

inline CsDecomposition cs_decompose(const Matrix& Qa, const Matrix& Ql)
{
    if (Qa.cols() != Ql.cols())
        throw std::invalid_argument("cs_decompose: blocks have " + std::to_string(Qa.cols()) + " and "
                                    + std::to_string(Ql.cols()) + " columns");
    if (Qa.cols() == 0)
        throw std::invalid_argument("cs_decompose: zero columns");
    detail::require_finite(Qa, "cs_decompose");
    detail::require_finite(Ql, "cs_decompose");

    const Index n = Qa.cols();
    const Matrix gram = Qa.transpose() * Qa + Ql.transpose() * Ql;
    const double defect = (gram - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
    if (defect > 1e-10)
        throw std::invalid_argument("cs_decompose: stacked matrix is not column orthonormal (defect "
                                    + std::to_string(defect) + ")");

    return detail::cs_decompose_unchecked(Qa, Ql);
}

//
// Generalized SVD of a pair:  A = U C G^{-1},  L = V S G^{-1}
//

struct GsvdFactorization
{
    Matrix U;  // m x n (columns with c_i = 0 and no room in R^m are zero)
    Matrix V;  // p x n (columns with s_i = 0 beyond p are zero)
    Vector c;  // nondecreasing
    Vector s;  // nonincreasing; trailing zeros mark unregularized directions
    Matrix G;  // n x n, columns g_i
    Index p = 0;

    // G^{-1} = W^T R P^T, kept so the inverse can be applied without forming it.
    Matrix W;
    Matrix R;
    Permutation permutation;

    Index size() const { return c.size(); }
    Index rows_a() const { return U.rows(); }
    Index rows_l() const { return V.rows(); }

    /// Number of indices with s_i > 0 (the regularized block).
    Index regularized_count() const { return static_cast<Index>((s.array() > 0.0).count()); }

    Vector apply_inverse_g(const Vector& x) const
    {
        return W.transpose() * (R.template triangularView<Eigen::Upper>() * (permutation.transpose() * x));
    }

    Matrix inverse_g() const
    {
        const Matrix Rt = R.template triangularView<Eigen::Upper>();
        return W.transpose() * Rt * permutation.transpose();
    }
};

inline GsvdFactorization gsvd(const Matrix& A, const Matrix& L)
{
    if (A.cols() != L.cols())
        throw std::invalid_argument("gsvd: A is " + detail::shape(A.rows(), A.cols()) + " but L is "
                                    + detail::shape(L.rows(), L.cols()));
    detail::require_nonempty(A, "gsvd");
    detail::require_finite(A, "gsvd");
    detail::require_finite(L, "gsvd");

    const Index m = A.rows();
    const Index p = L.rows();
    const Index n = A.cols();

    Matrix M(m + p, n);
    M.topRows(m)    = A;
    M.bottomRows(p) = L;

    Eigen::ColPivHouseholderQR<Matrix> dec(m + p, n);
    dec.setThreshold(std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(m + p, n)));
    dec.compute(M);
    if (dec.rank() < n)
        throw std::invalid_argument("gsvd: null spaces intersect nontrivially (rank of [A; L] is "
                                    + std::to_string(dec.rank()) + " < " + std::to_string(n) + ")");

    const Matrix Q = dec.householderQ() * Matrix::Identity(m + p, n);
    CsDecomposition cs = detail::cs_decompose_unchecked(Q.topRows(m), Q.bottomRows(p));

    GsvdFactorization f;
    f.p = p;
    f.R = dec.matrixR().topRows(n).template triangularView<Eigen::Upper>();
    f.permutation = dec.colsPermutation();
    f.G = f.permutation * Matrix(f.R.template triangularView<Eigen::Upper>().solve(cs.W));
    f.U = std::move(cs.U);
    f.V = std::move(cs.V);
    f.c = std::move(cs.c);
    f.s = std::move(cs.s);
    f.W = std::move(cs.W);

    for (Index i = 0; i < n; ++i) {
        if (detail::dominant_sign(f.G.col(i)) < 0.0) {
            f.G.col(i) *= -1.0;
            f.W.col(i) *= -1.0;
            f.U.col(i) *= -1.0;
            f.V.col(i) *= -1.0;
        }
    }
    return f;
}

} // namespace regusolve
