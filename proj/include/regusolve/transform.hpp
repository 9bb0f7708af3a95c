#pragma once

// Reduction of  min |A x - b|^2 + mu^2 |L x|^2  to the standard form
//   min |K y - b|^2 + mu^2 |y|^2,   K = A L# Z,
// with the affine back-map  x = (L# Z) y + W (AW)^+ b.
//
// W spans N(L), Z is an orthonormal basis of R(L) and
// L# = (I - W (AW)^+ A) L^+ is the oblique pseudoinverse. The back-mapped
// vector is the minimum-norm minimizer of the general-form problem, also
// when N(A) and N(L) intersect.

#include "regusolve/matcore.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace regusolve {

enum class TransformCase {
    general,             // complete orthogonal decomposition of L, pivoted QR of AW
    null_in_null,        // N(L) subset of N(A): AW = 0, L# = L^+
    full_row_rank,       // L of full row rank, AW of full column rank: two QR factorizations
    full_col_rank,       // skinny QR L = Q1 R, K = A R^{-1}
    square_nonsingular,  // K = A L^{-1}
};

inline std::string to_string(TransformCase c)
{
    switch (c) {
    case TransformCase::general: return "general";
    case TransformCase::null_in_null: return "null_in_null";
    case TransformCase::full_row_rank: return "full_row_rank";
    case TransformCase::full_col_rank: return "full_col_rank";
    case TransformCase::square_nonsingular: return "square_nonsingular";
    }
    return "?";
}

struct StandardFormSystem
{
    Matrix K;             // m x r
    Vector rhs;           // b
    Matrix back_basis;    // L# Z, n x r
    Vector back_offset;   // W (AW)^+ b
    Index null_rank = 0;  // rank(AW): directions fitted without regularization
    double noise_floor = 0.0;  // rounding level of K, set by |A| |L# Z|
    TransformCase case_tag = TransformCase::general;
};

struct NullRangeBases
{
    Matrix W;  // n x (n - r), orthonormal basis of N(L)
    Matrix Z;  // p x r, orthonormal basis of R(L)
};

inline NullRangeBases null_range_bases(const Matrix& L)
{
    const CompleteOrthDecomp cod = complete_orthogonal(L);
    return {cod.null_basis(), cod.range_basis()};
}

/// Zeroes singular values of K at or below the system's noise floor, which
/// can sit above K's own rank tolerance when A L# cancels.
inline void drop_noise(SvdFactorization& f, const StandardFormSystem& sys)
{
    for (Index i = 0; i < f.singular_values.size(); ++i)
        if (f.singular_values(i) <= sys.noise_floor)
            f.singular_values(i) = 0.0;
}

namespace detail {

// Rounding in A W is set by |A|, not by |A W|.
inline double aw_floor(const Matrix& A)
{
    return std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(A.rows(), A.cols())) * A.norm();
}

inline bool null_in_null(const Matrix& A, const Matrix& W)
{
    if (W.cols() == 0)
        return false;
    const double aw = (A * W).norm();
    return aw <= 1e-12 * A.norm() * std::max(1.0, W.norm());
}

inline Matrix upper_inverse(const Matrix& R)
{
    return R.triangularView<Eigen::Upper>().solve(Matrix::Identity(R.rows(), R.cols()));
}

inline void check_shapes(const Matrix& A, const Matrix& L, const Vector& b)
{
    if (A.cols() != L.cols())
        throw std::invalid_argument("to_standard_form: A has " + std::to_string(A.cols()) + " columns but L has "
                                    + std::to_string(L.cols()));
    if (b.size() != A.rows())
        throw std::invalid_argument("to_standard_form: b has length " + std::to_string(b.size()) + " but A has "
                                    + std::to_string(A.rows()) + " rows");
    require_nonempty(A, "to_standard_form");
    require_nonempty(L, "to_standard_form");
    require_finite(A, "to_standard_form");
    require_finite(L, "to_standard_form");
}

inline StandardFormSystem finish_system(const Matrix& A, const Vector& b, Matrix back_basis, Vector offset,
                                        TransformCase tag, Index null_rank = 0)
{
    StandardFormSystem sys;
    sys.null_rank = null_rank;
    sys.K = A * back_basis;
    // A L# can cancel to rounding level when R(L#) lies in N(A); a solver
    // would invert that noise, so snap it to the exact zero it represents.
    sys.noise_floor = std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(A.rows(), A.cols()))
                      * A.norm() * back_basis.norm();
    if (sys.K.norm() <= sys.noise_floor)
        sys.K.setZero();
    sys.rhs = b;
    sys.back_basis = std::move(back_basis);
    sys.back_offset = std::move(offset);
    sys.case_tag = tag;
    return sys;
}

inline StandardFormSystem square_nonsingular(const Matrix& A, const Matrix& L, const Vector& b)
{
    const Index n = L.cols();
    Eigen::PartialPivLU<Matrix> lu(L);
    Matrix Linv = lu.inverse();
    return finish_system(A, b, std::move(Linv), Vector::Zero(n), TransformCase::square_nonsingular);
}

inline StandardFormSystem full_col_rank(const Matrix& A, const Matrix& L, const Vector& b)
{
    const Index n = L.cols();
    Eigen::HouseholderQR<Matrix> qr(L);
    const Matrix R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    return finish_system(A, b, upper_inverse(R), Vector::Zero(n), TransformCase::full_col_rank);
}

// L^T = [Q1 W] [R; 0],  L^+ = Q1 R^{-T};  AW = U1 T,  (AW)^+ = T^{-1} U1^T;  Z = I.
inline StandardFormSystem full_row_rank(const Matrix& A, const Matrix& L, const Vector& b)
{
    const Index p = L.rows();
    const Index n = L.cols();
    Eigen::HouseholderQR<Matrix> lq(L.transpose());
    const Matrix Q = lq.householderQ() * Matrix::Identity(n, n);
    const Matrix R = lq.matrixQR().topRows(p).triangularView<Eigen::Upper>();
    const Matrix Q1 = Q.leftCols(p);
    const Matrix W = Q.rightCols(n - p);

    // L^+ = Q1 R^{-T}
    const Matrix Ldag = (R.triangularView<Eigen::Upper>().solve(Q1.transpose())).transpose();
    if (W.cols() == 0)
        return finish_system(A, b, Ldag, Vector::Zero(n), TransformCase::full_row_rank);

    const Matrix AW = A * W;
    Eigen::HouseholderQR<Matrix> aq(AW);
    const Index k = W.cols();
    if (AW.rows() < k)
        throw std::invalid_argument("to_standard_form: AW cannot have full column rank (full_row_rank case)");
    const Matrix T = aq.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    const double tmax = T.diagonal().cwiseAbs().maxCoeff();
    const double tmin = T.diagonal().cwiseAbs().minCoeff();
    if (!(tmin > std::max(rank_tolerance(AW.rows(), k, tmax), aw_floor(A))) || tmax == 0.0)
        throw std::invalid_argument("to_standard_form: AW is rank deficient, full_row_rank case does not apply");
    const Matrix U1 = aq.householderQ() * Matrix::Identity(AW.rows(), k);

    auto aw_pinv = [&](const Matrix& X) -> Matrix {
        return T.triangularView<Eigen::Upper>().solve(U1.transpose() * X);
    };
    Matrix basis = Ldag - W * aw_pinv(A * Ldag);
    Vector offset = W * aw_pinv(b);
    return finish_system(A, b, std::move(basis), std::move(offset), TransformCase::full_row_rank, k);
}

// L = U_r T V_r^T  =>  L^+ Z = V_r T^{-1} with Z = U_r.
inline StandardFormSystem via_cod(const Matrix& A, const Matrix& L, const Vector& b, bool drop_aw_terms)
{
    const Index n = L.cols();
    const CompleteOrthDecomp cod = complete_orthogonal(L);
    const Index r = cod.numerical_rank;
    const Matrix W = cod.null_basis();

    Matrix LdagZ(n, r);
    if (r > 0) {
        const Matrix Vr = cod.V.leftCols(r);
        // T lower triangular: X T = Vr  <=>  T^T X^T = Vr^T
        LdagZ = cod.T.transpose().triangularView<Eigen::Upper>().solve(Vr.transpose()).transpose();
    }

    if (drop_aw_terms) {
        if (W.cols() > 0 && !null_in_null(A, W))
            throw std::invalid_argument("to_standard_form: N(L) is not contained in N(A), null_in_null case does not apply");
        return finish_system(A, b, std::move(LdagZ), Vector::Zero(n), TransformCase::null_in_null);
    }
    if (W.cols() == 0)
        return finish_system(A, b, std::move(LdagZ), Vector::Zero(n), TransformCase::general);

    // AW negligible relative to A: N(L) lies in N(A) numerically
    if (null_in_null(A, W))
        return finish_system(A, b, std::move(LdagZ), Vector::Zero(n), TransformCase::general);
    const Matrix AW = A * W;
    const PivotedQr qr = qr_pivoted(AW, aw_floor(A));
    Matrix basis = LdagZ;
    if (r > 0)
        basis -= W * pinv_apply(qr, Matrix(A * LdagZ));
    Vector offset = W * pinv_apply(qr, b);
    return finish_system(A, b, std::move(basis), std::move(offset), TransformCase::general, qr.numerical_rank);
}

} // namespace detail

/// Picks the cheapest applicable path from the structure of L and AW.
inline TransformCase detect_case(const Matrix& A, const Matrix& L)
{
    const Index p = L.rows();
    const Index n = L.cols();
    const PivotedQr lqr = qr_pivoted(L);
    const Index r = lqr.numerical_rank;

    if (p == n && r == n)
        return TransformCase::square_nonsingular;
    if (r == n)
        return TransformCase::full_col_rank;

    const Matrix W = null_range_bases(L).W;
    if (detail::null_in_null(A, W))
        return TransformCase::null_in_null;
    if (r == p) {
        const Matrix AW = A * W;
        if (AW.rows() >= AW.cols() && AW.norm() > 0.0 && qr_pivoted(AW, detail::aw_floor(A)).numerical_rank == AW.cols())
            return TransformCase::full_row_rank;
    }
    return TransformCase::general;
}

/// Runs the transformation along `path`, or along the detected path if none is given.
/// Forcing a path whose structural assumptions fail throws std::invalid_argument.
inline StandardFormSystem to_standard_form(const Matrix& A, const Matrix& L, const Vector& b,
                                           std::optional<TransformCase> path = std::nullopt)
{
    detail::check_shapes(A, L, b);
    const TransformCase tag = path ? *path : detect_case(A, L);

    switch (tag) {
    case TransformCase::square_nonsingular: {
        if (L.rows() != L.cols() || qr_pivoted(L).numerical_rank != L.cols())
            throw std::invalid_argument("to_standard_form: L is not square and nonsingular");
        return detail::square_nonsingular(A, L, b);
    }
    case TransformCase::full_col_rank: {
        if (L.rows() < L.cols() || qr_pivoted(L).numerical_rank != L.cols())
            throw std::invalid_argument("to_standard_form: L does not have full column rank");
        return detail::full_col_rank(A, L, b);
    }
    case TransformCase::full_row_rank: {
        if (L.rows() > L.cols() || qr_pivoted(L).numerical_rank != L.rows())
            throw std::invalid_argument("to_standard_form: L does not have full row rank");
        return detail::full_row_rank(A, L, b);
    }
    case TransformCase::null_in_null:
        return detail::via_cod(A, L, b, true);
    case TransformCase::general:
        return detail::via_cod(A, L, b, false);
    }
    throw std::logic_error("to_standard_form: unhandled case");
}

inline Vector back_map(const StandardFormSystem& sys, const Vector& y)
{
    if (y.size() != sys.back_basis.cols())
        throw std::invalid_argument("back_map: coefficient vector has length " + std::to_string(y.size())
                                    + ", expected " + std::to_string(sys.back_basis.cols()));
    return sys.back_basis * y + sys.back_offset;
}

/// Dense oblique pseudoinverse L# = (I - W (AW)^+ A) L^+ (n x p).
inline Matrix oblique_pseudoinverse(const Matrix& A, const Matrix& L)
{
    const Index n = L.cols();
    const CompleteOrthDecomp cod = complete_orthogonal(L);
    const Index r = cod.numerical_rank;
    Matrix Ldag = Matrix::Zero(n, L.rows());
    if (r > 0) {
        const Matrix Vr = cod.V.leftCols(r);
        const Matrix LdagZ = cod.T.transpose().triangularView<Eigen::Upper>().solve(Vr.transpose()).transpose();
        Ldag = LdagZ * cod.range_basis().transpose();
    }
    const Matrix W = cod.null_basis();
    if (W.cols() == 0)
        return Ldag;
    if (detail::null_in_null(A, W))
        return Ldag;
    const Matrix AW = A * W;
    return Ldag - W * pinv_apply(qr_pivoted(AW, detail::aw_floor(A)), Matrix(A * Ldag));
}

} // namespace regusolve
