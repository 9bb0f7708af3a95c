#pragma once

// Discretized first-kind integral equations used as test problems, the
// finite-difference regularization operators, and seeded noise injection.
//
// The discretizations follow the conventions of the Regularization Tools
// package. In every generator the exact data are b = A * x_exact.

#include "regusolve/csv.hpp"
#include "regusolve/matcore.hpp"
#include "regusolve/random.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace regusolve {

struct ProblemParams
{
    int example  = 1;     // i_laplace variant, 1..4
    double depth = 0.25;  // gravity source depth d
};

struct InverseProblem
{
    std::string name;
    Matrix A;
    Vector x_exact;
    Vector b_exact;
    ProblemParams params;
};

enum class OperatorKind { identity, d1, d2 };

struct RegularizationOperator
{
    OperatorKind kind = OperatorKind::identity;
    Matrix matrix;
};

struct NoiseSpec
{
    double delta = 0.0;  // relative noise level
    std::uint64_t seed = 0;
};

inline std::string to_string(OperatorKind k)
{
    switch (k) {
    case OperatorKind::identity: return "identity";
    case OperatorKind::d1: return "d1";
    case OperatorKind::d2: return "d2";
    }
    return "?";
}

inline OperatorKind parse_operator(std::string_view s)
{
    if (s == "identity" || s == "I" || s == "eye") return OperatorKind::identity;
    if (s == "d1") return OperatorKind::d1;
    if (s == "d2") return OperatorKind::d2;
    throw std::invalid_argument("unknown operator '" + std::string(s) + "' (expected identity, d1 or d2)");
}

/// Banded difference operators: d1 rows (1, -1), d2 rows (1, -2, 1).
inline RegularizationOperator derivative_operator(OperatorKind kind, Index n)
{
    if (n < 3)
        throw std::invalid_argument("derivative_operator: n = " + std::to_string(n) + " is too small (need n >= 3)");

    RegularizationOperator op;
    op.kind = kind;
    switch (kind) {
    case OperatorKind::identity:
        op.matrix = Matrix::Identity(n, n);
        break;
    case OperatorKind::d1:
        op.matrix = Matrix::Zero(n - 1, n);
        for (Index i = 0; i < n - 1; ++i) {
            op.matrix(i, i)     = 1.0;
            op.matrix(i, i + 1) = -1.0;
        }
        break;
    case OperatorKind::d2:
        op.matrix = Matrix::Zero(n - 2, n);
        for (Index i = 0; i < n - 2; ++i) {
            op.matrix(i, i)     = 1.0;
            op.matrix(i, i + 1) = -2.0;
            op.matrix(i, i + 2) = 1.0;
        }
        break;
    }
    return op;
}

/// b + delta * (|b| / |s|) * s with s standard Gaussian from the noise stream.
inline Vector add_noise(const Vector& b, const NoiseSpec& spec)
{
    if (!(spec.delta >= 0.0))
        throw std::invalid_argument("add_noise: delta must be nonnegative");
    if (spec.delta == 0.0)
        return b;
    const double bnorm = b.norm();
    if (bnorm == 0.0)
        throw std::invalid_argument("add_noise: relative noise level is undefined for b = 0");

    const Vector s = gaussian_vector(b.size(), spec.seed, RandomStream::noise);
    return b + (spec.delta * bnorm / s.norm()) * s;
}

//
// Gauss-Laguerre quadrature
//

struct GaussLaguerre
{
    Vector nodes;        // ascending
    Vector log_weights;  // natural log of the weights (weights underflow for large n)
};

namespace detail {

// L_k(x) for k = order-1 and k = order via the three-term recurrence,
// returned as (prev, cur, log_scale) with true values exp(log_scale) * {prev, cur}.
struct LaguerrePair
{
    double prev;
    double cur;
    double log_scale;
};

inline LaguerrePair laguerre(Index order, double x)
{
    double prev = 1.0;  // L_0
    double cur  = 1.0 - x;
    double log_scale = 0.0;
    if (order == 0)
        return {0.0, 1.0, 0.0};
    for (Index k = 1; k < order; ++k) {
        const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur  = next;
        const double mag = std::abs(cur);
        if (mag > 1e100 || (mag < 1e-100 && mag > 0.0)) {
            const double sc = std::log(mag);
            prev /= mag;
            cur  /= mag;
            log_scale += sc;
        }
    }
    return {prev, cur, log_scale};
}

} // namespace detail

/// Nodes and log-weights of the n-point Gauss-Laguerre rule for weight exp(-t).
inline GaussLaguerre gauss_laguerre(Index n)
{
    if (n < 1)
        throw std::invalid_argument("gauss_laguerre: n must be positive");

    Vector diag(n), sub(std::max<Index>(n - 1, 0));
    for (Index i = 0; i < n; ++i)
        diag(i) = 2.0 * i + 1.0;
    for (Index i = 0; i + 1 < n; ++i)
        sub(i) = i + 1.0;

    Eigen::SelfAdjointEigenSolver<Matrix> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("gauss_laguerre: eigenvalue iteration failed for n = " + std::to_string(n));

    GaussLaguerre rule;
    rule.nodes = eig.eigenvalues();
    rule.log_weights.resize(n);
    const double nn = static_cast<double>(n);

    for (Index j = 0; j < n; ++j) {
        double x = rule.nodes(j);
        // Newton polish on L_n(x) = 0, using L_n' = n (L_n - L_{n-1}) / x.
        for (int it = 0; it < 4; ++it) {
            const auto lp = detail::laguerre(n, x);
            const double denom = nn * (lp.cur - lp.prev);
            if (denom == 0.0)
                break;
            const double step = x * lp.cur / denom;
            x -= step;
            if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * x)
                break;
        }
        rule.nodes(j) = x;
        // w_j = x_j / ((n+1)^2 L_{n+1}(x_j)^2)
        const auto lp = detail::laguerre(n + 1, x);
        rule.log_weights(j) = std::log(x) - 2.0 * std::log(nn + 1.0)
                            - 2.0 * (std::log(std::abs(lp.cur)) + lp.log_scale);
    }
    return rule;
}

//
// Generators
//

namespace detail {

inline void require_even(std::string_view name, Index n)
{
    if (n % 2 != 0)
        throw std::invalid_argument(std::string(name) + ": n = " + std::to_string(n) + " must be even");
}

inline InverseProblem finish(std::string name, Matrix A, Vector x, const ProblemParams& params)
{
    InverseProblem p;
    p.name = std::move(name);
    p.b_exact = A * x;
    p.A = std::move(A);
    p.x_exact = std::move(x);
    p.params = params;
    return p;
}

inline InverseProblem shaw(Index n)
{
    require_even("shaw", n);
    const double h = std::numbers::pi / static_cast<double>(n);
    Vector co(n), psi(n), t(n);
    for (Index i = 0; i < n; ++i) {
        t(i)   = -std::numbers::pi / 2.0 + (i + 0.5) * h;
        co(i)  = std::cos(t(i));
        psi(i) = std::numbers::pi * std::sin(t(i));
    }
    Matrix A(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const double cs = co(i) + co(j);
            if (i + j == n - 1) {
                A(i, j) = h * cs * cs;
            } else {
                const double ss = psi(i) + psi(j);
                const double v  = cs * std::sin(ss) / ss;
                A(i, j) = h * v * v;
            }
        }
    }
    Vector x(n);
    for (Index i = 0; i < n; ++i)
        x(i) = 2.0 * std::exp(-6.0 * std::pow(t(i) - 0.8, 2)) + std::exp(-2.0 * std::pow(t(i) + 0.5, 2));
    return finish("shaw", std::move(A), std::move(x), {});
}

inline InverseProblem foxgood(Index n)
{
    const double h = 1.0 / static_cast<double>(n);
    Vector t(n);
    for (Index i = 0; i < n; ++i)
        t(i) = h * (i + 0.5);
    Matrix A(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            A(i, j) = h * std::sqrt(t(i) * t(i) + t(j) * t(j));
    return finish("foxgood", std::move(A), t, {});
}

inline InverseProblem gravity(Index n, const ProblemParams& params)
{
    const double d = params.depth;
    if (!(d > 0.0))
        throw std::invalid_argument("gravity: depth d must be positive");
    const double h = 1.0 / static_cast<double>(n);
    Vector t(n);
    for (Index i = 0; i < n; ++i)
        t(i) = h * (i + 0.5);
    Matrix A(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const double r = t(i) - t(j);
            A(i, j) = h * d / std::pow(d * d + r * r, 1.5);
        }
    }
    Vector x(n);
    for (Index i = 0; i < n; ++i)
        x(i) = std::sin(std::numbers::pi * t(i)) + 0.5 * std::sin(2.0 * std::numbers::pi * t(i));
    return finish("gravity", std::move(A), std::move(x), params);
}

// k(t) = t^{-3/2} exp(-1/(4t)) / (2 sqrt(pi)), with k(0) = 0; kappa = 1.
inline double heat_kernel(double t)
{
    if (t <= 0.0)
        return 0.0;
    return std::pow(t, -1.5) * std::exp(-1.0 / (4.0 * t)) / (2.0 * std::sqrt(std::numbers::pi));
}

inline InverseProblem heat(Index n)
{
    require_even("heat", n);
    const double h = 1.0 / static_cast<double>(n);
    Vector k(n);
    for (Index i = 0; i < n; ++i)
        k(i) = h * heat_kernel(h * (i + 0.5));
    Matrix A = Matrix::Zero(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = j; i < n; ++i)
            A(i, j) = k(i - j);

    Vector x = Vector::Zero(n);
    for (Index i = 1; i <= n / 2; ++i) {
        const double ti = i * 20.0 / static_cast<double>(n);
        double v;
        if (ti < 2.0)
            v = 0.75 * ti * ti / 4.0;
        else if (ti < 3.0)
            v = 0.75 + (ti - 2.0) * (3.0 - ti);
        else
            v = 0.75 * std::exp(-(ti - 3.0) * 2.0);
        x(i - 1) = v;
    }
    return finish("heat", std::move(A), std::move(x), {});
}

inline InverseProblem phillips(Index n)
{
    if (n % 4 != 0)
        throw std::invalid_argument("phillips: n = " + std::to_string(n) + " must be a multiple of 4");
    const double h  = 12.0 / static_cast<double>(n);
    const Index n4  = n / 4;
    const double pi = std::numbers::pi;

    // c(k) = cos(k * 4 pi / n) for k = -1 .. n4
    auto c = [&](Index k) { return std::cos(static_cast<double>(k) * 4.0 * pi / static_cast<double>(n)); };
    Vector r1 = Vector::Zero(n);
    for (Index k = 0; k < n4; ++k)
        r1(k) = h + 9.0 / (h * pi * pi) * (2.0 * c(k) - c(k - 1) - c(k + 1));
    r1(n4) = h / 2.0 + 9.0 / (h * pi * pi) * (std::cos(4.0 * pi / static_cast<double>(n)) - 1.0);

    Matrix A(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            A(i, j) = r1(std::abs(i - j));

    const double cc = pi / 3.0;
    const double sh = std::sqrt(h);
    Vector x = Vector::Zero(n);
    for (Index k = 0; k < n4; ++k) {
        const double v = (h + (std::sin((k + 1) * h * cc) - std::sin(k * h * cc)) / cc) / sh;
        x(2 * n4 + k) = v;
        x(2 * n4 - 1 - k) = v;
    }
    return finish("phillips", std::move(A), std::move(x), {});
}

inline InverseProblem i_laplace(Index n, const ProblemParams& params)
{
    const int eg = params.example;
    if (eg < 1 || eg > 4)
        throw std::invalid_argument("i_laplace: example must be 1, 2, 3 or 4 (got " + std::to_string(eg) + ")");

    const GaussLaguerre rule = gauss_laguerre(n);
    const Vector& t = rule.nodes;
    Matrix A(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const double s = 10.0 * static_cast<double>(i + 1) / static_cast<double>(n);
            A(i, j) = std::exp(rule.log_weights(j) + (1.0 - s) * t(j));
        }
    }
    Vector x(n);
    for (Index j = 0; j < n; ++j) {
        switch (eg) {
        case 1: x(j) = std::exp(-t(j) / 2.0); break;
        case 2: x(j) = 1.0 - std::exp(-t(j) / 2.0); break;
        case 3: x(j) = t(j) * t(j) * std::exp(-t(j) / 2.0); break;
        default: x(j) = t(j) > 2.0 ? 1.0 : 0.0; break;
        }
    }
    return finish("i_laplace", std::move(A), std::move(x), params);
}

} // namespace detail

inline const std::vector<std::string>& problem_names()
{
    static const std::vector<std::string> names{"shaw", "i_laplace", "foxgood", "gravity", "heat", "phillips"};
    return names;
}

inline InverseProblem generate(std::string_view name, Index n, const ProblemParams& params = {})
{
    if (n < 8)
        throw std::invalid_argument(std::string(name) + ": n = " + std::to_string(n) + " is too small (need n >= 8)");
    if (name == "shaw") return detail::shaw(n);
    if (name == "i_laplace" || name == "ilaplace") return detail::i_laplace(n, params);
    if (name == "foxgood") return detail::foxgood(n);
    if (name == "gravity") return detail::gravity(n, params);
    if (name == "heat") return detail::heat(n);
    if (name == "phillips") return detail::phillips(n);
    throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
}

/// Writes <dir>/A.csv (row-major) and <dir>/xb.csv (columns x_exact, b_exact).
inline void export_csv(const InverseProblem& p, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    csv::write_matrix((dir / "A.csv").string(), p.A);
    csv::write_columns((dir / "xb.csv").string(), {"x_exact", "b_exact"}, {p.x_exact, p.b_exact});
}

} // namespace regusolve
