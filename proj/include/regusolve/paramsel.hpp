#pragma once

// Regularization parameter choice: GCV, discrepancy principle and L-curve.
//
// All rules act on a FilterSpectrum, the part of an SVD or GSVD that the
// Tikhonov filter sees. With gamma_i the (generalized) singular values and
// beta_i = u_i^T b, the filter is f_i = gamma_i^2 / (gamma_i^2 + mu^2) and
//   |residual|^2 = floor^2 + sum ((1 - f_i) beta_i)^2
//   |seminorm|^2 = sum (scale_i f_i beta_i / gamma_i)^2
// Directions fitted without regularization (the s_i = 0 block of a GSVD) are
// only counted, they never enter either norm.

#include "regusolve/matcore.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace regusolve {

struct FilterSpectrum
{
    Vector gamma;
    Vector beta;
    Vector scale;               // solution coefficient scale, ones by default
    double residual_floor = 0;  // |(I - U U^T) b|
    Index data_size = 0;        // m
    Index unfiltered = 0;       // directions with f_i = 1 for every mu

    Index size() const { return gamma.size(); }
    double gamma_max() const { return gamma.size() ? gamma.maxCoeff() : 0.0; }

    void validate(const char* who) const
    {
        if (beta.size() != gamma.size() || scale.size() != gamma.size())
            throw std::invalid_argument(std::string(who) + ": spectrum lengths disagree");
        for (Index i = 0; i < gamma.size(); ++i)
            if (!std::isfinite(gamma(i)) || gamma(i) < 0.0)
                throw std::invalid_argument(std::string(who) + ": gamma must be finite and nonnegative");
        if (!(gamma_max() > 0.0))
            throw std::invalid_argument(std::string(who) + ": all gamma are zero");
    }

    /// Standard form. Singular values at or below the rank tolerance are treated as zero.
    static FilterSpectrum from_svd(const SvdFactorization& f, const Vector& b)
    {
        if (b.size() != f.rows())
            throw std::invalid_argument("FilterSpectrum::from_svd: b has length " + std::to_string(b.size())
                                        + ", expected " + std::to_string(f.rows()));
        FilterSpectrum sp;
        const double tol = f.tolerance();
        sp.gamma = f.singular_values.unaryExpr([tol](double s) { return s > tol ? s : 0.0; });
        sp.beta = f.U.transpose() * b;
        sp.scale = Vector::Ones(f.size());
        sp.residual_floor = (b - f.U * sp.beta).norm();
        sp.data_size = b.size();
        return sp;
    }

    /// General form, gamma_i = c_i / s_i on the regularized block.
    static FilterSpectrum from_gsvd(const GsvdFactorization& f, const Vector& b)
    {
        if (b.size() != f.rows_a())
            throw std::invalid_argument("FilterSpectrum::from_gsvd: b has length " + std::to_string(b.size())
                                        + ", expected " + std::to_string(f.rows_a()));
        const Vector proj = f.U.transpose() * b;
        const Index k = f.regularized_count();
        FilterSpectrum sp;
        sp.gamma.resize(k);
        sp.beta = proj.head(k);
        sp.scale = Vector::Ones(k);
        for (Index i = 0; i < k; ++i)
            sp.gamma(i) = f.c(i) / f.s(i);
        sp.residual_floor = (b - f.U * proj).norm();
        sp.data_size = b.size();
        sp.unfiltered = f.size() - k;
        return sp;
    }
};

inline Vector filter_factors(const FilterSpectrum& sp, double mu)
{
    const double mu2 = mu * mu;
    return sp.gamma.unaryExpr([mu2](double g) {
        const double g2 = g * g;
        return g2 + mu2 > 0.0 ? g2 / (g2 + mu2) : 0.0;
    });
}

inline double residual_norm(const FilterSpectrum& sp, double mu)
{
    const double mu2 = mu * mu;
    double acc = sp.residual_floor * sp.residual_floor;
    for (Index i = 0; i < sp.size(); ++i) {
        const double g2 = sp.gamma(i) * sp.gamma(i);
        const double damp = g2 + mu2 > 0.0 ? mu2 / (g2 + mu2) : 1.0;
        acc += (damp * sp.beta(i)) * (damp * sp.beta(i));
    }
    return std::sqrt(acc);
}

inline double solution_seminorm(const FilterSpectrum& sp, double mu)
{
    const double mu2 = mu * mu;
    double acc = 0.0;
    for (Index i = 0; i < sp.size(); ++i) {
        const double g = sp.gamma(i);
        if (g == 0.0)
            continue;
        const double coef = sp.scale(i) * g * sp.beta(i) / (g * g + mu2);
        acc += coef * coef;
    }
    return std::sqrt(acc);
}

/// G(mu) = |residual|^2 / (m - unfiltered - sum f_i)^2.
/// The degrees of freedom are accumulated as sum (1 - f_i) to avoid cancellation at small mu.
inline double gcv(const FilterSpectrum& sp, double mu)
{
    const double mu2 = mu * mu;
    double dof = static_cast<double>(sp.data_size - sp.unfiltered - sp.size());
    for (Index i = 0; i < sp.size(); ++i) {
        const double g2 = sp.gamma(i) * sp.gamma(i);
        dof += g2 + mu2 > 0.0 ? mu2 / (g2 + mu2) : 1.0;
    }
    if (!(dof > 0.0))
        return std::numeric_limits<double>::infinity();
    const double r = residual_norm(sp, mu);
    return r * r / (dof * dof);
}

constexpr Index kGridPoints = 300;

/// 300 logarithmically spaced points on [1e-10 gamma_max, 10 gamma_max].
inline std::vector<double> mu_grid(const FilterSpectrum& sp, Index points = kGridPoints)
{
    if (points < 3)
        throw std::invalid_argument("mu_grid: need at least 3 points");
    const double gmax = sp.gamma_max();
    if (!(gmax > 0.0))
        throw std::invalid_argument("mu_grid: all gamma are zero");
    const double lo = std::log(1e-10 * gmax);
    const double hi = std::log(10.0 * gmax);
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (Index k = 0; k < points; ++k)
        grid[static_cast<std::size_t>(k)] = std::exp(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1));
    return grid;
}

namespace detail {

// Golden-section minimization of fn(exp(t)) for t in [a, b].
template <class Fn>
double golden_log(Fn&& fn, double a, double b, int iters = 80)
{
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = fn(std::exp(x1));
    double f2 = fn(std::exp(x2));
    for (int it = 0; it < iters && b - a > 1e-12; ++it) {
        if (f1 <= f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = fn(std::exp(x1));
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = fn(std::exp(x2));
        }
    }
    return std::exp(f1 <= f2 ? x1 : x2);
}

} // namespace detail

inline double gcv_select(const FilterSpectrum& sp)
{
    sp.validate("gcv_select");
    const std::vector<double> grid = mu_grid(sp);
    const auto G = [&](double mu) { return gcv(sp, mu); };

    std::size_t best = 0;
    double gbest = G(grid[0]);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double g = G(grid[k]);
        if (g < gbest) {
            gbest = g;
            best = k;
        }
    }
    if (!std::isfinite(gbest))
        throw std::runtime_error("gcv_select: GCV function is not finite anywhere on the grid");

    const std::size_t lo = best == 0 ? 0 : best - 1;
    const std::size_t hi = std::min(best + 1, grid.size() - 1);
    const double refined = detail::golden_log(G, std::log(grid[lo]), std::log(grid[hi]));
    return G(refined) <= gbest ? refined : grid[best];
}

/// mu with |residual(mu)| = tau * eps to 1% relative, by bisection in log mu.
inline double discrepancy_select(const FilterSpectrum& sp, double eps, double tau = 1.0)
{
    sp.validate("discrepancy_select");
    if (!(eps > 0.0) || !(tau > 0.0))
        throw std::invalid_argument("discrepancy_select: eps and tau must be positive");
    const double target = tau * eps;
    const double rmin = residual_norm(sp, 0.0);
    const double rmax = std::sqrt(sp.residual_floor * sp.residual_floor + sp.beta.squaredNorm());
    if (!(target > rmin) || !(target < rmax))
        throw std::runtime_error("discrepancy_select: target residual " + std::to_string(target)
                                 + " is unattainable, residual ranges over (" + std::to_string(rmin) + ", "
                                 + std::to_string(rmax) + ")");

    const double gmax = sp.gamma_max();
    double a = std::log(1e-10 * gmax);
    double b = std::log(10.0 * gmax);
    while (residual_norm(sp, std::exp(a)) > target && a > -745.0)
        a -= 10.0;
    while (residual_norm(sp, std::exp(b)) < target && b < 709.0)
        b += 10.0;

    double mid = 0.5 * (a + b);
    for (int it = 0; it < 400; ++it) {
        mid = 0.5 * (a + b);
        const double r = residual_norm(sp, std::exp(mid));
        if (std::abs(r - target) <= 1e-4 * target)
            break;
        (r < target ? a : b) = mid;
    }
    return std::exp(mid);
}

/// Corner of (log |residual|, log |seminorm|): maximum signed curvature over the grid.
inline double lcurve_select(const FilterSpectrum& sp)
{
    sp.validate("lcurve_select");
    std::vector<double> distinct;
    for (Index i = 0; i < sp.size(); ++i) {
        const double g = sp.gamma(i);
        if (g <= 0.0)
            continue;
        bool seen = false;
        for (double d : distinct)
            seen = seen || std::abs(d - g) <= 1e-12 * std::max(d, g);
        if (!seen)
            distinct.push_back(g);
    }
    if (distinct.size() < 2)
        throw std::runtime_error("lcurve_select: fewer than two distinct nonzero gamma, the L-curve has no corner");

    const std::vector<double> grid = mu_grid(sp);
    const std::size_t N = grid.size();
    std::vector<double> x(N), y(N);
    for (std::size_t k = 0; k < N; ++k) {
        x[k] = std::log(residual_norm(sp, grid[k]));
        y[k] = std::log(solution_seminorm(sp, grid[k]));
    }
    const double h = std::log(grid[1]) - std::log(grid[0]);

    double kbest = -std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::size_t k = 1; k + 1 < N; ++k) {
        const double dx = (x[k + 1] - x[k - 1]) / (2 * h);
        const double dy = (y[k + 1] - y[k - 1]) / (2 * h);
        const double ddx = (x[k + 1] - 2 * x[k] + x[k - 1]) / (h * h);
        const double ddy = (y[k + 1] - 2 * y[k] + y[k - 1]) / (h * h);
        const double speed = dx * dx + dy * dy;
        if (!(speed > 0.0) || !std::isfinite(speed))
            continue;
        const double kappa = (dx * ddy - ddx * dy) / std::pow(speed, 1.5);
        if (std::isfinite(kappa) && kappa > kbest) {
            kbest = kappa;
            best = k;
        }
    }
    if (!(kbest > 0.0))
        throw std::runtime_error("lcurve_select: curve is flat or concave everywhere (max curvature "
                                 + std::to_string(kbest) + ")");
    return grid[best];
}

enum class ParameterRule { gcv, lcurve, discrepancy };

inline std::string to_string(ParameterRule r)
{
    switch (r) {
    case ParameterRule::gcv: return "gcv";
    case ParameterRule::lcurve: return "lcurve";
    case ParameterRule::discrepancy: return "discrepancy";
    }
    return "?";
}

inline ParameterRule parse_rule(const std::string& s)
{
    if (s == "gcv") return ParameterRule::gcv;
    if (s == "lcurve" || s == "l-curve") return ParameterRule::lcurve;
    if (s == "discrepancy" || s == "dp") return ParameterRule::discrepancy;
    throw std::invalid_argument("unknown parameter rule '" + s + "' (expected gcv, lcurve or discrepancy)");
}

/// Dispatch; eps is only used by the discrepancy rule.
inline double select_parameter(const FilterSpectrum& sp, ParameterRule rule, double eps = 0.0, double tau = 1.0)
{
    switch (rule) {
    case ParameterRule::gcv: return gcv_select(sp);
    case ParameterRule::lcurve: return lcurve_select(sp);
    case ParameterRule::discrepancy: return discrepancy_select(sp, eps, tau);
    }
    throw std::logic_error("select_parameter: unhandled rule");
}

} // namespace regusolve
