#pragma once

// Benchmark harness: generate a problem, perturb the data, factorize with one
// of four methods, choose mu, solve and time each phase.

#include "regusolve/csv.hpp"
#include "regusolve/gsvdreg.hpp"
#include "regusolve/matcore.hpp"
#include "regusolve/paramsel.hpp"
#include "regusolve/problems.hpp"
#include "regusolve/rsvd.hpp"
#include "regusolve/transform.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace regusolve {

enum class Method {
    csvd,      // SVD of A, L = I
    cgsvd,     // full GSVD of (A, L)
    rgsvd,     // GSVD of the sketched pair
    rsvd_std,  // standard-form transformation, then RSVD of K
};

inline std::string to_string(Method m)
{
    switch (m) {
    case Method::csvd: return "csvd";
    case Method::cgsvd: return "cgsvd";
    case Method::rgsvd: return "rgsvd";
    case Method::rsvd_std: return "rsvd_std";
    }
    return "?";
}

inline Method parse_method(const std::string& s)
{
    if (s == "csvd") return Method::csvd;
    if (s == "cgsvd") return Method::cgsvd;
    if (s == "rgsvd") return Method::rgsvd;
    if (s == "rsvd_std" || s == "rsvd-std") return Method::rsvd_std;
    throw std::invalid_argument("unknown method '" + s + "' (expected csvd, cgsvd, rgsvd or rsvd_std)");
}

struct SolverOptions
{
    Method method = Method::cgsvd;
    ParameterRule rule = ParameterRule::gcv;
    double eps = 0.0;  // noise norm for the discrepancy rule
    double tau = 1.0;
    SketchConfig sketch;
    std::vector<Vector> augment;
    std::optional<double> fixed_mu;  // skips parameter selection
};

struct PhaseTimes
{
    double factor = 0.0;
    double select = 0.0;
    double solve = 0.0;
    double total() const { return factor + select + solve; }
};

struct SolveOutcome
{
    Vector x;
    double mu = 0.0;
    PhaseTimes times;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class Factor, class Spectrum, class Solve>
SolveOutcome timed_pipeline(const SolverOptions& opt, Factor&& factor, Spectrum&& spectrum, Solve&& solve)
{
    SolveOutcome out;
    auto t0 = Clock::now();
    auto fac = factor();
    out.times.factor = seconds_since(t0);

    t0 = Clock::now();
    if (opt.fixed_mu) {
        out.mu = *opt.fixed_mu;
    } else {
        const FilterSpectrum sp = spectrum(fac);
        out.mu = select_parameter(sp, opt.rule, opt.eps, opt.tau);
    }
    out.times.select = seconds_since(t0);

    t0 = Clock::now();
    out.x = solve(fac, out.mu);
    out.times.solve = seconds_since(t0);
    return out;
}

} // namespace detail

/// Full factor / select / solve pipeline for one right-hand side.
/// L is ignored by csvd.
inline SolveOutcome solve_regularized(const Matrix& A, const Matrix& L, const Vector& b, const SolverOptions& opt)
{
    if (opt.fixed_mu && !(*opt.fixed_mu >= 0.0))
        throw std::invalid_argument("solve_regularized: mu must be nonnegative");

    switch (opt.method) {
    case Method::csvd:
        return detail::timed_pipeline(
            opt, [&] { return svd(A); },
            [&](const SvdFactorization& f) { return FilterSpectrum::from_svd(f, b); },
            [&](const SvdFactorization& f, double mu) { return tikhonov_filtered(f, b, mu); });

    case Method::cgsvd:
        return detail::timed_pipeline(
            opt, [&] { return gsvd(A, L); },
            [&](const GsvdFactorization& f) { return FilterSpectrum::from_gsvd(f, b); },
            [&](const GsvdFactorization& f, double mu) { return cgsvd_tikhonov(f, b, mu); });

    case Method::rgsvd:
        return detail::timed_pipeline(
            opt, [&] { return rgsvd(A, L, opt.sketch, opt.augment); },
            [&](const RgsvdFactors& f) { return FilterSpectrum::from_gsvd(f.inner, b); },
            [&](const RgsvdFactors& f, double mu) { return rgsvd_tikhonov(f, b, mu); });

    case Method::rsvd_std: {
        struct Factors
        {
            StandardFormSystem sys;
            Vector rhs;  // b minus the part fitted exactly through N(L)
            SvdFactorization svd;
        };
        return detail::timed_pipeline(
            opt,
            [&] {
                Factors f;
                f.sys = to_standard_form(A, L, b);
                f.rhs = b - A * f.sys.back_offset;
                f.svd = rsvd(f.sys.K, opt.sketch);
                drop_noise(f.svd, f.sys);
                return f;
            },
            [&](const Factors& f) {
                FilterSpectrum sp = FilterSpectrum::from_svd(f.svd, f.rhs);
                sp.unfiltered = f.sys.null_rank;
                return sp;
            },
            [&](const Factors& f, double mu) { return back_map(f.sys, tikhonov_filtered(f.svd, f.rhs, mu)); });
    }
    }
    throw std::logic_error("solve_regularized: unhandled method");
}

//
// Bench configuration and records
//

struct BenchConfig
{
    std::string problem = "shaw";
    ProblemParams params;
    Index n = 1000;
    OperatorKind op = OperatorKind::d2;
    Method method = Method::rgsvd;
    double delta = 1e-4;
    Index sample_size = 50;
    Index power_iterations = 0;
    std::uint64_t seed_noise = 42;
    std::uint64_t seed_sketch = 7;
    ParameterRule rule = ParameterRule::gcv;
    double tau = 1.0;
    Index reps = 10;
    bool augment_constant = false;
    std::optional<double> fixed_mu;

    void validate() const
    {
        if (n < 8)
            throw std::invalid_argument("bench: n = " + std::to_string(n) + " is too small (need n >= 8)");
        if (reps < 1)
            throw std::invalid_argument("bench: reps must be at least 1");
        if (!(delta >= 0.0))
            throw std::invalid_argument("bench: delta must be nonnegative");
        if (method == Method::csvd && op != OperatorKind::identity)
            throw std::invalid_argument("bench: method csvd requires operator identity");
        if ((method == Method::rgsvd || method == Method::rsvd_std) && (sample_size < 1 || sample_size > n))
            throw std::invalid_argument("bench: sample size l = " + std::to_string(sample_size) + " outside [1, "
                                        + std::to_string(n) + "]");
        if (rule == ParameterRule::discrepancy && delta == 0.0 && !fixed_mu)
            throw std::invalid_argument("bench: the discrepancy rule needs delta > 0");
    }

    std::string describe() const
    {
        std::ostringstream os;
        os << "problem=" << problem << " n=" << n << " method=" << to_string(method) << " operator="
           << to_string(op) << " delta=" << delta << " l=" << sample_size << " seed_noise=" << seed_noise
           << " seed_sketch=" << seed_sketch << " rule=" << to_string(rule);
        return os.str();
    }
};

/// Per-problem defaults: operator, sample size and constant-mode augmentation.
struct Preset
{
    OperatorKind op = OperatorKind::d2;
    Index sample_size = 50;
    bool augment_constant = false;
};

inline Preset preset_for(const std::string& problem, Index n, const ProblemParams& params)
{
    Preset p;
    if (problem == "i_laplace" || problem == "ilaplace") {
        if (params.example == 2 || params.example == 4) {
            p.op = OperatorKind::d1;
            p.augment_constant = true;
            p.sample_size = std::max<Index>(1, (3 * n) / 10);  // 150, 300, 600 at n = 500, 1000, 2000
        } else {
            p.op = OperatorKind::d2;
        }
    }
    return p;
}

struct BenchRecord
{
    std::string problem;
    Index n = 0;
    std::string method;
    std::string op;
    Index l = 0;
    std::uint64_t seed_noise = 0;
    std::uint64_t seed_sketch = 0;
    double mu = 0.0;
    double rel_err = 0.0;
    double t_factor = 0.0;
    double t_select = 0.0;
    double t_solve = 0.0;
    double t_total = 0.0;
    std::string timestamp;
};

struct CaseResult
{
    BenchRecord record;
    Vector x;
    Vector x_exact;
};

inline std::string utc_timestamp()
{
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

/// One repetition with the seeds stored in cfg. Timings cover factorization,
/// parameter choice and the final solve; problem generation and noise are excluded.
inline CaseResult run_case_detailed(const BenchConfig& cfg)
{
    try {
        cfg.validate();
        const InverseProblem prob = generate(cfg.problem, cfg.n, cfg.params);
        const Vector b = add_noise(prob.b_exact, {cfg.delta, cfg.seed_noise});
        const Matrix L = cfg.method == Method::csvd ? Matrix::Identity(cfg.n, cfg.n)
                                                    : derivative_operator(cfg.op, cfg.n).matrix;

        SolverOptions opt;
        opt.method = cfg.method;
        opt.rule = cfg.rule;
        opt.eps = cfg.delta * prob.b_exact.norm();
        opt.tau = cfg.tau;
        opt.sketch = {cfg.sample_size, cfg.seed_sketch, cfg.power_iterations};
        opt.fixed_mu = cfg.fixed_mu;
        if (cfg.augment_constant && cfg.method == Method::rgsvd)
            opt.augment.push_back(Vector::Ones(cfg.n));

        const SolveOutcome out = solve_regularized(prob.A, L, b, opt);

        CaseResult res;
        BenchRecord& r = res.record;
        r.problem = prob.name;
        r.n = cfg.n;
        r.method = to_string(cfg.method);
        r.op = cfg.method == Method::csvd ? to_string(OperatorKind::identity) : to_string(cfg.op);
        const bool sketched = cfg.method == Method::rgsvd || cfg.method == Method::rsvd_std;
        r.l = sketched ? cfg.sample_size : 0;
        r.seed_noise = cfg.seed_noise;
        r.seed_sketch = cfg.seed_sketch;
        r.mu = out.mu;
        r.rel_err = relative_error(out.x, prob.x_exact);
        r.t_factor = out.times.factor;
        r.t_select = out.times.select;
        r.t_solve = out.times.solve;
        r.t_total = out.times.total();
        r.timestamp = utc_timestamp();
        res.x = out.x;
        res.x_exact = prob.x_exact;
        return res;
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string(e.what()) + " [" + cfg.describe() + "]");
    }
}

inline BenchRecord run_case(const BenchConfig& cfg)
{
    return run_case_detailed(cfg).record;
}

/// cfg.reps repetitions; repetition r uses seeds (seed_noise + r, seed_sketch + r).
inline std::vector<BenchRecord> run_bench(const BenchConfig& cfg)
{
    std::vector<BenchRecord> out;
    out.reserve(static_cast<std::size_t>(cfg.reps));
    for (Index r = 0; r < cfg.reps; ++r) {
        BenchConfig c = cfg;
        c.seed_noise = cfg.seed_noise + static_cast<std::uint64_t>(r);
        c.seed_sketch = cfg.seed_sketch + static_cast<std::uint64_t>(r);
        out.push_back(run_case(c));
    }
    return out;
}

//
// Tables
//

inline const std::vector<std::string>& record_columns()
{
    static const std::vector<std::string> cols = {"problem", "n", "method", "operator", "l",
                                                  "seed_noise", "seed_sketch", "mu", "rel_err",
                                                  "t_factor", "t_select", "t_solve", "t_total"};
    return cols;
}

inline double median(std::vector<double> v)
{
    if (v.empty())
        throw std::invalid_argument("median of an empty set");
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

namespace detail {

inline std::string sci(double v, int digits = 3)
{
    std::ostringstream os;
    os << std::scientific << std::setprecision(digits - 1) << v;
    return os.str();
}

inline std::string emit_csv(const std::vector<BenchRecord>& records)
{
    std::ostringstream os;
    const auto& cols = record_columns();
    for (std::size_t k = 0; k < cols.size(); ++k)
        os << (k ? "," : "") << cols[k];
    os << '\n';
    using csv::format_double;
    for (const auto& r : records) {
        os << r.problem << ',' << r.n << ',' << r.method << ',' << r.op << ',' << r.l << ',' << r.seed_noise << ','
           << r.seed_sketch << ',' << format_double(r.mu) << ',' << format_double(r.rel_err) << ','
           << format_double(r.t_factor) << ',' << format_double(r.t_select) << ',' << format_double(r.t_solve)
           << ',' << format_double(r.t_total) << '\n';
    }
    return os.str();
}

// Rows are (problem, n); each method contributes a T(s) / mu / err column group
// holding medians over its records.
inline std::string emit_markdown(const std::vector<BenchRecord>& records)
{
    std::vector<std::string> labels;
    std::map<std::string, std::vector<std::string>> ops_of;
    for (const auto& r : records)
        ops_of[r.method].push_back(r.op);
    auto label_of = [&](const BenchRecord& r) {
        auto ops = ops_of[r.method];
        const bool mixed = std::any_of(ops.begin(), ops.end(), [&](const std::string& o) { return o != ops.front(); });
        return mixed ? r.method + " (" + r.op + ")" : r.method;
    };
    for (const auto& r : records) {
        const std::string lab = label_of(r);
        if (std::find(labels.begin(), labels.end(), lab) == labels.end())
            labels.push_back(lab);
    }

    using Key = std::pair<std::string, Index>;
    std::vector<Key> rows;
    std::map<std::pair<Key, std::string>, std::vector<const BenchRecord*>> cells;
    for (const auto& r : records) {
        const Key key{r.problem, r.n};
        if (std::find(rows.begin(), rows.end(), key) == rows.end())
            rows.push_back(key);
        cells[{key, label_of(r)}].push_back(&r);
    }

    std::ostringstream os;
    os << "| problem | n |";
    for (const auto& lab : labels)
        os << ' ' << lab << " T(s) | " << lab << " mu | " << lab << " err |";
    os << "\n|---|---:|";
    for (std::size_t k = 0; k < labels.size(); ++k)
        os << "---:|---:|---:|";
    os << '\n';
    for (const auto& key : rows) {
        os << "| " << key.first << " | " << key.second << " |";
        for (const auto& lab : labels) {
            const auto it = cells.find({key, lab});
            if (it == cells.end()) {
                os << " - | - | - |";
                continue;
            }
            std::vector<double> t, mu, err;
            for (const BenchRecord* r : it->second) {
                t.push_back(r->t_total);
                mu.push_back(r->mu);
                err.push_back(r->rel_err);
            }
            os << ' ' << sci(median(t)) << " | " << sci(median(mu)) << " | " << sci(median(err)) << " |";
        }
        os << '\n';
    }
    return os.str();
}

} // namespace detail

/// format is "csv" or "md".
inline std::string emit_table(const std::vector<BenchRecord>& records, const std::string& format)
{
    if (format.empty())
        throw std::invalid_argument("emit_table: empty format (expected csv or md)");
    if (records.empty())
        throw std::invalid_argument("emit_table: no records");
    if (format == "csv")
        return detail::emit_csv(records);
    if (format == "md" || format == "markdown")
        return detail::emit_markdown(records);
    throw std::invalid_argument("emit_table: unknown format '" + format + "' (expected csv or md)");
}

/// Reads records written by emit_table(..., "csv"). Columns are located by header name.
inline std::vector<BenchRecord> parse_records(std::istream& in, const std::string& origin = "<input>")
{
    std::string line;
    std::vector<std::string> header;
    std::vector<BenchRecord> out;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = csv::trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto fields = csv::split(t);
        if (header.empty()) {
            header = fields;
            for (const auto& col : record_columns())
                if (std::find(header.begin(), header.end(), col) == header.end())
                    throw std::runtime_error(origin + ": missing column '" + col + "'");
            continue;
        }
        if (fields.size() != header.size())
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": expected "
                                     + std::to_string(header.size()) + " fields");
        std::map<std::string, std::string> row;
        for (std::size_t k = 0; k < header.size(); ++k)
            row[csv::trim(header[k])] = csv::trim(fields[k]);
        auto num = [&](const std::string& col) {
            double v = 0.0;
            if (!csv::parse_double(row[col], v))
                throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": bad value for " + col);
            return v;
        };
        auto integer = [&](const std::string& col) -> std::uint64_t {
            try {
                std::size_t used = 0;
                const auto v = std::stoull(row[col], &used);
                if (used != row[col].size())
                    throw std::invalid_argument(col);
                return v;
            } catch (const std::exception&) {
                throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": bad integer for " + col);
            }
        };
        BenchRecord r;
        r.problem = row["problem"];
        r.n = static_cast<Index>(integer("n"));
        r.method = row["method"];
        r.op = row["operator"];
        r.l = static_cast<Index>(integer("l"));
        r.seed_noise = integer("seed_noise");
        r.seed_sketch = integer("seed_sketch");
        r.mu = num("mu");
        r.rel_err = num("rel_err");
        r.t_factor = num("t_factor");
        r.t_select = num("t_select");
        r.t_solve = num("t_solve");
        r.t_total = num("t_total");
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace regusolve
