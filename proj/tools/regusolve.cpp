// regusolve: command-line front end.
//
//   regusolve bench    --problem shaw --n 1000 --method rgsvd --reps 10 --format csv --out r.csv
//   regusolve solve    --A A.csv --b xb.csv --b-column b_exact --operator d2 --method cgsvd --out x.csv
//   regusolve table    r1.csv r2.csv --out table.md
//   regusolve generate --problem heat --n 500 --dir out/
//
// Every subcommand also reads plain key=value files through --config.

#include "regusolve/regusolve.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace rs = regusolve;

namespace {

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << text;
}

struct BenchArgs
{
    std::string problem = "shaw";
    int example = 1;
    double depth = 0.25;
    long n = 1000;
    std::string op;  // empty: preset
    std::string method = "rgsvd";
    double delta = 1e-4;
    long sample_size = 0;  // 0: preset
    long power_iterations = 0;
    std::uint64_t seed_noise = 42;
    std::uint64_t seed_sketch = 7;
    std::string rule = "gcv";
    double tau = 1.0;
    long reps = 10;
    std::string augment = "auto";
    std::optional<double> mu;
    std::string format = "csv";
    std::string out;
    std::string solution_out;
};

int run_bench(const BenchArgs& a)
{
    rs::BenchConfig cfg;
    cfg.problem = a.problem;
    cfg.params.example = a.example;
    cfg.params.depth = a.depth;
    cfg.n = a.n;
    cfg.method = rs::parse_method(a.method);

    const rs::Preset preset = rs::preset_for(a.problem, a.n, cfg.params);
    cfg.op = a.op.empty() ? preset.op : rs::parse_operator(a.op);
    if (cfg.method == rs::Method::csvd)
        cfg.op = rs::OperatorKind::identity;
    cfg.sample_size = a.sample_size > 0 ? a.sample_size : preset.sample_size;
    if (a.augment == "auto")
        cfg.augment_constant = preset.augment_constant;
    else if (a.augment == "on" || a.augment == "constant")
        cfg.augment_constant = true;
    else if (a.augment == "off" || a.augment == "none")
        cfg.augment_constant = false;
    else
        throw std::invalid_argument("--augment must be auto, on or off");

    cfg.delta = a.delta;
    cfg.power_iterations = a.power_iterations;
    cfg.seed_noise = a.seed_noise;
    cfg.seed_sketch = a.seed_sketch;
    cfg.rule = rs::parse_rule(a.rule);
    cfg.tau = a.tau;
    cfg.reps = a.reps;
    cfg.fixed_mu = a.mu;

    const auto records = rs::run_bench(cfg);
    write_text(a.out, rs::emit_table(records, a.format));

    if (!a.solution_out.empty()) {
        const rs::CaseResult first = rs::run_case_detailed(cfg);
        const Eigen::Index n = first.x.size();
        const rs::Vector t = rs::Vector::LinSpaced(n, 1.0, static_cast<double>(n));
        rs::csv::write_columns(a.solution_out, {"index", "x", "x_exact"}, {t, first.x, first.x_exact});
    }
    return 0;
}

struct SolveArgs
{
    std::string A, b, L;
    std::string b_column;
    std::string op = "identity";
    std::string method = "cgsvd";
    std::string rule = "gcv";
    std::optional<double> mu;
    std::optional<double> eps;
    double tau = 1.0;
    long sample_size = 50;
    long power_iterations = 0;
    std::uint64_t seed_sketch = 7;
    std::string out;
};

int run_solve(const SolveArgs& a)
{
    const rs::Matrix A = rs::csv::read_matrix(a.A);
    const rs::Vector b = a.b_column.empty() ? rs::csv::read_vector(a.b) : rs::csv::read_column(a.b, a.b_column);
    rs::Matrix L;
    if (!a.L.empty())
        L = rs::csv::read_matrix(a.L);
    else
        L = rs::derivative_operator(rs::parse_operator(a.op), A.cols()).matrix;

    rs::SolverOptions opt;
    opt.method = rs::parse_method(a.method);
    opt.rule = rs::parse_rule(a.rule);
    if (opt.rule == rs::ParameterRule::discrepancy && !a.eps && !a.mu)
        throw std::invalid_argument("the discrepancy rule needs --eps (the noise norm)");
    opt.eps = a.eps.value_or(0.0);
    opt.tau = a.tau;
    opt.fixed_mu = a.mu;
    opt.sketch = {a.sample_size, a.seed_sketch, a.power_iterations};

    const rs::SolveOutcome res = rs::solve_regularized(A, L, b, opt);
    std::cerr << "mu = " << rs::csv::format_double(res.mu) << "  t_total = " << res.times.total() << " s\n";
    if (a.out.empty() || a.out == "-")
        rs::csv::write_matrix(std::cout, res.x);
    else
        rs::csv::write_matrix(a.out, res.x);
    return 0;
}

int run_table(const std::vector<std::string>& inputs, const std::string& format, const std::string& out)
{
    std::vector<rs::BenchRecord> all;
    for (const auto& path : inputs) {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open " + path);
        auto recs = rs::parse_records(in, path);
        all.insert(all.end(), recs.begin(), recs.end());
    }
    write_text(out, rs::emit_table(all, format));
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Tikhonov regularization of discrete ill-posed problems via (randomized) GSVD"};
    app.set_config("--config", "", "Read options from a key=value file");
    app.require_subcommand(1);

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "Run a seeded benchmark and emit CSV or Markdown");
    b->add_option("--problem", bench.problem, "shaw, foxgood, gravity, heat, phillips, i_laplace");
    b->add_option("--example", bench.example, "i_laplace variant (1-4)");
    b->add_option("--depth", bench.depth, "gravity source depth");
    b->add_option("--n", bench.n, "problem size")->check(CLI::PositiveNumber);
    b->add_option("--method", bench.method, "csvd, cgsvd, rgsvd, rsvd_std");
    b->add_option("--operator", bench.op, "identity, d1, d2 (default: problem preset)");
    b->add_option("--delta", bench.delta, "relative noise level");
    b->add_option("--sample-size,-l", bench.sample_size, "sketch size l (default: problem preset)");
    b->add_option("--power-iterations", bench.power_iterations, "subspace iterations in the sketch");
    b->add_option("--seed-noise", bench.seed_noise, "noise seed of the first repetition");
    b->add_option("--seed-sketch", bench.seed_sketch, "sketch seed of the first repetition");
    b->add_option("--rule", bench.rule, "gcv, lcurve, discrepancy");
    b->add_option("--tau", bench.tau, "discrepancy safety factor");
    b->add_option("--reps", bench.reps, "repetitions with consecutive seeds")->check(CLI::PositiveNumber);
    b->add_option("--augment", bench.augment, "constant-mode augmentation: auto, on, off");
    b->add_option("--mu", bench.mu, "fixed regularization parameter (skips selection)");
    b->add_option("--format", bench.format, "csv or md");
    b->add_option("--out,-o", bench.out, "output file (default stdout)");
    b->add_option("--solution-out", bench.solution_out, "write x and x_exact of the first repetition as CSV");

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Solve one problem read from CSV files");
    s->add_option("--A", solve.A, "matrix A (CSV)")->required();
    s->add_option("--b", solve.b, "right-hand side (CSV row or column)")->required();
    s->add_option("--b-column", solve.b_column, "read b from this named column of a headed CSV");
    s->add_option("--L", solve.L, "regularization matrix (CSV); overrides --operator");
    s->add_option("--operator", solve.op, "identity, d1, d2");
    s->add_option("--method", solve.method, "csvd, cgsvd, rgsvd, rsvd_std");
    s->add_option("--rule", solve.rule, "gcv, lcurve, discrepancy");
    s->add_option("--mu", solve.mu, "fixed regularization parameter");
    s->add_option("--eps", solve.eps, "noise norm for the discrepancy rule");
    s->add_option("--tau", solve.tau, "discrepancy safety factor");
    s->add_option("--sample-size,-l", solve.sample_size, "sketch size for rgsvd / rsvd_std");
    s->add_option("--power-iterations", solve.power_iterations, "subspace iterations in the sketch");
    s->add_option("--seed-sketch", solve.seed_sketch, "sketch seed");
    s->add_option("--out,-o", solve.out, "solution file (default stdout)");

    std::vector<std::string> table_inputs;
    std::string table_format = "md";
    std::string table_out;
    auto* t = app.add_subcommand("table", "Aggregate bench CSV files into a table of medians");
    t->add_option("inputs", table_inputs, "bench CSV files")->required()->check(CLI::ExistingFile);
    t->add_option("--format", table_format, "md or csv");
    t->add_option("--out,-o", table_out, "output file (default stdout)");

    std::string gen_problem = "shaw";
    long gen_n = 1000;
    int gen_example = 1;
    double gen_depth = 0.25;
    std::string gen_dir = ".";
    auto* g = app.add_subcommand("generate", "Write A.csv and xb.csv (x_exact, b_exact) for a test problem");
    g->add_option("--problem", gen_problem, "problem name");
    g->add_option("--n", gen_n, "problem size")->check(CLI::PositiveNumber);
    g->add_option("--example", gen_example, "i_laplace variant (1-4)");
    g->add_option("--depth", gen_depth, "gravity source depth");
    g->add_option("--dir", gen_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (b->parsed())
            return run_bench(bench);
        if (s->parsed())
            return run_solve(solve);
        if (t->parsed())
            return run_table(table_inputs, table_format, table_out);
        if (g->parsed()) {
            rs::ProblemParams params;
            params.example = gen_example;
            params.depth = gen_depth;
            std::filesystem::create_directories(gen_dir);
            rs::export_csv(rs::generate(gen_problem, gen_n, params), gen_dir);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "regusolve: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
