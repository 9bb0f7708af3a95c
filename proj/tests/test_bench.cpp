#include <regusolve/bench.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace regusolve;

namespace {

BenchRecord record(const std::string& method, const std::string& op, double t, double mu, double err)
{
    BenchRecord r;
    r.problem = "shaw";
    r.n = 1000;
    r.method = method;
    r.op = op;
    r.l = method == "rgsvd" ? 50 : 0;
    r.seed_noise = 42;
    r.seed_sketch = 7;
    r.mu = mu;
    r.rel_err = err;
    r.t_factor = t / 2;
    r.t_select = t / 4;
    r.t_solve = t / 4;
    r.t_total = t;
    return r;
}

BenchConfig small(Method m, const std::string& problem = "shaw")
{
    BenchConfig cfg;
    cfg.problem = problem;
    cfg.n = 64;
    cfg.method = m;
    cfg.op = m == Method::csvd ? OperatorKind::identity : OperatorKind::d2;
    cfg.sample_size = 20;
    cfg.reps = 3;
    return cfg;
}

} // namespace

TEST(Bench, CsvRoundTrip)
{
    std::vector<BenchRecord> recs = {record("cgsvd", "d2", 1.5, 0.334, 1.89e-2),
                                     record("rgsvd", "d2", 1.0 / 3.0, 0.1234567890123, 2e-2)};
    const std::string text = emit_table(recs, "csv");
    EXPECT_EQ(text.substr(0, text.find('\n')),
              "problem,n,method,operator,l,seed_noise,seed_sketch,mu,rel_err,t_factor,t_select,t_solve,t_total");
    std::istringstream in(text);
    const auto back = parse_records(in);
    ASSERT_EQ(back.size(), 2u);
    for (std::size_t k = 0; k < 2; ++k) {
        EXPECT_EQ(back[k].method, recs[k].method);
        EXPECT_EQ(back[k].l, recs[k].l);
        EXPECT_EQ(back[k].mu, recs[k].mu);
        EXPECT_EQ(back[k].rel_err, recs[k].rel_err);
        EXPECT_EQ(back[k].t_total, recs[k].t_total);
    }
}

TEST(Bench, ParseRejectsMissingColumn)
{
    std::istringstream in("problem,n,method\nshaw,10,cgsvd\n");
    EXPECT_THROW(parse_records(in), std::runtime_error);
}

TEST(Bench, MarkdownLayoutHasOneGroupPerMethod)
{
    std::vector<BenchRecord> recs;
    for (const char* m : {"csvd", "cgsvd", "rgsvd"})
        for (double t : {1.0, 2.0, 3.0})
            recs.push_back(record(m, std::string(m) == "csvd" ? "identity" : "d2", t, 0.5, 0.01 * t));
    const std::string md = emit_table(recs, "md");
    std::istringstream in(md);
    std::string header, sep, row, extra;
    std::getline(in, header);
    std::getline(in, sep);
    std::getline(in, row);
    EXPECT_FALSE(std::getline(in, extra) && !extra.empty());
    for (const char* m : {"csvd", "cgsvd", "rgsvd"}) {
        EXPECT_NE(header.find(std::string(m) + " T(s)"), std::string::npos);
        EXPECT_NE(header.find(std::string(m) + " mu"), std::string::npos);
        EXPECT_NE(header.find(std::string(m) + " err"), std::string::npos);
    }
    EXPECT_EQ(std::count(header.begin(), header.end(), '|'), 2 + 1 + 9);
    // medians: T = 2, err = 0.02
    EXPECT_NE(row.find("2.00e+00"), std::string::npos);
    EXPECT_NE(row.find("2.00e-02"), std::string::npos);
}

TEST(Bench, MarkdownLabelsMixedOperators)
{
    std::vector<BenchRecord> recs = {record("cgsvd", "d1", 1, 1, 1), record("cgsvd", "d2", 1, 1, 1)};
    const std::string md = emit_table(recs, "md");
    EXPECT_NE(md.find("cgsvd (d1) T(s)"), std::string::npos);
    EXPECT_NE(md.find("cgsvd (d2) T(s)"), std::string::npos);
}

TEST(Bench, TableFormatErrors)
{
    const std::vector<BenchRecord> recs = {record("cgsvd", "d2", 1, 1, 1)};
    EXPECT_THROW(emit_table(recs, ""), std::invalid_argument);
    EXPECT_THROW(emit_table(recs, "xml"), std::invalid_argument);
    EXPECT_THROW(emit_table({}, "csv"), std::invalid_argument);
}

TEST(Bench, Median)
{
    EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
    EXPECT_DOUBLE_EQ(median({4, 1, 2, 3}), 2.5);
    EXPECT_THROW(median({}), std::invalid_argument);
}

// Exact recovery needs cond(A) * eps well below the tolerance, so the sweep
// covers the sizes where each problem is still that well conditioned.
TEST(Bench, NoiselessZeroMuRecoversSolution)
{
    const std::vector<std::pair<std::string, Index>> cases = {
        {"phillips", 8}, {"phillips", 16}, {"phillips", 32}, {"phillips", 64}, {"gravity", 8},
        {"gravity", 16}, {"gravity", 32}, {"shaw", 8}, {"heat", 8}, {"foxgood", 8}};
    for (const auto& [name, n] : cases)
        for (OperatorKind op : {OperatorKind::identity, OperatorKind::d1, OperatorKind::d2}) {
            BenchConfig cfg = small(Method::cgsvd, name);
            cfg.n = n;
            cfg.op = op;
            cfg.delta = 0.0;
            cfg.fixed_mu = 0.0;
            const BenchRecord r = run_case(cfg);
            EXPECT_EQ(r.mu, 0.0);
            EXPECT_LE(r.rel_err, 1e-6) << name << " n=" << n << " " << to_string(op);
        }
}

TEST(Bench, DeterministicExceptTiming)
{
    const BenchConfig cfg = small(Method::rgsvd);
    const auto a = run_bench(cfg), b = run_bench(cfg);
    ASSERT_EQ(a.size(), 3u);
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].mu, b[k].mu);
        EXPECT_EQ(a[k].rel_err, b[k].rel_err);
        EXPECT_EQ(a[k].seed_noise, 42 + k);
        EXPECT_EQ(a[k].seed_sketch, 7 + k);
        EXPECT_GE(a[k].t_total, 0.0);
        EXPECT_NEAR(a[k].t_total, a[k].t_factor + a[k].t_select + a[k].t_solve, 1e-12);
    }
}

TEST(Bench, ValidationErrors)
{
    BenchConfig cfg = small(Method::csvd);
    cfg.op = OperatorKind::d2;
    EXPECT_THROW(run_case(cfg), std::runtime_error);
    cfg = small(Method::rgsvd);
    cfg.sample_size = 65;
    EXPECT_THROW(run_case(cfg), std::runtime_error);
    cfg = small(Method::cgsvd);
    cfg.rule = ParameterRule::discrepancy;
    cfg.delta = 0.0;
    EXPECT_THROW(run_case(cfg), std::runtime_error);
    cfg = small(Method::cgsvd);
    cfg.n = 4;
    EXPECT_THROW(run_case(cfg), std::runtime_error);
    try {
        cfg = small(Method::cgsvd);
        cfg.problem = "nope";
        run_case(cfg);
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("problem=nope"), std::string::npos);
    }
}

TEST(Bench, AllMethodsAndRulesRun)
{
    for (Method m : {Method::csvd, Method::cgsvd, Method::rgsvd, Method::rsvd_std})
        for (ParameterRule rule : {ParameterRule::gcv, ParameterRule::discrepancy, ParameterRule::lcurve}) {
            BenchConfig cfg = small(m, "phillips");
            cfg.rule = rule;
            cfg.delta = 1e-2;
            cfg.reps = 1;
            const BenchRecord r = run_case(cfg);
            EXPECT_GT(r.mu, 0.0) << to_string(m) << " " << to_string(rule);
            EXPECT_LT(r.rel_err, 1.0) << to_string(m) << " " << to_string(rule);
        }
}

TEST(Bench, RsvdStdMatchesRgsvdOnFullSample)
{
    // With a full sketch both randomized paths reduce to exact Tikhonov.
    BenchConfig a = small(Method::rsvd_std, "gravity"), b = small(Method::cgsvd, "gravity");
    a.sample_size = 62;  // rank of K for d2 at n = 64
    a.fixed_mu = b.fixed_mu = 1e-2;
    EXPECT_NEAR(run_case(a).rel_err, run_case(b).rel_err, 1e-6);
}

TEST(Bench, Presets)
{
    ProblemParams pp;
    pp.example = 2;
    const Preset p = preset_for("i_laplace", 1000, pp);
    EXPECT_EQ(p.op, OperatorKind::d1);
    EXPECT_EQ(p.sample_size, 300);
    EXPECT_TRUE(p.augment_constant);
    const Preset q = preset_for("shaw", 1000, {});
    EXPECT_EQ(q.op, OperatorKind::d2);
    EXPECT_EQ(q.sample_size, 50);
    EXPECT_FALSE(q.augment_constant);
}

TEST(Bench, MethodNames)
{
    for (Method m : {Method::csvd, Method::cgsvd, Method::rgsvd, Method::rsvd_std})
        EXPECT_EQ(parse_method(to_string(m)), m);
    EXPECT_THROW(parse_method("svd"), std::invalid_argument);
}
