#include "support/oracles.hpp"

#include <regusolve/csv.hpp>
#include <regusolve/problems.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

using namespace regusolve;

namespace {

Vector midpoints(Index n)
{
    Vector t(n);
    for (Index i = 0; i < n; ++i)
        t(i) = (i + 0.5) / static_cast<double>(n);
    return t;
}

} // namespace

TEST(GaussLaguerre, SmallRuleMatchesClosedForm)
{
    // n = 2: nodes 2 -+ sqrt(2), weights (2 +- sqrt(2)) / 4
    const GaussLaguerre r = gauss_laguerre(2);
    EXPECT_NEAR(r.nodes(0), 2.0 - std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(r.nodes(1), 2.0 + std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(std::exp(r.log_weights(0)), (2.0 + std::sqrt(2.0)) / 4.0, 1e-14);
    EXPECT_NEAR(std::exp(r.log_weights(1)), (2.0 - std::sqrt(2.0)) / 4.0, 1e-14);
}

TEST(GaussLaguerre, WeightsSumToOneAndIntegrateMoments)
{
    for (Index n : {5, 20, 100, 400}) {
        const GaussLaguerre r = gauss_laguerre(n);
        const Vector w = r.log_weights.array().exp();
        EXPECT_NEAR(w.sum(), 1.0, 1e-12) << n;
        // int t^k e^{-t} dt = k!
        EXPECT_NEAR(w.dot(r.nodes), 1.0, 1e-11) << n;
        EXPECT_NEAR(w.dot(r.nodes.array().square().matrix()), 2.0, 1e-10) << n;
        for (Index i = 1; i < n; ++i)
            EXPECT_LT(r.nodes(i - 1), r.nodes(i));
    }
}

TEST(Problems, ShawIsSymmetric)
{
    const InverseProblem p = generate("shaw", 64);
    EXPECT_LE((p.A - p.A.transpose()).norm(), 1e-12 * p.A.norm());
}

TEST(Problems, FoxgoodSolutionIsRamp)
{
    const InverseProblem p = generate("foxgood", 40);
    EXPECT_LE((p.x_exact - midpoints(40)).norm(), 1e-15);
}

TEST(Problems, GravitySolution)
{
    const InverseProblem p = generate("gravity", 32);
    const Vector t = midpoints(32);
    for (Index i = 0; i < 32; ++i)
        EXPECT_NEAR(p.x_exact(i), std::sin(std::numbers::pi * t(i)) + 0.5 * std::sin(2 * std::numbers::pi * t(i)), 1e-15);
    EXPECT_DOUBLE_EQ(p.params.depth, 0.25);
}

TEST(Problems, ILaplaceSolutions)
{
    const GaussLaguerre r = gauss_laguerre(50);
    ProblemParams pp;
    pp.example = 2;
    const InverseProblem p2 = generate("i_laplace", 50, pp);
    for (Index i = 0; i < 50; ++i)
        EXPECT_NEAR(p2.x_exact(i), 1.0 - std::exp(-r.nodes(i) / 2.0), 1e-15);
    pp.example = 4;
    const InverseProblem p4 = generate("i_laplace", 50, pp);
    for (Index i = 0; i < 50; ++i)
        EXPECT_EQ(p4.x_exact(i), r.nodes(i) > 2.0 ? 1.0 : 0.0);
    pp.example = 5;
    EXPECT_THROW(generate("i_laplace", 50, pp), std::invalid_argument);
}

TEST(Problems, HeatIsLowerTriangularToeplitz)
{
    const InverseProblem p = generate("heat", 40);
    EXPECT_LE(p.A.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().norm(), 0.0);
    for (Index i = 1; i < 40; ++i)
        EXPECT_DOUBLE_EQ(p.A(i, i - 1), p.A(1, 0));
}

TEST(Problems, PhillipsSymmetricToeplitzAndSymmetricSolution)
{
    const InverseProblem p = generate("phillips", 64);
    EXPECT_LE((p.A - p.A.transpose()).norm(), 0.0);
    EXPECT_LE((p.x_exact - p.x_exact.reverse()).norm(), 1e-14);
    EXPECT_THROW(generate("phillips", 30), std::invalid_argument);
}

TEST(Problems, ParityAndNameErrors)
{
    EXPECT_THROW(generate("shaw", 31), std::invalid_argument);
    EXPECT_THROW(generate("heat", 31), std::invalid_argument);
    EXPECT_THROW(generate("nope", 32), std::invalid_argument);
    EXPECT_THROW(generate("shaw", 6), std::invalid_argument);
}

TEST(Problems, InvariantsForAllGenerators)
{
    for (const auto& name : problem_names()) {
        const InverseProblem p = generate(name, 100);
        EXPECT_EQ(p.A.rows(), 100);
        EXPECT_EQ(p.A.cols(), 100);
        EXPECT_TRUE(p.A.allFinite()) << name;
        EXPECT_LE((p.b_exact - p.A * p.x_exact).norm(), 1e-12 * p.b_exact.norm()) << name;
        // Determinism: bit-identical regeneration.
        const InverseProblem q = generate(name, 100);
        EXPECT_TRUE((p.A.array() == q.A.array()).all()) << name;
        EXPECT_TRUE((p.x_exact.array() == q.x_exact.array()).all()) << name;
        // Decaying spectrum
        const oracle::Svd f = oracle::jacobi_svd(p.A);
        EXPECT_GE(f.s(0) / f.s(99), 1e6) << name;
    }
}

TEST(Operators, FirstDifference)
{
    const Matrix L = derivative_operator(OperatorKind::d1, 3).matrix;
    Matrix expect(2, 3);
    expect << 1, -1, 0, 0, 1, -1;
    EXPECT_EQ(L, expect);
    EXPECT_LE((derivative_operator(OperatorKind::d1, 9).matrix * Vector::Ones(9)).norm(), 0.0);
}

TEST(Operators, SecondDifference)
{
    const Matrix L = derivative_operator(OperatorKind::d2, 4).matrix;
    Matrix expect(2, 4);
    expect << 1, -2, 1, 0, 0, 1, -2, 1;
    EXPECT_EQ(L, expect);
    const Matrix L9 = derivative_operator(OperatorKind::d2, 9).matrix;
    EXPECT_LE((L9 * Vector::Ones(9)).norm(), 0.0);
    EXPECT_LE((L9 * Vector::LinSpaced(9, 0, 8)).norm(), 0.0);
}

TEST(Operators, IdentityAndErrors)
{
    EXPECT_EQ(derivative_operator(OperatorKind::identity, 4).matrix, Matrix::Identity(4, 4));
    EXPECT_THROW(derivative_operator(OperatorKind::d2, 2), std::invalid_argument);
    EXPECT_EQ(parse_operator("d1"), OperatorKind::d1);
    EXPECT_THROW(parse_operator("d3"), std::invalid_argument);
}

TEST(Noise, ZeroDeltaIsBitwiseIdentity)
{
    const Vector b = Vector::LinSpaced(10, -1, 2);
    const Vector out = add_noise(b, {0.0, 5});
    EXPECT_TRUE((out.array() == b.array()).all());
}

TEST(Noise, RelativeLevelIsExact)
{
    const InverseProblem p = generate("shaw", 64);
    const Vector bd = add_noise(p.b_exact, {1e-4, 42});
    EXPECT_NEAR((bd - p.b_exact).norm() / p.b_exact.norm(), 1e-4, 1e-15);
}

TEST(Noise, SeedDeterminism)
{
    const Vector b = Vector::Ones(20);
    const Vector a1 = add_noise(b, {1e-2, 3}), a2 = add_noise(b, {1e-2, 3}), c = add_noise(b, {1e-2, 4});
    EXPECT_TRUE((a1.array() == a2.array()).all());
    const Vector d1 = a1 - b, d2 = c - b;
    EXPECT_LT(std::abs(d1.dot(d2)) / (d1.norm() * d2.norm()), 0.99);
}

TEST(Noise, RejectsZeroRhsAndNegativeDelta)
{
    EXPECT_THROW(add_noise(Vector::Zero(4), {1e-3, 1}), std::invalid_argument);
    EXPECT_THROW(add_noise(Vector::Ones(4), {-1.0, 1}), std::invalid_argument);
}

TEST(Random, GaussianStreamMoments)
{
    const Vector g = gaussian_vector(200000, 9, RandomStream::sketch);
    EXPECT_NEAR(g.mean(), 0.0, 0.01);
    EXPECT_NEAR(g.squaredNorm() / 200000.0, 1.0, 0.01);
    // Streams differ for the same seed.
    const Vector h = gaussian_vector(8, 9, RandomStream::noise);
    EXPECT_FALSE(h.isApprox(g.head(8)));
}

TEST(Export, CsvRoundTrip)
{
    const auto dir = std::filesystem::temp_directory_path() / "regusolve_export_test";
    const InverseProblem p = generate("gravity", 16);
    export_csv(p, dir);
    const Matrix A = csv::read_matrix((dir / "A.csv").string());
    EXPECT_TRUE((A.array() == p.A.array()).all());
    const Vector x = csv::read_column((dir / "xb.csv").string(), "x_exact");
    const Vector b = csv::read_column((dir / "xb.csv").string(), "b_exact");
    EXPECT_TRUE((x.array() == p.x_exact.array()).all());
    EXPECT_TRUE((b.array() == p.b_exact.array()).all());
    std::filesystem::remove_all(dir);
}
