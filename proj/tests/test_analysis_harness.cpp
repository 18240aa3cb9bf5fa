#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "anet/analysis.hpp"

using namespace anet;

namespace {

const Scalar kTwoPiI(0.0, 2.0 * std::numbers::pi);

} // namespace

TEST(Contour, InverseMonomialsGiveTwoPiI)
{
    for (int k = 1; k <= 3; ++k) {
        const ContourSpec spec{0.0, 1.5, 256};
        const Scalar v = contour_integral([k](Scalar z) { return std::pow(z, -k); }, spec, k);
        EXPECT_LE(std::abs(v - kTwoPiI), 1e-10);
    }
}

TEST(Contour, PolynomialsIntegrateToZero)
{
    for (int k = 1; k <= 3; ++k)
        for (int deg = 0; deg <= 4; ++deg) {
            const ContourSpec spec{0.0, 1.5, 256};
            const Scalar v = contour_integral([deg](Scalar z) { return std::pow(z, deg) + Scalar(0.5, -1.0); }, spec, k);
            EXPECT_LE(std::abs(v), 1e-12) << "k=" << k << " deg=" << deg;
        }
}

TEST(Contour, ResidueOffCenter)
{
    // ∮ 1/(z - c) dz over a circle that contains c.
    const Scalar c(0.3, -0.2);
    const ContourSpec spec{Scalar(0.1, 0.0), 1.0, 256};
    EXPECT_LE(std::abs(contour_integral([c](Scalar z) { return 1.0 / (z - c); }, spec, 1) - kTwoPiI), 1e-10);
    // Pole outside: zero.
    const ContourSpec far{Scalar(3.0, 0.0), 0.5, 256};
    EXPECT_LE(std::abs(contour_integral([c](Scalar z) { return 1.0 / (z - c); }, far, 1)), 1e-12);
}

TEST(Contour, Preconditions)
{
    const auto one = [](Scalar) { return Scalar(1.0); };
    EXPECT_THROW(contour_integral(one, {0.0, 0.0, 256}, 1), std::invalid_argument);
    EXPECT_THROW(contour_integral(one, {0.0, 1.0, 4}, 1), std::invalid_argument);
    EXPECT_THROW(contour_integral([](Scalar z) { return 1.0 / (z - 1.0); }, {0.0, 1.0, 8}, 1), std::domain_error);
}

TEST(Cauchy, ReportShowsObstruction)
{
    std::vector<MPoly> polys;
    for (unsigned d = 0; d <= 4; ++d) polys.push_back(MPoly::monomial(Field::Complex, {d}, Scalar(1.0, 0.5)));
    MPoly real_poly(1, Field::Real);
    real_poly.add_term({2}, -3.0).add_term({0}, 1.0);
    polys.push_back(real_poly);
    for (int k = 1; k <= 3; ++k) {
        const auto rep = cauchy_obstruction_report(k, polys, 0.5, 2.0);
        EXPECT_DOUBLE_EQ(rep.radius, 1.25);
        EXPECT_LE(std::abs(rep.target.integral - kTwoPiI), 1e-10);
        ASSERT_EQ(rep.polys.size(), polys.size());
        for (const auto& row : rep.polys) EXPECT_LE(std::abs(row.integral), 1e-12) << row.label;
        EXPECT_GT(rep.gap(), 2.0 * std::numbers::pi - 1e-9);
    }
    EXPECT_THROW(cauchy_obstruction_report(1, polys, 2.0, 1.0), std::invalid_argument);
    EXPECT_THROW(cauchy_obstruction_report(0, polys, 0.5, 1.0), std::invalid_argument);
}

TEST(Cauchy, Labels)
{
    MPoly p(1, Field::Real);
    p.add_term({0}, 1.0).add_term({2}, -2.5);
    EXPECT_EQ(poly_label(p), "1 + -2.5*z^2");
    EXPECT_EQ(poly_label(MPoly(1, Field::Real)), "0");
    EXPECT_EQ(poly_label(MPoly::monomial(Field::Complex, {1}, Scalar(1, -2))), "(1-2i)*z^1");
}

TEST(Lagrange, ReproducesNodesAndPolynomials)
{
    // Quadratic through three points is the quadratic itself.
    const std::pair<Scalar, Scalar> pts[] = {{-1.0, 4.0}, {0.0, 1.0}, {2.0, 1.0}};
    const auto P = lagrange_interpolate(pts);
    for (const auto& [x, y] : pts) EXPECT_EQ(P(x), y);
    auto q = [](Scalar x) { return x * x - 2.0 * x + 1.0; };
    for (double x : {-0.7, 0.5, 3.0}) EXPECT_NEAR(std::abs(P(x) - q(x)), 0.0, 1e-13);
    const MPoly m = P.to_mpoly(Field::Real);
    EXPECT_NEAR(m.coefficient({0}).real(), 1.0, 1e-13);
    EXPECT_NEAR(m.coefficient({1}).real(), -2.0, 1e-13);
    EXPECT_NEAR(m.coefficient({2}).real(), 1.0, 1e-13);
}

TEST(Lagrange, ComplexNodes)
{
    std::vector<Scalar> z, y;
    for (int j = 0; j < 5; ++j) {
        z.push_back(std::polar(1.0, 2 * std::numbers::pi * j / 5));
        y.push_back(std::exp(z.back()));
    }
    const LagrangeInterpolant P(z, y);
    const MPoly m = P.to_mpoly();
    for (int j = 0; j < 5; ++j) {
        EXPECT_LE(std::abs(P(z[std::size_t(j)]) - y[std::size_t(j)]) / std::abs(y[std::size_t(j)]), 1e-10);
        EXPECT_LE(std::abs(eval_mpoly(m, {z[std::size_t(j)]}) - y[std::size_t(j)]) / std::abs(y[std::size_t(j)]), 1e-10);
    }
    EXPECT_FALSE(P.expansion_ill_conditioned());
}

TEST(Lagrange, Preconditions)
{
    EXPECT_THROW(LagrangeInterpolant({}, {}), std::invalid_argument);
    EXPECT_THROW(LagrangeInterpolant({1.0, 1.0}, {0.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(LagrangeInterpolant({1.0}, {0.0, 1.0}), std::invalid_argument);
    std::vector<Scalar> many(31);
    for (std::size_t i = 0; i < many.size(); ++i) many[i] = double(i);
    EXPECT_TRUE(LagrangeInterpolant(many, many).expansion_ill_conditioned());
}

TEST(Runge, ErrorsGrowWithEquidistantNodes)
{
    const unsigned counts[] = {5, 9, 13};
    const auto t = runge_table(counts);
    ASSERT_EQ(t.size(), 3u);
    EXPECT_TRUE(t.strictly_increasing_errors());
    // Known magnitudes: roughly 0.44, 1.04, 3.6.
    EXPECT_NEAR(t.rows()[0].error, 0.438, 0.01);
    EXPECT_GT(t.rows()[2].error, 3.0);
    for (unsigned n : counts) {
        const auto P = runge_interpolant(n);
        for (std::size_t i = 0; i < P.size(); ++i)
            EXPECT_LE(std::abs(P(P.nodes()[i]) - P.values()[i]) / std::abs(P.values()[i]), 1e-10);
    }
    EXPECT_THROW(equidistant_nodes(1), std::invalid_argument);
}

TEST(ConvergenceTable, RatiosAndMonotonicity)
{
    ConvergenceTable t("gamma");
    t.add(1e-2, 4.0);
    t.add(5e-3, 2.0);
    t.add(2.5e-3, 1.5);
    EXPECT_TRUE(std::isnan(t.rows()[0].ratio));
    EXPECT_DOUBLE_EQ(t.rows()[1].ratio, 0.5);
    EXPECT_DOUBLE_EQ(t.max_ratio(), 0.75);
    EXPECT_FALSE(t.strictly_increasing_errors());
    EXPECT_THROW(t.add(5e-3, 1.0), std::invalid_argument);
    EXPECT_THROW(t.add(1e-3, -1.0), std::invalid_argument);
    ConvergenceTable u;
    u.add(1.0, 1.0);
    EXPECT_THROW(u.add(1.0, 1.0), std::invalid_argument);
    EXPECT_TRUE(std::isnan(u.max_ratio()));
}

TEST(CkError, OrdersAndOracles)
{
    const auto grid = BoxGrid::cube(Field::Real, 2, -1.0, 1.0, 5);
    const ScalarFunction f = [](std::span<const Scalar> z) { return z[0] * z[1]; };
    const ScalarFunction g = [](std::span<const Scalar>) { return Scalar(0.0); };
    EXPECT_NEAR(ck_error(f, g, 0, grid, 1e-3), 1.0, 1e-14);
    EXPECT_NEAR(ck_error(f, g, 1, grid, 1e-3), 1.0, 1e-9);  // |∂_i (xy)| ≤ 1
    EXPECT_NEAR(ck_error(f, g, 2, grid, 1e-3), 1.0, 1e-6);  // mixed derivative 1
    const ScalarFunction h = [](std::span<const Scalar> z) { return 0.1 * z[0] * z[0]; };
    EXPECT_NEAR(ck_error(h, g, 1, grid, 1e-3), 0.2, 1e-9);
    EXPECT_NEAR(ck_error(h, g, 2, grid, 1e-3), 0.2, 1e-6);
    EXPECT_THROW(ck_error(f, g, 3, grid, 1e-3), std::invalid_argument);
    EXPECT_THROW(ck_error(f, g, 1, grid, 0.0), std::invalid_argument);
}

TEST(ConvergenceStudy, ShallowMonomial)
{
    StudyArgs args;
    args.degree = 2;
    const double params[] = {1e-2, 5e-3, 2.5e-3};
    const auto t = convergence_study("shallow-monomial", args, params, BoxGrid::cube(Field::Real, 1, -1, 1, 201));
    EXPECT_EQ(t.parameter_name(), "gamma");
    EXPECT_LE(t.max_ratio(), 0.6);
    EXPECT_LE(t.rows().back().error, 1e-2);
}

TEST(ConvergenceStudy, ResNetGeneralIsSecondOrder)
{
    StudyArgs args;
    args.zstar = 0.0;
    const double params[] = {1e-2, 5e-3};
    const auto t = convergence_study("resnet-poly-general", args, params, BoxGrid::cube(Field::Real, 1, -1, 1, 201));
    EXPECT_LE(t.max_ratio(), 0.3);
}

TEST(ConvergenceStudy, MlpAndReluC2)
{
    StudyArgs args;
    const double eps[] = {1e-3, 5e-4};
    EXPECT_LE(convergence_study("mlp-embed", args, eps, BoxGrid::cube(Field::Real, 2, -1, 1, 11)).max_ratio(), 0.6);
    StudyArgs relu;
    relu.activation = Activation::relu();
    const double T[] = {25, 50, 100};
    EXPECT_LE(convergence_study("relu-c2", relu, T, BoxGrid::cube(Field::Real, 1, 0, 1, 1001)).max_ratio(), 0.6);
}

TEST(ConvergenceStudy, RejectsUnknownAndBadParameters)
{
    const double p[] = {1e-2};
    const auto g = BoxGrid::cube(Field::Real, 1, -1, 1, 11);
    EXPECT_THROW(convergence_study("nope", {}, p, g), std::invalid_argument);
    const double neg[] = {-1.0};
    EXPECT_THROW(convergence_study("shallow-monomial", {}, neg, g), std::invalid_argument);
    EXPECT_EQ(study_ids().size(), 4u);
}
