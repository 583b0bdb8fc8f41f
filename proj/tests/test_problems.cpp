#include <gtest/gtest.h>

#include <cmath>

#include "ir2/problems.hpp"

using namespace ir2;

namespace {

struct SuiteCase {
    std::string name;
    std::size_t M;
    std::vector<double> x;
    std::vector<double> f;
};

#include "suite_cases.inc"

double norm2(const ObjectiveVector& f)
{
    double s = 0.0;
    for (double v : f) {
        s += v * v;
    }
    return std::sqrt(s);
}

} // namespace

TEST(Problems, MatchesIndependentImplementation)
{
    for (const auto& c : kSuiteCases) {
        SCOPED_TRACE(c.name + "-" + std::to_string(c.M));
        const auto p = make_problem(c.name, c.M);
        const auto f = p.evaluate(c.x);
        ASSERT_EQ(f.size(), c.f.size());
        for (std::size_t k = 0; k < f.size(); ++k) {
            EXPECT_NEAR(f[k], c.f[k], 1e-9 * std::max(1.0, std::abs(c.f[k])));
        }
    }
}

TEST(Problems, Dimensions)
{
    const auto z = make_problem("ZDT1", 2);
    EXPECT_EQ(z.n_var, 30u);
    EXPECT_EQ(z.n_obj, 2u);
    const auto d = make_problem("DTLZ2", 4);
    EXPECT_EQ(d.n_var, 15u);
    EXPECT_EQ(d.n_obj, 4u);
    const auto w = make_problem("WFG4", 3);
    EXPECT_EQ(w.n_var, 24u);
    for (std::size_t i = 0; i < w.n_var; ++i) {
        EXPECT_DOUBLE_EQ(w.upper[i], 2.0 * static_cast<double>(i + 1));
    }
}

TEST(Problems, InvalidRequestsThrow)
{
    EXPECT_THROW(make_problem("ZDT5", 2), config_error);
    EXPECT_THROW(make_problem("ZDT1", 3), config_error);
    EXPECT_THROW(make_problem("DTLZ2", 2), config_error);
    EXPECT_THROW(make_problem("WFG1", 5), config_error);
}

TEST(Problems, WfgVariantParameters)
{
    const auto mod4 = wfg_params_for("WFG4-mod");
    EXPECT_DOUBLE_EQ(mod4.A, 70.0);
    EXPECT_DOUBLE_EQ(mod4.B, 5.0);
    EXPECT_DOUBLE_EQ(mod4.C, 0.35);
    EXPECT_DOUBLE_EQ(wfg_params_for("WFG7-mod").C, 100.0);
    const auto std4 = wfg_params_for("WFG4");
    EXPECT_DOUBLE_EQ(std4.A, 30.0);
    EXPECT_DOUBLE_EQ(std4.B, 10.0);
    EXPECT_DOUBLE_EQ(std4.C, 0.35);
    EXPECT_DOUBLE_EQ(wfg_params_for("WFG7").C, 50.0);

    const auto a = make_problem("WFG4", 3);
    const auto b = make_problem("WFG4-mod", 3);
    DecisionVector x(24);
    for (std::size_t i = 0; i < 24; ++i) {
        x[i] = 0.3 * static_cast<double>(i + 1);
    }
    EXPECT_NE(a.evaluate(x), b.evaluate(x));
}

TEST(Problems, ModifiedZdtOptimumAtHalf)
{
    for (const std::string name : {"ZDT1", "ZDT2", "ZDT3", "ZDT4", "ZDT6"}) {
        SCOPED_TRACE(name);
        const auto p = make_problem(name, 2);
        const auto front = pareto_front_sample(p, 500).points;
        for (double x1 : {0.0, 0.3, 0.9}) {
            DecisionVector x(p.n_var, 0.5);
            x[0] = x1;
            const auto f = p.evaluate(x);
            // g = 1 on the front: f2 equals h(f1) with g = 1.
            const double f1 = f[0];
            double h = 1.0 - std::sqrt(f1);
            if (name == "ZDT2" || name == "ZDT6") {
                h = 1.0 - f1 * f1;
            } else if (name == "ZDT3") {
                h = 1.0 - std::sqrt(f1) - f1 * std::sin(10.0 * std::numbers::pi * f1);
            }
            EXPECT_NEAR(f[1], h, 1e-12);
            for (std::size_t k : {1u, 7u, 29u}) {
                DecisionVector y = x;
                y[k] = 0.5 + (k % 2 ? 0.01 : -0.2);
                const auto fy = p.evaluate(y);
                EXPECT_DOUBLE_EQ(fy[0], f[0]);
                EXPECT_GT(fy[1], f[1]);
            }
        }
    }
}

TEST(Problems, DtlzOptimumOnSphere)
{
    for (const std::string name : {"DTLZ2", "DTLZ3", "DTLZ4"}) {
        for (std::size_t M : {3u, 4u, 5u}) {
            const auto p = make_problem(name, M);
            RandomSource rng(M);
            DecisionVector x(p.n_var, 0.5);
            for (std::size_t k = 0; k + 1 < M; ++k) {
                x[k] = rng.uniform();
            }
            EXPECT_NEAR(norm2(p.evaluate(x)), 1.0, 1e-12);
        }
    }
}

TEST(Problems, WfgOptimalObjectivesWithinScale)
{
    // Distance parameters at 0.35 * upper bound put WFG4-9 on the front.
    for (const std::string name : {"WFG4", "WFG5", "WFG6", "WFG7", "WFG8", "WFG9"}) {
        const auto p = make_problem(name, 3);
        const auto f = p.evaluate(DecisionVector(p.upper.begin(), p.upper.end()));
        for (std::size_t m = 0; m < 3; ++m) {
            EXPECT_GE(f[m], 0.0);
        }
        DecisionVector x(p.n_var);
        RandomSource rng(1);
        for (std::size_t i = 0; i < p.n_var; ++i) {
            x[i] = rng.uniform() * p.upper[i];
        }
        const auto g = p.evaluate(x);
        for (std::size_t m = 0; m < 3; ++m) {
            EXPECT_GE(g[m], 0.0);
        }
    }
    const auto p = make_problem("WFG4", 3);
    DecisionVector x(p.n_var);
    for (std::size_t i = 0; i < p.n_var; ++i) {
        x[i] = (i < 4 ? 0.4 : 0.35) * p.upper[i];
    }
    const auto f = p.evaluate(x);
    double s = 0.0;
    for (std::size_t m = 0; m < 3; ++m) {
        EXPECT_LE(f[m], 2.0 * static_cast<double>(m + 1) + 1e-12);
        const double q = f[m] / (2.0 * static_cast<double>(m + 1));
        s += q * q;
    }
    EXPECT_NEAR(s, 1.0, 1e-9);
}

TEST(FrontSample, ZdtSpacingAndValues)
{
    const auto s = pareto_front_sample(make_problem("ZDT1", 2), 500);
    ASSERT_EQ(s.points.size(), 500u);
    const double step = s.points[1][0] - s.points[0][0];
    for (std::size_t i = 1; i < s.points.size(); ++i) {
        EXPECT_NEAR(s.points[i][0] - s.points[i - 1][0], step, 1e-12);
        EXPECT_NEAR(s.points[i][1], 1.0 - std::sqrt(s.points[i][0]), 1e-12);
    }
    bool saw_quarter = false;
    for (const auto& p : pareto_front_sample(make_problem("ZDT1", 2), 5).points) {
        if (p[0] == 0.25) {
            saw_quarter = true;
            EXPECT_DOUBLE_EQ(p[1], 0.5);
        }
    }
    EXPECT_TRUE(saw_quarter);
    const auto z2 = pareto_front_sample(make_problem("ZDT2", 2), 500);
    EXPECT_DOUBLE_EQ(z2.points.front()[0], 0.0);
    EXPECT_DOUBLE_EQ(z2.points.front()[1], 1.0);
    EXPECT_EQ(pareto_front_sample(make_problem("ZDT3", 2), 500).points.size(), 500u);
}

TEST(FrontSample, Zdt3PointsAreOnSegments)
{
    const auto p = make_problem("ZDT3", 2);
    for (const auto& f : pareto_front_sample(p, 500).points) {
        DecisionVector x(p.n_var, 0.5);
        x[0] = f[0];
        EXPECT_NEAR(p.evaluate(x)[1], f[1], 1e-12);
    }
}

TEST(FrontSample, DtlzSphere)
{
    const auto s = pareto_front_sample(make_problem("DTLZ2", 3), 1000);
    EXPECT_LE(s.points.size(), 1000u);
    EXPECT_GT(s.points.size(), 900u);
    for (const auto& p : s.points) {
        EXPECT_NEAR(norm2(p), 1.0, 1e-12);
    }
    for (const auto& p : pareto_front_sample(make_problem("DTLZ1", 3), 200).points) {
        EXPECT_NEAR(p[0] + p[1] + p[2], 0.5, 1e-12);
    }
}

TEST(FrontSample, WfgConcaveFront)
{
    const auto s = pareto_front_sample(make_problem("WFG4", 3), 1000);
    EXPECT_GT(s.points.size(), 100u);
    for (const auto& p : s.points) {
        double r = 0.0;
        for (std::size_t m = 0; m < 3; ++m) {
            const double q = p[m] / (2.0 * static_cast<double>(m + 1));
            r += q * q;
        }
        EXPECT_NEAR(r, 1.0, 1e-9);
    }
}

TEST(Registry, ListsEverySupportedName)
{
    std::set<std::string> names;
    for (const auto& info : problem_registry()) {
        names.insert(info.name);
    }
    for (const std::string n : {"ZDT1", "ZDT2", "ZDT3", "ZDT4", "ZDT6", "DTLZ1", "DTLZ2", "DTLZ3", "DTLZ4", "WFG1",
                                "WFG5", "WFG9", "WFG4-mod", "WFG7-mod"}) {
        EXPECT_TRUE(names.count(n)) << n;
    }
}
