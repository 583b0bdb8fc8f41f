#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "ir2/refassoc.hpp"

using namespace ir2;

namespace {

std::size_t binomial(std::size_t n, std::size_t k)
{
    double c = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return static_cast<std::size_t>(std::llround(c));
}

// Lattice points with at most two nonzero coordinates: M vertices plus p-1
// interior points on each of the C(M,2) edges.
std::size_t edge_points(std::size_t M, int p) { return M + binomial(M, 2) * static_cast<std::size_t>(p - 1); }

} // namespace

TEST(DasDennis, CountsForTableSizes)
{
    EXPECT_EQ(das_dennis(2, 99).size(), 100u);
    EXPECT_EQ(das_dennis(3, 13).size(), 105u);
    EXPECT_EQ(das_dennis(4, 10).size(), 286u);
    EXPECT_EQ(das_dennis(5, 8).size(), 495u);
}

TEST(DasDennis, MatchesBinomialAndLiesOnSimplex)
{
    for (std::size_t M = 2; M <= 6; ++M) {
        for (int p = 1; p <= 9; ++p) {
            const auto Z = das_dennis(M, p);
            ASSERT_EQ(Z.size(), binomial(static_cast<std::size_t>(p) + M - 1, M - 1));
            EXPECT_EQ(das_dennis_count(M, p), Z.size());
            std::set<ObjectiveVector> unique(Z.points.begin(), Z.points.end());
            EXPECT_EQ(unique.size(), Z.size());
            for (const auto& z : Z.points) {
                double s = 0.0;
                for (double v : z) {
                    EXPECT_GE(v, 0.0);
                    const double scaled = v * p;
                    EXPECT_NEAR(scaled, std::round(scaled), 1e-12);
                    s += v;
                }
                EXPECT_NEAR(s, 1.0, 1e-12);
            }
        }
    }
}

TEST(DasDennis, SmallestLattice)
{
    const auto Z = das_dennis(2, 1);
    std::set<ObjectiveVector> got(Z.points.begin(), Z.points.end());
    EXPECT_EQ(got, (std::set<ObjectiveVector>{{0, 1}, {1, 0}}));
}

TEST(DasDennis, InvalidArguments)
{
    EXPECT_THROW(das_dennis(1, 3), contract_error);
    EXPECT_THROW(das_dennis(3, 0), contract_error);
}

TEST(BoundaryFraction, TableSizes)
{
    // Interior points are the lattice of p - M with all counts >= 1.
    const std::pair<std::size_t, int> cases[] = {{2, 99}, {3, 13}, {4, 10}, {5, 8}};
    const double expected[] = {2.0, 37.0, 70.0, 93.0};
    for (std::size_t i = 0; i < 4; ++i) {
        const auto [M, p] = cases[i];
        const auto Z = das_dennis(M, p);
        const std::size_t interior = binomial(static_cast<std::size_t>(p) - 1, M - 1);
        const double frac = boundary_fraction(Z);
        EXPECT_NEAR(frac, 1.0 - static_cast<double>(interior) / Z.size(), 1e-12);
        EXPECT_NEAR(100.0 * frac, expected[i], 1.0);
    }
    const auto Z4 = das_dennis(4, 10);
    EXPECT_EQ(static_cast<std::size_t>(std::llround(boundary_fraction(Z4) * Z4.size())), 202u);
}

TEST(Layered, SingleFullLayerIsDasDennis)
{
    const auto a = layered_points(3, {6}, {1.0});
    const auto b = das_dennis(3, 6);
    EXPECT_EQ(a.points, b.points);
}

TEST(Layered, FiveLayerSet)
{
    const std::vector<int> gaps{16, 13, 11, 8, 2};
    const auto Z = layered_points(4, gaps, {1.0, 0.8, 0.6, 0.4, 0.2}, LayerLattice::edges);
    std::size_t expected = 0;
    for (int p : gaps) {
        expected += edge_points(4, p);
    }
    EXPECT_EQ(expected, 290u);
    EXPECT_EQ(Z.size(), expected);
    EXPECT_EQ(static_cast<std::size_t>(std::llround(boundary_fraction(Z) * Z.size())), edge_points(4, 16));
    EXPECT_NEAR(100.0 * boundary_fraction(Z), 32.0, 1.0);
    for (const auto& z : Z.points) {
        double s = 0.0;
        for (double v : z) {
            EXPECT_GE(v, 0.0);
            s += v;
        }
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
}

TEST(Layered, DropsDuplicatesAndValidatesShrink)
{
    const auto Z = layered_points(3, {2, 2}, {1.0, 0.5});
    EXPECT_EQ(Z.size(), 12u);
    // The centroid is a fixed point of contraction, so p = 3 layers share it.
    EXPECT_EQ(layered_points(3, {3, 3}, {1.0, 0.5}).size(), 19u);
    EXPECT_THROW(layered_points(3, {2, 2}, {0.5, 0.5}), contract_error);
    EXPECT_THROW(layered_points(3, {2}, {1.5}), contract_error);
    EXPECT_THROW(layered_points(3, {2, 3}, {1.0}), contract_error);
}

TEST(Normalize, HandExample)
{
    const auto [frame, Fbar] = normalize({{1, 3}, {2, 2}, {3, 1}});
    EXPECT_EQ(frame.ideal, (ObjectiveVector{1, 1}));
    EXPECT_EQ(frame.nadir, (ObjectiveVector{3, 3}));
    EXPECT_EQ(Fbar[0], (ObjectiveVector{0, 1}));
    EXPECT_EQ(Fbar[1], (ObjectiveVector{0.5, 0.5}));
}

TEST(Normalize, DegenerateAndIdentity)
{
    const auto single = normalize({{4, 7, -1}}).second;
    EXPECT_EQ(single[0], (ObjectiveVector{0, 0, 0}));
    const std::vector<ObjectiveVector> unit{{0, 1}, {1, 0}, {0.25, 0.5}};
    EXPECT_EQ(normalize(unit).second, unit);
}

TEST(Normalize, Idempotent)
{
    RandomSource rng(2);
    std::vector<ObjectiveVector> F(30, ObjectiveVector(3));
    for (auto& f : F) {
        for (auto& v : f) {
            v = rng.uniform(-5.0, 9.0);
        }
    }
    const auto once = normalize(F).second;
    const auto twice = normalize(once).second;
    for (std::size_t i = 0; i < F.size(); ++i) {
        for (std::size_t k = 0; k < 3; ++k) {
            EXPECT_GE(once[i][k], 0.0);
            EXPECT_LE(once[i][k], 1.0);
            EXPECT_NEAR(once[i][k], twice[i][k], 1e-15);
        }
    }
}

TEST(Scalarize, Examples)
{
    EXPECT_NEAR(scalarize(ScalarizingMetric::asf(), {0.2, 0.5}, {0.3, 0.3}), 0.2, 1e-15);
    EXPECT_NEAR(scalarize(ScalarizingMetric::pdm(), {0.5, 0.5}, {0.5, 0.5}), 0.0, 1e-15);
    EXPECT_NEAR(scalarize(ScalarizingMetric::pbi(5.0), {0.5, 0.5}, {0.5, 0.5}), std::sqrt(0.5), 1e-15);
    // d1 = 1 along (1,0), d2 = 2 off it.
    EXPECT_NEAR(scalarize(ScalarizingMetric::pbi(3.0), {1.0, 2.0}, {1.0, 0.0}), 7.0, 1e-15);
}

TEST(Scalarize, ZeroDirectionThrows)
{
    EXPECT_THROW(scalarize(ScalarizingMetric::pdm(), {0.1, 0.2}, {0, 0}), contract_error);
    EXPECT_THROW(scalarize(ScalarizingMetric::pbi(), {0.1, 0.2}, {0, 0}), contract_error);
    EXPECT_THROW(ScalarizingMetric::pbi(0.0), contract_error);
}

TEST(Scalarize, Covariance)
{
    RandomSource rng(4);
    for (int i = 0; i < 100; ++i) {
        ObjectiveVector f{rng.uniform(), rng.uniform(), rng.uniform()};
        ObjectiveVector z{rng.uniform(), rng.uniform(), rng.uniform()};
        const double c = rng.uniform(-1.0, 1.0);
        ObjectiveVector fc = f, zc = z, fl = f;
        for (std::size_t k = 0; k < 3; ++k) {
            fc[k] += c;
            zc[k] += c;
            fl[k] *= 2.5;
        }
        EXPECT_NEAR(scalarize(ScalarizingMetric::asf(), fc, zc), scalarize(ScalarizingMetric::asf(), f, z), 1e-12);
        EXPECT_NEAR(scalarize(ScalarizingMetric::pdm(), fl, z), 2.5 * scalarize(ScalarizingMetric::pdm(), f, z),
                    1e-12);
    }
}

TEST(Associate, SelfMapping)
{
    const auto Z = das_dennis(3, 4);
    const auto a = associate(Z.points, Z, ScalarizingMetric::pdm());
    for (std::size_t i = 0; i < Z.size(); ++i) {
        EXPECT_EQ(a[i].index, i);
        EXPECT_NEAR(a[i].value, 0.0, 1e-15);
    }
}

TEST(Associate, SmallerScalarWinsAndTiesGoLow)
{
    ReferenceSet Z{{{1, 0}, {0, 1}}, 1};
    EXPECT_EQ(associate_one({0.9, 0.1}, Z, ScalarizingMetric::pdm()).index, 0u);
    EXPECT_EQ(associate_one({0.1, 0.9}, Z, ScalarizingMetric::pdm()).index, 1u);
    EXPECT_EQ(associate_one({0.5, 0.5}, Z, ScalarizingMetric::pdm()).index, 0u);
}

TEST(Associate, PermutingZPermutesIndices)
{
    const auto Z = das_dennis(3, 5);
    RandomSource rng(8);
    const auto perm = rng.permutation(Z.size());
    ReferenceSet Zp;
    for (std::size_t j : perm) {
        Zp.points.push_back(Z.points[j]);
    }
    std::vector<ObjectiveVector> F(50, ObjectiveVector(3));
    for (auto& f : F) {
        for (auto& v : f) {
            v = rng.uniform();
        }
    }
    for (const auto metric : {ScalarizingMetric::asf(), ScalarizingMetric::pdm(), ScalarizingMetric::pbi()}) {
        const auto a = associate(F, Z, metric);
        const auto b = associate(F, Zp, metric);
        for (std::size_t i = 0; i < F.size(); ++i) {
            EXPECT_EQ(perm[b[i].index], a[i].index);
            EXPECT_EQ(a[i].value, b[i].value);
        }
    }
}
