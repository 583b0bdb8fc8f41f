#include <gtest/gtest.h>

#include <set>

#include "ir2/operator.hpp"
#include "ir2/problems.hpp"

using namespace ir2;

namespace {

Individual ind(DecisionVector x, ObjectiveVector f, int gen = 0) { return {std::move(x), std::move(f), gen}; }

// Stand-ins with the RepairModel interface.
struct IdentityForest {
    DecisionVector predict(const DecisionVector& x) const { return x; }
};
struct ConstantForest {
    DecisionVector value;
    DecisionVector predict(const DecisionVector&) const { return value; }
};
template <class F>
struct StubModel {
    F forest;
    DecisionVector xmin;
    DecisionVector xmax;
    DecisionVector to_unit(const DecisionVector& x) const
    {
        DecisionVector out(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) {
            out[k] = (x[k] - xmin[k]) / (xmax[k] - xmin[k]);
        }
        return out;
    }
    DecisionVector from_unit(const DecisionVector& r) const
    {
        DecisionVector out(r.size());
        for (std::size_t k = 0; k < r.size(); ++k) {
            out[k] = xmin[k] + r[k] * (xmax[k] - xmin[k]);
        }
        return out;
    }
};

Population tagged(int gen, std::size_t n)
{
    Population P;
    for (std::size_t i = 0; i < n; ++i) {
        P.push_back(ind({static_cast<double>(gen), static_cast<double>(i)}, {0.0, 0.0}, gen));
    }
    return P;
}

} // namespace

TEST(UpdateTarget, EmptyArchiveOneSolution)
{
    const auto Z = das_dennis(2, 3);
    const auto T = update_target({ind({0.1}, {0.2, 0.8})}, TargetArchive(Z.size()), Z, ScalarizingMetric::asf());
    EXPECT_EQ(T.filled(), 1u);
}

TEST(UpdateTarget, IdenticalPopulationChangesNothing)
{
    const auto Z = das_dennis(2, 4);
    Population P{ind({0.0}, {0, 1}), ind({0.5}, {0.5, 0.5}), ind({1.0}, {1, 0})};
    const auto T1 = update_target(P, TargetArchive(Z.size()), Z, ScalarizingMetric::asf());
    for (auto& m : P) {
        m.birth_generation = 7;
    }
    const auto T2 = update_target(P, T1, Z, ScalarizingMetric::asf());
    for (std::size_t j = 0; j < Z.size(); ++j) {
        ASSERT_EQ(T1.slots[j].has_value(), T2.slots[j].has_value());
        if (T1.slots[j]) {
            EXPECT_EQ(T2.slots[j]->birth_generation, 0);
        }
    }
}

TEST(UpdateTarget, SmallerScalarizerOccupiesSlot)
{
    // Frame from {(0,1),(1,0),(0.4,0.5),(0.45,0.45)} is the unit box. Both
    // middle points associate to (0.5,0.5) under ASF: max(-0.1, 0) = 0 and
    // max(-0.05,-0.05) = -0.05, so the second one wins.
    const ReferenceSet Z{{{1, 0}, {0.5, 0.5}, {0, 1}}, 2};
    Population P{ind({1}, {0, 1}), ind({2}, {1, 0}), ind({3}, {0.4, 0.5}), ind({4}, {0.45, 0.45})};
    const auto T = update_target(P, TargetArchive(3), Z, ScalarizingMetric::asf());
    ASSERT_TRUE(T.slots[1].has_value());
    EXPECT_EQ(T.slots[1]->x, (DecisionVector{4}));
}

TEST(UpdateTarget, SlotValueNeverIncreases)
{
    const auto Z = das_dennis(3, 5);
    const auto metric = ScalarizingMetric::pdm();
    RandomSource rng(3);
    TargetArchive T(Z.size());
    for (int gen = 0; gen < 20; ++gen) {
        Population P;
        for (int i = 0; i < 15; ++i) {
            P.push_back(ind({rng.uniform()}, {rng.uniform(), rng.uniform(), rng.uniform()}));
        }
        const auto frame = make_frame(objectives_of(P));
        std::vector<double> before(Z.size(), std::numeric_limits<double>::infinity());
        for (std::size_t j = 0; j < Z.size(); ++j) {
            if (T.slots[j]) {
                before[j] = scalarize(metric, frame.apply(T.slots[j]->f), Z.points[j]);
            }
        }
        T = update_target(P, T, Z, metric);
        for (std::size_t j = 0; j < Z.size(); ++j) {
            if (T.slots[j]) {
                EXPECT_LE(scalarize(metric, frame.apply(T.slots[j]->f), Z.points[j]), before[j]);
            }
        }
    }
}

TEST(UpdateArchive, FirstGeneration)
{
    ParentHistory history;
    history.record(0, tagged(0, 4));
    const auto A = update_archive(SlidingArchive(5), tagged(1, 4), history, 0);
    EXPECT_EQ(A.size(), 8u);
    EXPECT_EQ(A.parent_generation, 0);
    ASSERT_EQ(A.offspring.size(), 1u);
    EXPECT_EQ(A.offspring.front().first, 0);
}

TEST(UpdateArchive, ScriptedTenGenerations)
{
    const int t_past = 5;
    const std::size_t N = 3;
    ParentHistory history(t_past + 2);
    SlidingArchive A(t_past);
    std::size_t previous = 0;
    for (int t = 0; t < 10; ++t) {
        history.record(t, tagged(t, N));
        A = update_archive(std::move(A), tagged(100 + t, N), history, t);
        // Offspring of generations t-t_past+1 .. t and the parent P_{t+1-t_past}.
        std::set<int> gens;
        for (const auto& [g, Q] : A.offspring) {
            gens.insert(g);
        }
        std::set<int> expected;
        for (int g = std::max(0, t - t_past + 1); g <= t; ++g) {
            expected.insert(g);
        }
        EXPECT_EQ(gens, expected) << "t=" << t;
        EXPECT_EQ(A.parent_generation, std::max(0, t + 1 - t_past));
        EXPECT_LE(A.size(), static_cast<std::size_t>(t_past + 1) * N);
        if (t >= t_past) {
            EXPECT_EQ(A.size(), previous);
        }
        previous = A.size();
    }
}

TEST(ArchiveMapping, RowsOnlyFromFilledSlots)
{
    const ReferenceSet Z{{{1, 0}, {0, 1}}, 1};
    TargetArchive T(2);
    T.slots[0] = ind({9.0}, {0, 1});
    Population archive{ind({1.0}, {1.0, 0.0}), ind({2.0}, {0.0, 1.0}), ind({3.0}, {0.9, 0.1})};
    const auto D = archive_mapping(archive, T, Z, ScalarizingMetric::pdm());
    ASSERT_EQ(D.size(), 2u);
    for (const auto& y : D.outputs) {
        EXPECT_EQ(y, (DecisionVector{9.0}));
    }
    EXPECT_TRUE(archive_mapping(archive, TargetArchive(2), Z, ScalarizingMetric::pdm()).empty());
}

TEST(ArchiveMapping, IdentityRowForStoredTarget)
{
    const ReferenceSet Z{{{1, 0}, {0, 1}}, 1};
    TargetArchive T(2);
    T.slots[0] = ind({0.3, 0.6}, {1, 0});
    T.slots[1] = ind({0.7, 0.1}, {0, 1});
    const auto D = archive_mapping({T.slots[0].value()}, T, Z, ScalarizingMetric::pdm());
    ASSERT_EQ(D.size(), 1u);
    EXPECT_EQ(D.inputs[0], D.outputs[0]);
}

TEST(ArchiveMapping, FullArchiveWhenEverySlotFilled)
{
    const auto Z = das_dennis(2, 9);
    TargetArchive T(Z.size());
    for (std::size_t j = 0; j < Z.size(); ++j) {
        T.slots[j] = ind({static_cast<double>(j)}, Z.points[j]);
    }
    RandomSource rng(1);
    Population archive;
    for (int i = 0; i < 25; ++i) {
        const double a = rng.uniform();
        archive.push_back(ind({a}, {a, 1.0 - a * a}));
    }
    EXPECT_EQ(archive_mapping(archive, T, Z, ScalarizingMetric::asf()).size(), 25u);
}

TEST(Training, DynamicBounds)
{
    TrainingDataset D;
    D.push_back({0.2, 0.5}, {0.4, 1.0});
    D.push_back({0.3, 0.6}, {0.6, 0.9});
    const auto [xmin, xmax] = dynamic_bounds(D, {0, 0}, {1, 1});
    EXPECT_DOUBLE_EQ(xmin[0], 0.1);
    EXPECT_DOUBLE_EQ(xmax[0], 0.8);
    EXPECT_DOUBLE_EQ(xmin[1], 0.25);
    EXPECT_DOUBLE_EQ(xmax[1], 1.0);

    TrainingDataset full;
    full.push_back({0.0, 1.0}, {1.0, 0.0});
    const auto [lo, hi] = dynamic_bounds(full, {0, 0}, {1, 1});
    EXPECT_EQ(lo, (DecisionVector{0, 0}));
    EXPECT_EQ(hi, (DecisionVector{1, 1}));
}

TEST(Training, ModelUsesDatasetSize)
{
    TrainingDataset D;
    RandomSource rng(2);
    for (int i = 0; i < 12; ++i) {
        D.push_back({rng.uniform(), rng.uniform(), rng.uniform()}, {rng.uniform(), rng.uniform(), rng.uniform()});
    }
    const auto m = train_repair_model(D, {0, 0, 0}, {1, 1, 1}, RandomSource(3));
    EXPECT_EQ(m.forest.trees().size(), 12u);
    EXPECT_EQ(m.forest.params().n_features, 3u);
    EXPECT_THROW(train_repair_model(TrainingDataset{}, {0}, {1}, RandomSource(1)), training_error);
}

TEST(Enhance, Arithmetic)
{
    EXPECT_EQ(enhance({0.2, 0.4}, {0.3, 0.9}, 1.0), (DecisionVector{0.3, 0.9}));
    EXPECT_NEAR(enhance({0.5}, {0.6}, 1.1)[0], 0.61, 1e-15);
    EXPECT_EQ(enhance({0.5, 0.1}, {0.5, 0.1}, 3.7), (DecisionVector{0.5, 0.1}));
}

TEST(BoundaryRepair, InBoundsIdentity)
{
    RandomSource rng(1);
    EXPECT_EQ(boundary_repair(0.4, 0.0, 1.0, 0.4, rng), 0.4);
    EXPECT_EQ(boundary_repair(0.0, 0.0, 1.0, 0.0, rng), 0.0);
}

TEST(BoundaryRepair, ContainmentAndBias)
{
    RandomSource rng(2);
    double below_mean = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double r = boundary_repair(-0.2, 0.0, 1.0, 0.1, rng);
        ASSERT_GT(r, 0.0);
        ASSERT_LT(r, 1.0);
        below_mean += r;
        const double s = boundary_repair(7.0, -1.0, 2.0, 0.0, rng);
        ASSERT_GT(s, -1.0);
        ASSERT_LT(s, 2.0);
    }
    // r = 0.2 u^2 has mean 0.2/3.
    EXPECT_NEAR(below_mean / 10000.0, 0.2 / 3.0, 0.003);
}

TEST(BoundaryRepair, DeterministicGivenState)
{
    RandomSource a(5), b(5);
    EXPECT_EQ(boundary_repair(1.5, 0.0, 1.0, 0.5, a), boundary_repair(1.5, 0.0, 1.0, 0.5, b));
}

TEST(Repair, IdentityModelWithUnitEta)
{
    const StubModel<IdentityForest> model{{}, {0, 0, 0}, {1, 1, 1}};
    Population Q;
    RandomSource rng(3);
    for (int i = 0; i < 10; ++i) {
        Q.push_back(ind({rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)}, {1.0}));
    }
    RandomSource r(4);
    const auto out = repair_offspring(Q, model, {1.0, 0.01}, {0, 0, 0}, {1, 1, 1}, r);
    for (std::size_t i = 0; i < Q.size(); ++i) {
        for (std::size_t k = 0; k < 3; ++k) {
            EXPECT_NEAR(out.offspring[i].x[k], Q[i].x[k], 1e-15);
        }
    }
}

TEST(Repair, NearBoundRestoresOriginal)
{
    const StubModel<ConstantForest> model{{{0.5, 0.5}}, {0.2, 0.0}, {0.8, 1.0}};
    RandomSource rng(1);
    // x_0 sits on xmin exactly, x_1 is far from both dynamic bounds.
    const auto y = repair_individual({0.2, 0.6}, model, {1.0, 0.0}, {0, 0}, {1, 1}, rng);
    EXPECT_EQ(y[0], 0.2);
    EXPECT_DOUBLE_EQ(y[1], 0.5);
    // Within 1% of the problem range of xmax.
    const auto z = repair_individual({0.795, 0.6}, model, {1.0, 0.01}, {0, 0}, {1, 1}, rng);
    EXPECT_EQ(z[0], 0.795);
}

TEST(Repair, ConstantModelGivesTarget)
{
    const DecisionVector target{0.3, 0.4, 0.5};
    // Constant unit-space output 0.5 denormalizes to xmin + 0.5 * span.
    const StubModel<ConstantForest> model{{{0.5, 0.5, 0.5}}, {0.1, 0.2, 0.3}, {0.5, 0.6, 0.7}};
    Population Q;
    for (int i = 0; i < 4; ++i) {
        Q.push_back(ind({0.35, 0.35, 0.45}, {1.0}));
    }
    RandomSource rng(9);
    const auto out = repair_offspring(Q, model, {1.0, 0.01}, {0, 0, 0}, {1, 1, 1}, rng, 1.0);
    ASSERT_EQ(out.selected.size(), 4u);
    for (const auto& m : out.offspring) {
        for (std::size_t k = 0; k < 3; ++k) {
            EXPECT_NEAR(m.x[k], target[k], 1e-15);
        }
    }
}

TEST(Repair, SelectionCountAndBounds)
{
    const StubModel<ConstantForest> model{{{1.8, -0.7}}, {0, 0}, {1, 1}};
    for (std::size_t N : {4u, 7u, 100u, 105u}) {
        Population Q;
        RandomSource rng(N);
        for (std::size_t i = 0; i < N; ++i) {
            Q.push_back(ind({rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)}, {1.0}));
        }
        RandomSource r(N + 1);
        const auto out = repair_offspring(Q, model, {1.1, 0.01}, {0, 0}, {1, 1}, r);
        EXPECT_EQ(out.selected.size(), N / 2);
        EXPECT_EQ(std::set<std::size_t>(out.selected.begin(), out.selected.end()).size(), N / 2);
        std::size_t changed = 0;
        for (std::size_t i = 0; i < N; ++i) {
            for (double v : out.offspring[i].x) {
                EXPECT_GE(v, 0.0);
                EXPECT_LE(v, 1.0);
            }
            changed += out.offspring[i].x != Q[i].x ? 1 : 0;
        }
        EXPECT_LE(changed, N / 2);
        EXPECT_EQ(repair_count(N, 0.5), N / 2);
    }
}

TEST(GMetric, Examples)
{
    const Population P{ind({}, {0, 0}), ind({}, {1, 1})};
    EXPECT_EQ(g_metric(P, P), 0.0);
    EXPECT_NEAR(g_metric({ind({}, {0.3, 0})}, {ind({}, {0, 0})}), 0.3, 1e-15);
    EXPECT_NEAR(g_metric({ind({}, {3, 0}), ind({}, {10, 4})}, {ind({}, {0, 0}), ind({}, {10, 0})}), 2.5, 1e-15);
    EXPECT_THROW(g_metric({}, P), contract_error);
}

TEST(Gate, ThresholdAndCadence)
{
    LearningGate gate;
    gate.g_th = 10.0;
    gate.t_freq = 5;
    EXPECT_TRUE(repair_gate(gate, 1.0, 0));
    EXPECT_FALSE(repair_gate(gate, 0.05, 5));
    EXPECT_TRUE(repair_gate(gate, 0.5, 10));
    EXPECT_FALSE(repair_gate(gate, 0.5, 11));
    // Learning resumes when G rises again.
    EXPECT_TRUE(repair_gate(gate, 0.2, 15));
    EXPECT_EQ(gate.history.size(), 5u);
}

TEST(Gate, ZeroThresholdNeverStops)
{
    LearningGate gate;
    gate.g_th = 0.0;
    gate.t_freq = 1;
    for (int t = 0; t < 30; ++t) {
        EXPECT_TRUE(repair_gate(gate, 1.0 / (t + 1.0), t));
    }
}

TEST(Ir2State, NothingTrainedAtStart)
{
    const auto problem = make_problem("ZDT1", 2);
    const auto Z = das_dennis(2, 9);
    Ir2State s(Ir2Settings{}, Z.size());
    RandomSource rng(1);
    Population P;
    for (int i = 0; i < 10; ++i) {
        DecisionVector x(problem.n_var);
        for (auto& v : x) {
            v = rng.uniform();
        }
        P.push_back(ind(x, problem.evaluate(x)));
    }
    // G_0 compares P_0 with itself, so the gate stays shut.
    const auto step = s.prepare(P, 0, Z, ScalarizingMetric::asf(), problem.lower, problem.upper, RandomSource(2));
    EXPECT_EQ(step.G, 0.0);
    EXPECT_FALSE(step.flag);
    EXPECT_FALSE(s.has_model());
    EXPECT_THROW(Ir2State(Ir2Settings{5, 5, 0.9, 10, 0.5, 1}, 10), config_error);
}
