#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "ir2/core.hpp"
#include "ir2/refassoc.hpp"
#include "ir2/variation.hpp"

namespace ir2 {

struct MoeadParams {
    std::size_t neighborhood = 20; // N_S
    double delta = 0.9;
    std::size_t n_r = 2;
    double theta = 5.0;
};

struct MoeadState {
    std::vector<std::vector<std::size_t>> B; // B[i] starts with i itself
    MoeadParams params;
    ObjectiveVector ideal;                  // z*
};

/// Neighbourhoods by Euclidean distance between weight vectors (lowest index on ties).
inline MoeadState make_moead_state(const ReferenceSet& W, const MoeadParams& params)
{
    if (params.neighborhood < 2 || params.neighborhood > W.size()) {
        throw config_error("MOEA/D: neighbourhood size must lie in [2, N]");
    }
    if (!(params.delta >= 0.0 && params.delta <= 1.0) || params.n_r < 1 || !(params.theta > 0.0)) {
        throw config_error("MOEA/D: invalid delta, n_r or theta");
    }
    MoeadState state;
    state.params = params;
    const std::size_t N = W.size();
    state.B.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        std::vector<double> d(N);
        for (std::size_t j = 0; j < N; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < W.points[i].size(); ++k) {
                const double t = W.points[i][k] - W.points[j][k];
                s += t * t;
            }
            d[j] = s;
        }
        std::vector<std::size_t> order(N);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (d[a] != d[b]) {
                return d[a] < d[b];
            }
            return a == i ? true : (b == i ? false : a < b);
        });
        order.resize(params.neighborhood);
        state.B[i] = std::move(order);
    }
    return state;
}

/// PBI decomposition value of f for weight w relative to z*.
inline double pbi_value(const ObjectiveVector& f, const ObjectiveVector& w, const ObjectiveVector& ideal, double theta)
{
    ObjectiveVector shifted(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
        shifted[k] = f[k] - ideal[k];
    }
    return scalarize(ScalarizingMetric::pbi(theta), shifted, w);
}

inline void update_ideal(ObjectiveVector& ideal, const ObjectiveVector& f)
{
    if (ideal.empty()) {
        ideal = f;
        return;
    }
    for (std::size_t k = 0; k < f.size(); ++k) {
        ideal[k] = std::min(ideal[k], f[k]);
    }
}

/// Optional hook that may rewrite subproblem i's offspring before evaluation.
using OffspringHook = std::function<DecisionVector(std::size_t, DecisionVector)>;

/// One MOEA/D generation in place. Parents are taken from the population as it
/// stood at the start of the generation; each subproblem produces one
/// offspring, which may replace up to n_r members of B(i). Returns the
/// evaluated offspring in subproblem order.
inline Population moead_generation(Population& P, MoeadState& state, const ReferenceSet& W,
                                   const ProblemDefinition& problem, const GeneticParams& gp, RandomSource& mating,
                                   RandomSource& survival, EvaluationCounter& counter, int t,
                                   const OffspringHook& hook = {})
{
    const std::size_t N = P.size();
    if (N != W.size() || state.B.size() != N) {
        throw contract_error("moead_generation: population, weights and neighbourhoods differ in size");
    }
    const Population snapshot = P;
    std::vector<std::size_t> all(N);
    std::iota(all.begin(), all.end(), std::size_t{0});
    Population Q;
    Q.reserve(N);
    for (std::size_t i = 0; i < N; ++i) {
        const bool local = mating.uniform() < state.params.delta;
        const auto& pool = local ? state.B[i] : all;
        const auto pick = mating.sample(pool.size(), 2);
        const auto& a = snapshot[pool[pick[0]]].x;
        const auto& b = snapshot[pool[pick[1]]].x;
        auto children = sbx_crossover(a, b, gp, problem.lower, problem.upper, mating);
        DecisionVector y = polynomial_mutation(std::move(children.first), gp, problem.lower, problem.upper, mating);
        if (hook) {
            y = hook(i, std::move(y));
        }
        Individual child{std::move(y), {}, t + 1};
        child.f = evaluate_checked(problem, child.x, i);
        counter.add(1);
        update_ideal(state.ideal, child.f);

        auto order = state.B[i];
        survival.shuffle(order);
        std::size_t replaced = 0;
        for (std::size_t j : order) {
            if (replaced >= state.params.n_r) {
                break;
            }
            const double gc = pbi_value(child.f, W.points[j], state.ideal, state.params.theta);
            const double gj = pbi_value(P[j].f, W.points[j], state.ideal, state.params.theta);
            if (gc <= gj) {
                P[j] = child;
                ++replaced;
            }
        }
        Q.push_back(std::move(child));
    }
    return Q;
}

} // namespace ir2
