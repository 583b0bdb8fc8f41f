#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ir2/core.hpp"
#include "ir2/metrics.hpp"
#include "ir2/moead.hpp"
#include "ir2/nsga.hpp"
#include "ir2/operator.hpp"
#include "ir2/problems.hpp"
#include "ir2/refassoc.hpp"
#include "ir2/variation.hpp"

namespace ir2 {

enum class Algorithm { nsga2, nsga3, moead };

inline std::string to_string(Algorithm a)
{
    switch (a) {
    case Algorithm::nsga2: return "nsga2";
    case Algorithm::nsga3: return "nsga3";
    case Algorithm::moead: return "moead";
    }
    return "?";
}

inline Algorithm parse_algorithm(const std::string& s)
{
    if (s == "nsga2") {
        return Algorithm::nsga2;
    }
    if (s == "nsga3") {
        return Algorithm::nsga3;
    }
    if (s == "moead") {
        return Algorithm::moead;
    }
    throw config_error("unknown algorithm '" + s + "' (expected nsga2, nsga3 or moead)");
}

/// Population size and Das-Dennis gaps per objective count.
inline std::pair<std::size_t, int> default_population(std::size_t M)
{
    switch (M) {
    case 2: return {100, 99};
    case 3: return {105, 13};
    case 4: return {286, 10};
    case 5: return {495, 8};
    default: throw config_error("no default population size for M = " + std::to_string(M));
    }
}

struct RunConfig {
    std::string problem = "ZDT1";
    std::size_t objectives = 2;
    Algorithm algorithm = Algorithm::nsga2;
    bool ir2 = false;
    std::size_t pop_size = 0; // 0: size of the reference set
    int generations = 100;
    GeneticParams genetic{0.9, 10.0, 0.1, 0.0}; // eta_m 0: 1/n_var
    Ir2Settings ir2_settings;
    MoeadParams moead;
    std::optional<WfgParams> wfg;
    std::vector<int> gaps;      // empty: default; one entry: Das-Dennis; several: layered
    std::vector<double> shrink; // layered only; empty: 1, 1-1/L, ..., 1/L
    std::optional<MetricKind> association;
    std::uint64_t seed = 1;
    bool record_metrics = true;
    std::size_t front_samples = 1000;

    std::string label() const
    {
        return problem + "-" + std::to_string(objectives) + "_" + to_string(algorithm) + (ir2 ? "-ir2" : "");
    }
};

/// Z for the run: the default lattice, a single Das-Dennis lattice or a layered set.
inline ReferenceSet reference_set_for(const RunConfig& c)
{
    if (c.gaps.empty()) {
        if (c.algorithm == Algorithm::nsga2 && c.pop_size != 0 && c.objectives == 2) {
            return das_dennis(2, static_cast<int>(c.pop_size) - 1);
        }
        return das_dennis(c.objectives, default_population(c.objectives).second);
    }
    if (c.gaps.size() == 1) {
        return das_dennis(c.objectives, c.gaps.front());
    }
    std::vector<double> shrink = c.shrink;
    if (shrink.empty()) {
        const double L = static_cast<double>(c.gaps.size());
        for (std::size_t i = 0; i < c.gaps.size(); ++i) {
            shrink.push_back(1.0 - static_cast<double>(i) / L);
        }
    }
    return layered_points(c.objectives, c.gaps, shrink, LayerLattice::edges);
}

inline ScalarizingMetric association_for(const RunConfig& c)
{
    MetricKind kind = c.association.value_or(c.algorithm == Algorithm::nsga2   ? MetricKind::asf
                                             : c.algorithm == Algorithm::nsga3 ? MetricKind::pdm
                                                                               : MetricKind::pbi);
    if (kind == MetricKind::pbi) {
        return ScalarizingMetric::pbi(c.moead.theta);
    }
    return {kind, 5.0};
}

struct GenerationRecord {
    int generation = 0;
    std::size_t evaluations = 0;
    double hv = 0.0;
    double gd = 0.0;
    double igd = 0.0;
    bool flag = false;  // repair active while producing this generation
    double G = 0.0;
    std::size_t rows = 0;
};

struct RunTrace {
    RunConfig config;
    std::size_t pop_size = 0;
    std::vector<GenerationRecord> records;
    Population final_population;
};

using GenerationCallback = std::function<void(const GenerationRecord&, const Population&)>;

namespace detail {

struct RunSetup {
    ProblemDefinition problem;
    ReferenceSet Z;
    std::size_t N = 0;
    GeneticParams genetic;
};

inline RunSetup resolve(const RunConfig& c)
{
    RunSetup s;
    s.problem = make_problem(c.problem, c.objectives, c.wfg);
    s.Z = reference_set_for(c);
    s.N = c.pop_size == 0 ? s.Z.size() : c.pop_size;
    if (s.N < 4) {
        throw config_error("population size must be at least 4");
    }
    if (c.algorithm != Algorithm::nsga2 && s.N != s.Z.size()) {
        throw config_error(to_string(c.algorithm) + ": population size " + std::to_string(s.N)
                           + " differs from the reference set size " + std::to_string(s.Z.size()));
    }
    if (c.ir2 && s.Z.size() != s.N) {
        throw config_error("IR2: reference set size must equal the population size");
    }
    if (c.generations < 0) {
        throw config_error("generations must be non-negative");
    }
    s.genetic = c.genetic;
    if (s.genetic.eta_m <= 0.0) {
        s.genetic.eta_m = 1.0 / static_cast<double>(s.problem.n_var);
    }
    s.genetic.validate();
    if (c.algorithm == Algorithm::moead) {
        (void)make_moead_state(s.Z, c.moead);
    }
    if (c.ir2) {
        (void)Ir2State(c.ir2_settings, s.Z.size());
    }
    return s;
}

inline Population random_population(const ProblemDefinition& p, std::size_t N, RandomSource& rng)
{
    Population P(N);
    for (auto& ind : P) {
        ind.x.resize(p.n_var);
        for (std::size_t k = 0; k < p.n_var; ++k) {
            ind.x[k] = rng.uniform(p.lower[k], p.upper[k]);
        }
    }
    return P;
}

} // namespace detail

/// Validates the configuration without evaluating anything.
inline void validate(const RunConfig& c) { (void)detail::resolve(c); }

/// One seeded run. The base algorithm draws only from the "init", "mating"
/// and "survival" streams; IR2 uses streams of its own, so with learning off
/// an IR2 run reproduces the base run exactly.
inline RunTrace run(const RunConfig& config, const GenerationCallback& on_generation = {})
{
    const detail::RunSetup setup = detail::resolve(config);
    const ProblemDefinition& problem = setup.problem;
    const ReferenceSet& Z = setup.Z;
    const std::size_t N = setup.N;
    const GeneticParams& gp = setup.genetic;

    const RandomSource root(config.seed);
    RandomSource init = root.stream("init");
    RandomSource mating = root.stream("mating");
    RandomSource survival = root.stream("survival");
    RandomSource repair_rng = root.stream("repair");
    RandomSource subset_rng = root.stream("subset");
    const RandomSource forest_root = root.stream("forest");

    const ScalarizingMetric metric = association_for(config);
    const HvProtocol hv = HvProtocol::for_run(N, config.objectives, suite_of(config.problem));
    std::vector<ObjectiveVector> true_front;
    if (config.record_metrics) {
        true_front = pareto_front_sample(problem, config.front_samples).points;
    }

    EvaluationCounter counter;
    RunTrace trace;
    trace.config = config;
    trace.pop_size = N;

    auto record = [&](int gen, const Population& P, const Ir2Step& step) {
        GenerationRecord r;
        r.generation = gen;
        r.evaluations = counter.count();
        r.flag = step.flag;
        r.G = step.G;
        r.rows = step.rows;
        if (config.record_metrics) {
            std::vector<ObjectiveVector> F;
            const auto fronts = nondominated_sort(objectives_of(P));
            for (std::size_t i : fronts.front()) {
                F.push_back(P[i].f);
            }
            r.hv = hv(F);
            r.gd = gd_igd(F, true_front, DistanceMode::gd);
            r.igd = gd_igd(F, true_front, DistanceMode::igd);
        }
        trace.records.push_back(r);
        if (on_generation) {
            on_generation(r, P);
        }
    };

    Population P = evaluate_all(problem, detail::random_population(problem, N, init), counter);
    record(0, P, {});

    std::optional<Ir2State> ir2;
    if (config.ir2) {
        ir2.emplace(config.ir2_settings, Z.size());
    }
    const double fraction = config.ir2_settings.repair_fraction;
    const RepairSettings rs{config.ir2_settings.eta, 0.01};

    RankedPopulation ranked;
    Nsga3State n3;
    MoeadState md;
    if (config.algorithm == Algorithm::nsga2) {
        ranked = rank_population(P);
    } else if (config.algorithm == Algorithm::moead) {
        md = make_moead_state(Z, config.moead);
        for (const auto& ind : P) {
            update_ideal(md.ideal, ind.f);
        }
    }

    for (int t = 0; t < config.generations; ++t) {
        Ir2Step step;
        if (ir2) {
            step = ir2->prepare(P, t, Z, metric, problem.lower, problem.upper, forest_root);
        }

        if (config.algorithm == Algorithm::moead) {
            const auto subset = subset_rng.sample(N, repair_count(N, fraction));
            std::vector<char> in_subset(N, 0);
            for (std::size_t i : subset) {
                in_subset[i] = 1;
            }
            OffspringHook hook;
            if (step.flag) {
                hook = [&](std::size_t i, DecisionVector y) {
                    return in_subset[i] ? repair_individual(y, ir2->model(), rs, problem.lower, problem.upper, repair_rng)
                                        : y;
                };
            }
            Population Q = moead_generation(P, md, Z, problem, gp, mating, survival, counter, t, hook);
            if (ir2) {
                ir2->finish(Q, t);
            }
        } else {
            Population Q;
            Q.reserve(N + 1);
            while (Q.size() < N) {
                std::size_t a, b;
                if (config.algorithm == Algorithm::nsga2) {
                    a = crowded_tournament(ranked, mating);
                    b = crowded_tournament(ranked, mating);
                } else {
                    a = mating.index(N);
                    b = mating.index(N);
                }
                auto [c1, c2] = sbx_crossover(P[a].x, P[b].x, gp, problem.lower, problem.upper, mating);
                c1 = polynomial_mutation(std::move(c1), gp, problem.lower, problem.upper, mating);
                c2 = polynomial_mutation(std::move(c2), gp, problem.lower, problem.upper, mating);
                Q.push_back({std::move(c1), {}, t + 1});
                Q.push_back({std::move(c2), {}, t + 1});
            }
            Q.resize(N);
            if (step.flag) {
                Q = repair_offspring(std::move(Q), ir2->model(), rs, problem.lower, problem.upper, repair_rng, fraction)
                        .offspring;
            }
            Q = evaluate_all(problem, std::move(Q), counter);
            if (ir2) {
                ir2->finish(Q, t);
            }
            Population U = P;
            U.insert(U.end(), Q.begin(), Q.end());
            if (config.algorithm == Algorithm::nsga2) {
                ranked = nsga2_survival(U, N);
                P = ranked.members;
            } else {
                P = nsga3_survival(U, Z, N, n3, survival);
            }
        }
        record(t + 1, P, step);
    }
    trace.final_population = std::move(P);
    return trace;
}

} // namespace ir2
