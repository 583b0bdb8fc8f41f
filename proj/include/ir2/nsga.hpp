#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "ir2/core.hpp"
#include "ir2/refassoc.hpp"

namespace ir2 {

/// Fronts as index lists, best first; indices within a front ascend.
inline std::vector<std::vector<std::size_t>> nondominated_sort(const std::vector<ObjectiveVector>& F)
{
    const std::size_t n = F.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> count(n, 0);
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dominates(F[i], F[j])) {
                dominated[i].push_back(j);
                ++count[j];
            } else if (dominates(F[j], F[i])) {
                dominated[j].push_back(i);
                ++count[i];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (count[i] == 0) {
            current.push_back(i);
        }
    }
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t i : current) {
            for (std::size_t j : dominated[i]) {
                if (--count[j] == 0) {
                    next.push_back(j);
                }
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return fronts;
}

/// Crowding distance of each member of one front (same order as `front`).
inline std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& F, const std::vector<std::size_t>& front)
{
    const std::size_t n = front.size();
    std::vector<double> d(n, 0.0);
    if (n == 0) {
        return d;
    }
    const double inf = std::numeric_limits<double>::infinity();
    if (n <= 2) {
        std::fill(d.begin(), d.end(), inf);
        return d;
    }
    const std::size_t M = F[front.front()].size();
    std::vector<std::size_t> order(n);
    for (std::size_t m = 0; m < M; ++m) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return F[front[a]][m] < F[front[b]][m]; });
        const double lo = F[front[order.front()]][m];
        const double hi = F[front[order.back()]][m];
        d[order.front()] = inf;
        d[order.back()] = inf;
        if (hi - lo <= 0.0) {
            continue;
        }
        for (std::size_t p = 1; p + 1 < n; ++p) {
            d[order[p]] += (F[front[order[p + 1]]][m] - F[front[order[p - 1]]][m]) / (hi - lo);
        }
    }
    return d;
}

struct RankedPopulation {
    Population members;
    std::vector<std::size_t> rank;
    std::vector<double> crowding;
};

/// Rank and crowding for every member of P.
inline RankedPopulation rank_population(Population P)
{
    const auto F = objectives_of(P);
    RankedPopulation out;
    out.rank.assign(P.size(), 0);
    out.crowding.assign(P.size(), 0.0);
    const auto fronts = nondominated_sort(F);
    for (std::size_t r = 0; r < fronts.size(); ++r) {
        const auto cd = crowding_distance(F, fronts[r]);
        for (std::size_t p = 0; p < fronts[r].size(); ++p) {
            out.rank[fronts[r][p]] = r;
            out.crowding[fronts[r][p]] = cd[p];
        }
    }
    out.members = std::move(P);
    return out;
}

/// Elitist truncation of the union to N. Whole fronts in index order, then
/// the split front by descending crowding (lowest index on ties). Survivors
/// keep the rank and crowding computed on the union.
inline RankedPopulation nsga2_survival(const Population& U, std::size_t N)
{
    if (N > U.size()) {
        throw contract_error("nsga2_survival: N exceeds the union size");
    }
    const auto F = objectives_of(U);
    const auto fronts = nondominated_sort(F);
    RankedPopulation out;
    for (std::size_t r = 0; r < fronts.size() && out.members.size() < N; ++r) {
        const auto& front = fronts[r];
        const auto cd = crowding_distance(F, front);
        std::vector<std::size_t> pick(front.size());
        std::iota(pick.begin(), pick.end(), std::size_t{0});
        if (out.members.size() + front.size() > N) {
            std::stable_sort(pick.begin(), pick.end(), [&](std::size_t a, std::size_t b) { return cd[a] > cd[b]; });
            pick.resize(N - out.members.size());
        }
        for (std::size_t p : pick) {
            out.members.push_back(U[front[p]]);
            out.rank.push_back(r);
            out.crowding.push_back(cd[p]);
        }
    }
    return out;
}

/// Crowded binary tournament; the first draw wins full ties.
inline std::size_t crowded_tournament(const RankedPopulation& P, RandomSource& rng)
{
    const std::size_t a = rng.index(P.members.size());
    const std::size_t b = rng.index(P.members.size());
    if (P.rank[a] != P.rank[b]) {
        return P.rank[a] < P.rank[b] ? a : b;
    }
    return P.crowding[b] > P.crowding[a] ? b : a;
}

// ---- NSGA-III -------------------------------------------------------------

/// Normalization memory carried across generations.
struct Nsga3State {
    ObjectiveVector ideal;
    std::vector<ObjectiveVector> extremes;
};

namespace detail {

inline std::vector<ObjectiveVector> find_extremes(const std::vector<ObjectiveVector>& cand, const ObjectiveVector& ideal)
{
    const std::size_t M = ideal.size();
    std::vector<ObjectiveVector> ext;
    for (std::size_t j = 0; j < M; ++j) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t i = 0; i < cand.size(); ++i) {
            double v = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < M; ++k) {
                const double w = k == j ? 1.0 : 1e-6;
                v = std::max(v, (cand[i][k] - ideal[k]) / w);
            }
            if (v < best) {
                best = v;
                arg = i;
            }
        }
        ext.push_back(cand[arg]);
    }
    return ext;
}

// Hyperplane intercepts through the extreme points; empty when degenerate.
inline std::vector<double> intercepts(const std::vector<ObjectiveVector>& ext, const ObjectiveVector& ideal)
{
    const auto M = static_cast<Eigen::Index>(ideal.size());
    Eigen::MatrixXd A(M, M);
    for (Eigen::Index r = 0; r < M; ++r) {
        for (Eigen::Index c = 0; c < M; ++c) {
            A(r, c) = ext[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] - ideal[static_cast<std::size_t>(c)];
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) {
        return {};
    }
    const Eigen::VectorXd a = lu.solve(Eigen::VectorXd::Ones(M));
    std::vector<double> out(static_cast<std::size_t>(M));
    for (Eigen::Index k = 0; k < M; ++k) {
        const double v = 1.0 / a(k);
        if (!std::isfinite(v) || v <= 1e-6) {
            return {};
        }
        out[static_cast<std::size_t>(k)] = v;
    }
    return out;
}

} // namespace detail

/// Reference-point niching survival with adaptive normalization and PDM association.
inline Population nsga3_survival(const Population& U, const ReferenceSet& Z, std::size_t N, Nsga3State& state,
                                 RandomSource& rng)
{
    if (N > U.size()) {
        throw contract_error("nsga3_survival: N exceeds the union size");
    }
    const auto F = objectives_of(U);
    const std::size_t M = F.front().size();
    const auto fronts = nondominated_sort(F);

    std::vector<std::size_t> S;
    std::size_t last = 0;
    for (; last < fronts.size(); ++last) {
        S.insert(S.end(), fronts[last].begin(), fronts[last].end());
        if (S.size() >= N) {
            break;
        }
    }

    if (state.ideal.size() != M) {
        state.ideal.assign(M, std::numeric_limits<double>::infinity());
    }
    for (const auto& f : F) {
        for (std::size_t k = 0; k < M; ++k) {
            state.ideal[k] = std::min(state.ideal[k], f[k]);
        }
    }
    std::vector<ObjectiveVector> cand;
    for (std::size_t i : S) {
        cand.push_back(F[i]);
    }
    cand.insert(cand.end(), state.extremes.begin(), state.extremes.end());
    state.extremes = detail::find_extremes(cand, state.ideal);

    if (S.size() == N) {
        Population out;
        for (std::size_t i : S) {
            out.push_back(U[i]);
        }
        return out;
    }

    std::vector<double> icpt = detail::intercepts(state.extremes, state.ideal);
    if (icpt.empty()) {
        icpt.assign(M, 0.0);
        for (std::size_t i : fronts.front()) {
            for (std::size_t k = 0; k < M; ++k) {
                icpt[k] = std::max(icpt[k], F[i][k] - state.ideal[k]);
            }
        }
    }
    for (double& v : icpt) {
        v = std::max(v, 1e-12);
    }

    std::vector<Association> assoc(S.size());
    for (std::size_t p = 0; p < S.size(); ++p) {
        ObjectiveVector fbar(M);
        for (std::size_t k = 0; k < M; ++k) {
            fbar[k] = (F[S[p]][k] - state.ideal[k]) / icpt[k];
        }
        assoc[p] = associate_one(fbar, Z, ScalarizingMetric::pdm());
    }

    const std::size_t n_prior = S.size() - fronts[last].size();
    std::vector<std::size_t> niche(Z.size(), 0);
    Population out;
    for (std::size_t p = 0; p < n_prior; ++p) {
        ++niche[assoc[p].index];
        out.push_back(U[S[p]]);
    }

    // Candidates of the split front, grouped by reference point.
    std::vector<std::vector<std::size_t>> pool(Z.size());
    for (std::size_t p = n_prior; p < S.size(); ++p) {
        pool[assoc[p].index].push_back(p);
    }
    std::vector<std::size_t> open_refs;
    for (std::size_t j = 0; j < Z.size(); ++j) {
        if (!pool[j].empty()) {
            open_refs.push_back(j);
        }
    }
    while (out.size() < N) {
        std::size_t lowest = std::numeric_limits<std::size_t>::max();
        for (std::size_t j : open_refs) {
            lowest = std::min(lowest, niche[j]);
        }
        std::vector<std::size_t> tied;
        for (std::size_t j : open_refs) {
            if (niche[j] == lowest) {
                tied.push_back(j);
            }
        }
        const std::size_t j = tied[tied.size() == 1 ? 0 : rng.index(tied.size())];
        auto& members = pool[j];
        std::size_t pos = 0;
        if (niche[j] == 0) {
            for (std::size_t q = 1; q < members.size(); ++q) {
                if (assoc[members[q]].value < assoc[members[pos]].value) {
                    pos = q;
                }
            }
        } else if (members.size() > 1) {
            pos = rng.index(members.size());
        }
        out.push_back(U[S[members[pos]]]);
        members.erase(members.begin() + static_cast<std::ptrdiff_t>(pos));
        ++niche[j];
        if (members.empty()) {
            open_refs.erase(std::find(open_refs.begin(), open_refs.end(), j));
        }
    }
    return out;
}

} // namespace ir2
