#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "ir2/core.hpp"

namespace ir2 {

struct GeneticParams {
    double p_c = 0.9;
    double eta_c = 10.0;
    double p_m = 0.1;
    double eta_m = 1.0; // set per problem; 1/n_var by default

    static GeneticParams defaults_for(std::size_t n_var)
    {
        GeneticParams g;
        g.eta_m = 1.0 / static_cast<double>(n_var);
        return g;
    }

    void validate() const
    {
        if (!(p_c >= 0.0 && p_c <= 1.0 && p_m >= 0.0 && p_m <= 1.0)) {
            throw config_error("genetic parameters: probabilities must lie in [0, 1]");
        }
        if (!(eta_c > 0.0 && eta_m > 0.0)) {
            throw config_error("genetic parameters: distribution indices must be positive");
        }
    }
};

/// SBX spread factor for a uniform draw u.
inline double sbx_beta(double u, double eta_c)
{
    const double e = 1.0 / (eta_c + 1.0);
    return u <= 0.5 ? std::pow(2.0 * u, e) : std::pow(1.0 / (2.0 * (1.0 - u)), e);
}

/// Simulated binary crossover. One draw gates the pair with p_c; each variable
/// then crosses with probability 0.5, and the two child values are exchanged
/// with probability 0.5. Children keep the parents' mean before clipping.
inline std::pair<DecisionVector, DecisionVector> sbx_crossover(const DecisionVector& p1, const DecisionVector& p2,
                                                               const GeneticParams& params, const DecisionVector& lower,
                                                               const DecisionVector& upper, RandomSource& rng)
{
    if (p1.size() != p2.size() || p1.size() != lower.size() || upper.size() != lower.size()) {
        throw contract_error("sbx_crossover: length mismatch");
    }
    DecisionVector c1 = p1;
    DecisionVector c2 = p2;
    if (rng.uniform() >= params.p_c) {
        return {c1, c2};
    }
    for (std::size_t k = 0; k < p1.size(); ++k) {
        if (rng.uniform() >= 0.5 || std::abs(p1[k] - p2[k]) <= 1e-14) {
            continue;
        }
        const double beta = sbx_beta(rng.uniform(), params.eta_c);
        const double a = 0.5 * ((1.0 + beta) * p1[k] + (1.0 - beta) * p2[k]);
        const double b = 0.5 * ((1.0 - beta) * p1[k] + (1.0 + beta) * p2[k]);
        const bool swap = rng.uniform() < 0.5;
        c1[k] = std::clamp(swap ? b : a, lower[k], upper[k]);
        c2[k] = std::clamp(swap ? a : b, lower[k], upper[k]);
    }
    return {c1, c2};
}

/// Bounded polynomial mutation perturbation for one variable given the draw r.
inline double polynomial_delta(double x, double lo, double hi, double r, double eta_m)
{
    const double span = hi - lo;
    if (span <= 0.0) {
        return 0.0;
    }
    const double d1 = (x - lo) / span;
    const double d2 = (hi - x) / span;
    const double power = 1.0 / (eta_m + 1.0);
    if (r < 0.5) {
        const double v = 2.0 * r + (1.0 - 2.0 * r) * std::pow(1.0 - d1, eta_m + 1.0);
        return std::pow(v, power) - 1.0;
    }
    const double v = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(1.0 - d2, eta_m + 1.0);
    return 1.0 - std::pow(v, power);
}

inline DecisionVector polynomial_mutation(DecisionVector x, const GeneticParams& params, const DecisionVector& lower,
                                          const DecisionVector& upper, RandomSource& rng)
{
    if (x.size() != lower.size() || upper.size() != lower.size()) {
        throw contract_error("polynomial_mutation: length mismatch");
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (rng.uniform() >= params.p_m) {
            continue;
        }
        const double delta = polynomial_delta(x[k], lower[k], upper[k], rng.uniform(), params.eta_m);
        x[k] = std::clamp(x[k] + delta * (upper[k] - lower[k]), lower[k], upper[k]);
    }
    return x;
}

} // namespace ir2
