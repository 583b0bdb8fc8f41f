#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ir2/core.hpp"
#include "ir2/refassoc.hpp"
#include "ir2/wfg.hpp"

namespace ir2 {

using wfg::WfgParams;

enum class Suite { zdt, dtlz, wfg };

struct ProblemInfo {
    std::string name;
    Suite suite;
    std::vector<std::size_t> objectives;
    std::size_t n_var;
};

/// Everything the registry knows about.
inline const std::vector<ProblemInfo>& problem_registry()
{
    static const std::vector<ProblemInfo> registry = [] {
        std::vector<ProblemInfo> r;
        for (const char* n : {"ZDT1", "ZDT2", "ZDT3", "ZDT4", "ZDT6"}) {
            r.push_back({n, Suite::zdt, {2}, 30});
        }
        for (int i = 1; i <= 4; ++i) {
            r.push_back({"DTLZ" + std::to_string(i), Suite::dtlz, {3, 4, 5}, 15});
        }
        for (int i = 1; i <= 9; ++i) {
            r.push_back({"WFG" + std::to_string(i), Suite::wfg, {3, 4}, 24});
        }
        r.push_back({"WFG4-mod", Suite::wfg, {3, 4}, 24});
        r.push_back({"WFG7-mod", Suite::wfg, {3, 4}, 24});
        return r;
    }();
    return registry;
}

inline const ProblemInfo& problem_info(const std::string& name)
{
    for (const auto& info : problem_registry()) {
        if (info.name == name) {
            return info;
        }
    }
    throw config_error("unknown problem '" + name + "'");
}

inline Suite suite_of(const std::string& name) { return problem_info(name).suite; }

namespace detail {

// Sum of 2|x_k - 0.5| over k >= 2: zero exactly at the shifted optimum and
// bounded by n-1, so g keeps the range of the unmodified suite.
inline double zdt_shift_sum(const DecisionVector& x)
{
    double s = 0.0;
    for (std::size_t k = 1; k < x.size(); ++k) {
        s += 2.0 * std::fabs(x[k] - 0.5);
    }
    return s;
}

inline ObjectiveVector zdt(int which, const DecisionVector& x)
{
    const double n = static_cast<double>(x.size());
    double f1 = x[0];
    double g = 0.0;
    switch (which) {
    case 4: {
        g = 1.0 + 10.0 * (n - 1.0);
        for (std::size_t k = 1; k < x.size(); ++k) {
            const double y = 10.0 * (x[k] - 0.5);
            g += y * y - 10.0 * std::cos(4.0 * std::numbers::pi * y);
        }
        break;
    }
    case 6:
        f1 = 1.0 - std::exp(-4.0 * x[0]) * std::pow(std::sin(6.0 * std::numbers::pi * x[0]), 6.0);
        g = 1.0 + 9.0 * std::pow(zdt_shift_sum(x) / (n - 1.0), 0.25);
        break;
    default:
        g = 1.0 + 9.0 * zdt_shift_sum(x) / (n - 1.0);
        break;
    }
    const double r = f1 / g;
    double h = 0.0;
    switch (which) {
    case 2:
    case 6: h = 1.0 - r * r; break;
    case 3: h = 1.0 - std::sqrt(r) - r * std::sin(10.0 * std::numbers::pi * f1); break;
    default: h = 1.0 - std::sqrt(r); break;
    }
    return {f1, g * h};
}

inline ObjectiveVector dtlz(int which, std::size_t M, const DecisionVector& x)
{
    const std::size_t n = x.size();
    const std::size_t k = n - M + 1;
    double g = 0.0;
    if (which == 1 || which == 3) {
        for (std::size_t i = n - k; i < n; ++i) {
            const double d = x[i] - 0.5;
            g += d * d - std::cos(20.0 * std::numbers::pi * d);
        }
        g = 100.0 * (static_cast<double>(k) + g);
    } else {
        for (std::size_t i = n - k; i < n; ++i) {
            g += (x[i] - 0.5) * (x[i] - 0.5);
        }
    }
    ObjectiveVector f(M);
    if (which == 1) {
        for (std::size_t m = 0; m < M; ++m) {
            double v = 0.5 * (1.0 + g);
            for (std::size_t i = 0; i < M - 1 - m; ++i) {
                v *= x[i];
            }
            if (m > 0) {
                v *= 1.0 - x[M - 1 - m];
            }
            f[m] = v;
        }
        return f;
    }
    const double alpha = which == 4 ? 100.0 : 1.0;
    const double half_pi = std::numbers::pi / 2.0;
    for (std::size_t m = 0; m < M; ++m) {
        double v = 1.0 + g;
        for (std::size_t i = 0; i < M - 1 - m; ++i) {
            v *= std::cos(std::pow(x[i], alpha) * half_pi);
        }
        if (m > 0) {
            v *= std::sin(std::pow(x[M - 1 - m], alpha) * half_pi);
        }
        f[m] = v;
    }
    return f;
}

} // namespace detail

/// Parameters of a WFG instance created by make_problem ("WFG4-mod" and
/// "WFG7-mod" carry the hardened values).
inline WfgParams wfg_params_for(const std::string& name, std::optional<WfgParams> override_params = std::nullopt)
{
    if (override_params) {
        return *override_params;
    }
    if (name == "WFG4-mod") {
        return {70.0, 5.0, 0.35};
    }
    if (name == "WFG7-mod") {
        return {0.98 / 49.98, 0.02, 100.0};
    }
    const int number = name[3] - '0';
    return wfg::default_params(number);
}

inline ProblemDefinition make_problem(const std::string& name, std::size_t M,
                                      std::optional<WfgParams> variant_params = std::nullopt)
{
    const ProblemInfo& info = problem_info(name);
    if (std::find(info.objectives.begin(), info.objectives.end(), M) == info.objectives.end()) {
        throw config_error(name + ": unsupported number of objectives " + std::to_string(M));
    }
    ProblemDefinition p;
    p.name = name;
    p.n_var = info.n_var;
    p.n_obj = M;
    switch (info.suite) {
    case Suite::zdt: {
        const int which = name[3] - '0';
        p.lower.assign(p.n_var, 0.0);
        p.upper.assign(p.n_var, 1.0);
        p.evaluate = [which](const DecisionVector& x) { return detail::zdt(which, x); };
        break;
    }
    case Suite::dtlz: {
        const int which = name[4] - '0';
        p.lower.assign(p.n_var, 0.0);
        p.upper.assign(p.n_var, 1.0);
        p.evaluate = [which, M](const DecisionVector& x) { return detail::dtlz(which, M, x); };
        break;
    }
    case Suite::wfg: {
        const int number = name[3] - '0';
        const int k = 2 * (static_cast<int>(M) - 1);
        const int l = static_cast<int>(p.n_var) - k;
        const wfg::Problem problem(number, static_cast<int>(M), k, l, wfg_params_for(name, variant_params));
        p.lower.assign(p.n_var, 0.0);
        p.upper.resize(p.n_var);
        for (std::size_t i = 0; i < p.n_var; ++i) {
            p.upper[i] = 2.0 * static_cast<double>(i + 1);
        }
        p.evaluate = [problem](const DecisionVector& x) { return problem(x); };
        break;
    }
    }
    return p;
}

// ---- true fronts ----------------------------------------------------------

struct FrontSample {
    std::vector<ObjectiveVector> points;
    std::string spacing;
};

namespace detail {

inline std::vector<ObjectiveVector> nondominated_filter(const std::vector<ObjectiveVector>& pts)
{
    std::vector<ObjectiveVector> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
            dominated = j != i && dominates(pts[j], pts[i]);
        }
        if (!dominated) {
            out.push_back(pts[i]);
        }
    }
    return out;
}

// Das-Dennis lattice with the largest gap count whose size does not exceed count.
inline ReferenceSet lattice_not_exceeding(std::size_t M, std::size_t count)
{
    int p = 1;
    while (das_dennis_count(M, p + 1) <= count) {
        ++p;
    }
    return das_dennis(M, p);
}

} // namespace detail

/// Samples the analytic Pareto front.
///
/// Two-objective fronts get exactly `count` points at equally spaced f1 (ZDT3
/// spreads them over its five segments in proportion to their f1 lengths).
/// Fronts with M >= 3 are sampled on the Das-Dennis lattice with the largest
/// size not exceeding `count` (DTLZ) or on a shape-parameter grid (WFG).
inline FrontSample pareto_front_sample(const ProblemDefinition& problem, std::size_t count)
{
    if (count < 2) {
        throw contract_error("pareto_front_sample: count must be at least 2");
    }
    const Suite suite = suite_of(problem.name);
    const std::size_t M = problem.n_obj;
    FrontSample out;
    if (suite == Suite::zdt) {
        const int which = problem.name[3] - '0';
        std::vector<std::pair<double, double>> segments;
        if (which == 3) {
            segments = {{0.0, 0.0830015349},
                        {0.1822287280, 0.2577623634},
                        {0.4093136748, 0.4538821041},
                        {0.6183967944, 0.6525117038},
                        {0.8233317983, 0.8518328654}};
        } else if (which == 6) {
            segments = {{0.2807753191, 1.0}};
        } else {
            segments = {{0.0, 1.0}};
        }
        double total = 0.0;
        for (auto [a, b] : segments) {
            total += b - a;
        }
        // Largest-remainder allocation so the counts sum to exactly `count`.
        std::vector<std::size_t> alloc(segments.size());
        std::vector<std::pair<double, std::size_t>> remainders;
        std::size_t used = 0;
        for (std::size_t s = 0; s < segments.size(); ++s) {
            const double share = count * (segments[s].second - segments[s].first) / total;
            alloc[s] = static_cast<std::size_t>(std::floor(share));
            used += alloc[s];
            remainders.emplace_back(-(share - alloc[s]), s);
        }
        std::sort(remainders.begin(), remainders.end());
        for (std::size_t i = 0; used < count; ++i, ++used) {
            ++alloc[remainders[i % remainders.size()].second];
        }
        for (std::size_t s = 0; s < segments.size(); ++s) {
            const auto [a, b] = segments[s];
            for (std::size_t i = 0; i < alloc[s]; ++i) {
                const double f1 = alloc[s] == 1 ? a : a + (b - a) * static_cast<double>(i) / (alloc[s] - 1);
                double f2;
                switch (which) {
                case 2:
                case 6: f2 = 1.0 - f1 * f1; break;
                case 3: f2 = 1.0 - std::sqrt(f1) - f1 * std::sin(10.0 * std::numbers::pi * f1); break;
                default: f2 = 1.0 - std::sqrt(f1); break;
                }
                out.points.push_back({f1, f2});
            }
        }
        out.spacing = "equally spaced f1";
        return out;
    }
    if (suite == Suite::dtlz) {
        const ReferenceSet lattice = detail::lattice_not_exceeding(M, count);
        const bool linear = problem.name == "DTLZ1";
        for (const auto& z : lattice.points) {
            ObjectiveVector f = z;
            if (linear) {
                for (double& v : f) {
                    v *= 0.5;
                }
            } else {
                double norm = 0.0;
                for (double v : f) {
                    norm += v * v;
                }
                norm = std::sqrt(norm);
                for (double& v : f) {
                    v /= norm;
                }
            }
            out.points.push_back(std::move(f));
        }
        out.spacing = "das-dennis p=" + std::to_string(lattice.gaps);
        return out;
    }
    // WFG: walk a grid over the M-1 shape parameters and apply the shape
    // functions directly (distance component zero on the front).
    const int number = problem.name[3] - '0';
    const std::size_t dims = M - 1;
    std::size_t per_dim = 2;
    while (static_cast<std::size_t>(std::pow(per_dim + 1, dims)) <= count) {
        ++per_dim;
    }
    if (number == 3) {
        per_dim = count;
    }
    std::vector<std::size_t> idx(dims, 0);
    std::vector<ObjectiveVector> pts;
    for (;;) {
        std::vector<double> x(dims);
        for (std::size_t d = 0; d < dims; ++d) {
            x[d] = static_cast<double>(idx[d]) / (per_dim - 1);
        }
        if (number == 3) {
            for (std::size_t d = 1; d < dims; ++d) {
                x[d] = 0.5;
            }
        }
        ObjectiveVector f(M);
        for (std::size_t m = 1; m <= M; ++m) {
            double h;
            const int mi = static_cast<int>(m);
            if (number == 1) {
                h = m < M ? wfg::convex(x, mi) : wfg::mixed(x, 5, 1.0);
            } else if (number == 2) {
                h = m < M ? wfg::convex(x, mi) : wfg::disc(x, 5, 1.0, 1.0);
            } else if (number == 3) {
                h = wfg::linear(x, mi);
            } else {
                h = wfg::concave(x, mi);
            }
            f[m - 1] = 2.0 * static_cast<double>(m) * h;
        }
        pts.push_back(std::move(f));
        if (number == 3) {
            // Degenerate front: only the first shape parameter matters.
            if (++idx[0] == per_dim) {
                break;
            }
            continue;
        }
        std::size_t d = 0;
        while (d < dims && ++idx[d] == per_dim) {
            idx[d++] = 0;
        }
        if (d == dims) {
            break;
        }
    }
    out.points = number == 2 ? detail::nondominated_filter(pts) : std::move(pts);
    out.spacing = "shape grid " + std::to_string(per_dim) + " per parameter";
    return out;
}

} // namespace ir2
