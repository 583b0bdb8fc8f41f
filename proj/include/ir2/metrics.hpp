#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ir2/core.hpp"
#include "ir2/problems.hpp"

namespace ir2 {

// ---- hypervolume ----------------------------------------------------------

namespace detail {

// Drops points that fail to strictly dominate ref, duplicates and dominated points.
inline std::vector<ObjectiveVector> hv_prepare(const std::vector<ObjectiveVector>& front, const ObjectiveVector& ref)
{
    std::vector<ObjectiveVector> pts;
    for (const auto& f : front) {
        if (f.size() != ref.size()) {
            throw contract_error("hypervolume: point dimension differs from the reference");
        }
        bool inside = true;
        for (std::size_t k = 0; k < f.size(); ++k) {
            inside = inside && f[k] < ref[k];
        }
        if (inside) {
            pts.push_back(f);
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return nondominated_filter(pts);
}

inline double hv2d(std::vector<ObjectiveVector> pts, const ObjectiveVector& ref)
{
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]); });
    double area = 0.0;
    double ceiling = ref[1];
    for (const auto& p : pts) {
        if (p[1] < ceiling) {
            area += (ref[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    return area;
}

inline double box_volume(const ObjectiveVector& p, const ObjectiveVector& ref)
{
    double v = 1.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        v *= ref[k] - p[k];
    }
    return v;
}

inline double wfg_hv(std::vector<ObjectiveVector> pts, const ObjectiveVector& ref);

// Part of the box of pts[i] not covered by pts[i+1..].
inline double exclusive_hv(const std::vector<ObjectiveVector>& pts, std::size_t i, const ObjectiveVector& ref)
{
    std::vector<ObjectiveVector> limited;
    limited.reserve(pts.size() - i - 1);
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
        ObjectiveVector q(ref.size());
        for (std::size_t k = 0; k < ref.size(); ++k) {
            q[k] = std::max(pts[i][k], pts[j][k]);
        }
        limited.push_back(std::move(q));
    }
    return box_volume(pts[i], ref) - wfg_hv(nondominated_filter(limited), ref);
}

// Exclusive-contribution recursion over a mutually nondominated set.
inline double wfg_hv(std::vector<ObjectiveVector> pts, const ObjectiveVector& ref)
{
    if (pts.empty()) {
        return 0.0;
    }
    if (ref.size() == 2) {
        return hv2d(std::move(pts), ref);
    }
    if (pts.size() == 1) {
        return box_volume(pts.front(), ref);
    }
    const std::size_t last = ref.size() - 1;
    std::sort(pts.begin(), pts.end(), [last](const auto& a, const auto& b) { return a[last] > b[last]; });
    double total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        total += exclusive_hv(pts, i, ref);
    }
    return total;
}

} // namespace detail

/// Exact dominated hypervolume for minimisation, M in [1, 5].
inline double hypervolume(const std::vector<ObjectiveVector>& front, const ObjectiveVector& ref)
{
    if (ref.empty()) {
        throw contract_error("hypervolume: empty reference point");
    }
    if (ref.size() > 5) {
        throw unsupported_error("hypervolume: more than five objectives");
    }
    auto pts = detail::hv_prepare(front, ref);
    if (pts.empty()) {
        return 0.0;
    }
    if (ref.size() == 1) {
        double best = ref[0];
        for (const auto& p : pts) {
            best = std::min(best, p[0]);
        }
        return ref[0] - best;
    }
    return detail::wfg_hv(std::move(pts), ref);
}

/// [N/(N-1)] repeated M times.
inline ObjectiveVector hv_reference(std::size_t N, std::size_t M)
{
    if (N < 2) {
        throw contract_error("hv_reference: N must be at least 2");
    }
    return ObjectiveVector(M, static_cast<double>(N) / static_cast<double>(N - 1));
}

struct HvProtocol {
    ObjectiveVector reference;
    bool wfg_scaling = false; // divide objective i (1-based) by 2i first

    static HvProtocol for_run(std::size_t N, std::size_t M, Suite suite)
    {
        return {hv_reference(N, M), suite == Suite::wfg};
    }

    std::vector<ObjectiveVector> prepare(std::vector<ObjectiveVector> F) const
    {
        if (wfg_scaling) {
            for (auto& f : F) {
                for (std::size_t k = 0; k < f.size(); ++k) {
                    f[k] /= 2.0 * static_cast<double>(k + 1);
                }
            }
        }
        return F;
    }

    double operator()(const std::vector<ObjectiveVector>& F) const { return hypervolume(prepare(F), reference); }
};

// ---- GD / IGD -------------------------------------------------------------

enum class DistanceMode { gd, igd };

namespace detail {

inline double mean_nearest(const std::vector<ObjectiveVector>& from, const std::vector<ObjectiveVector>& to)
{
    if (from.empty() || to.empty()) {
        throw contract_error("gd_igd: empty point set");
    }
    double total = 0.0;
    for (const auto& a : from) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& b : to) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k) {
                const double d = a[k] - b[k];
                d2 += d * d;
            }
            best = std::min(best, d2);
        }
        total += best;
    }
    return std::sqrt(total) / static_cast<double>(from.size());
}

} // namespace detail

/// (1/|A|) * sqrt(sum of squared nearest distances), A = front for GD and the
/// reference sample for IGD.
inline double gd_igd(const std::vector<ObjectiveVector>& front, const std::vector<ObjectiveVector>& reference,
                     DistanceMode mode)
{
    return mode == DistanceMode::gd ? detail::mean_nearest(front, reference) : detail::mean_nearest(reference, front);
}

// ---- recovery / savings ---------------------------------------------------

struct Recovery {
    std::optional<int> generation; // empty when the base series never reaches the value
    double savings = 0.0;          // S percent; a lower bound when not recovered

    bool recovered() const noexcept { return generation.has_value(); }

    std::string display() const
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, recovered() ? "%.1f" : "> %.1f", savings);
        return buf;
    }
};

/// First generation g where the base median series reaches `repaired_value`;
/// S = 100 * (g - t) / t.
inline Recovery recovery_savings(const std::vector<double>& base_series, double repaired_value, int t)
{
    if (t <= 0) {
        throw contract_error("recovery_savings: t must be positive");
    }
    Recovery r;
    for (std::size_t g = 0; g < base_series.size(); ++g) {
        if (base_series[g] >= repaired_value) {
            r.generation = static_cast<int>(g);
            r.savings = 100.0 * static_cast<double>(static_cast<int>(g) - t) / t;
            return r;
        }
    }
    const int g_max = static_cast<int>(base_series.size()) - 1;
    r.savings = 100.0 * static_cast<double>(g_max - t) / t;
    return r;
}

// ---- statistics -----------------------------------------------------------

/// Lower-middle element for even sizes, so the median is always an observed value.
inline double median(std::vector<double> v)
{
    if (v.empty()) {
        throw contract_error("median: empty sample");
    }
    const std::size_t mid = (v.size() - 1) / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    return v[mid];
}

enum class Alternative {
    two_sided,
    greater, // a tends to exceed b
    less,
};

namespace detail {

// Midranks of the pooled sample and the tie-correction term sum(t^3 - t).
inline std::pair<std::vector<double>, double> midranks(const std::vector<double>& pooled)
{
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    std::vector<double> rank(n);
    double ties = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) {
            ++j;
        }
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            rank[order[k]] = r;
        }
        const double t = static_cast<double>(j - i + 1);
        ties += t * t * t - t;
        i = j + 1;
    }
    return {rank, ties};
}

} // namespace detail

/// Wilcoxon rank-sum p-value. Exact over all rank assignments when
/// |a| + |b| <= 16, otherwise the normal approximation with tie and
/// continuity corrections.
inline double wilcoxon_ranksum(const std::vector<double>& a, const std::vector<double>& b,
                               Alternative alt = Alternative::two_sided)
{
    if (a.empty() || b.empty()) {
        throw contract_error("wilcoxon_ranksum: empty sample");
    }
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto [rank, ties] = detail::midranks(pooled);
    const std::size_t n1 = a.size();
    const std::size_t n = pooled.size();
    const double W = std::accumulate(rank.begin(), rank.begin() + static_cast<std::ptrdiff_t>(n1), 0.0);

    double p_ge = 0.0; // P(W' >= W)
    double p_le = 0.0; // P(W' <= W)
    if (n <= 16) {
        const double eps = 1e-9;
        std::size_t total = 0;
        std::size_t ge = 0;
        std::size_t le = 0;
        std::vector<bool> mask(n, false);
        std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(n1), true);
        do {
            double w = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (mask[i]) {
                    w += rank[i];
                }
            }
            ++total;
            ge += w >= W - eps ? 1 : 0;
            le += w <= W + eps ? 1 : 0;
        } while (std::prev_permutation(mask.begin(), mask.end()));
        p_ge = static_cast<double>(ge) / static_cast<double>(total);
        p_le = static_cast<double>(le) / static_cast<double>(total);
    } else {
        const double dn = static_cast<double>(n);
        const double d1 = static_cast<double>(n1);
        const double d2 = static_cast<double>(b.size());
        const double mean = d1 * (dn + 1.0) / 2.0;
        const double var = d1 * d2 / 12.0 * ((dn + 1.0) - ties / (dn * (dn - 1.0)));
        if (var <= 0.0) {
            return 1.0;
        }
        const double sd = std::sqrt(var);
        auto upper_tail = [](double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); };
        p_ge = upper_tail((W - mean - 0.5) / sd);
        p_le = 1.0 - upper_tail((W - mean + 0.5) / sd);
    }
    switch (alt) {
    case Alternative::greater: return std::min(1.0, p_ge);
    case Alternative::less: return std::min(1.0, p_le);
    case Alternative::two_sided: break;
    }
    return std::min(1.0, 2.0 * std::min(p_ge, p_le));
}

} // namespace ir2
