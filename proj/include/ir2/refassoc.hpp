#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>
#include <vector>

#include "ir2/core.hpp"

namespace ir2 {

struct ReferenceSet {
    std::vector<ObjectiveVector> points;
    int gaps = 0; // lattice gap count p; 0 for layered sets

    std::size_t size() const noexcept { return points.size(); }
    std::size_t dimension() const noexcept { return points.empty() ? 0 : points.front().size(); }
};

/// C(p + M - 1, M - 1).
inline std::size_t das_dennis_count(std::size_t M, int p)
{
    std::size_t n = static_cast<std::size_t>(p) + M - 1;
    std::size_t r = M - 1;
    std::size_t c = 1;
    for (std::size_t i = 1; i <= r; ++i) {
        c = c * (n - r + i) / i;
    }
    return c;
}

namespace detail {

inline void das_dennis_recurse(std::vector<int>& counts, std::size_t dim, int left, int p,
                               std::vector<ObjectiveVector>& out)
{
    const std::size_t M = counts.size();
    if (dim == M - 1) {
        counts[dim] = left;
        ObjectiveVector z(M);
        for (std::size_t k = 0; k < M; ++k) {
            z[k] = static_cast<double>(counts[k]) / p;
        }
        out.push_back(std::move(z));
        return;
    }
    for (int c = left; c >= 0; --c) {
        counts[dim] = c;
        das_dennis_recurse(counts, dim + 1, left - c, p, out);
    }
}

} // namespace detail

/// Simplex lattice with p divisions per axis.
inline ReferenceSet das_dennis(std::size_t M, int p)
{
    if (M < 2 || p < 1) {
        throw contract_error("das_dennis: need M >= 2 and p >= 1");
    }
    ReferenceSet set;
    set.gaps = p;
    set.points.reserve(das_dennis_count(M, p));
    std::vector<int> counts(M, 0);
    detail::das_dennis_recurse(counts, 0, p, p, set.points);
    return set;
}

enum class LayerLattice {
    full,  // every lattice point of the layer
    edges, // only points on the simplex edges (at most two nonzero coordinates)
};

/// Union of Das-Dennis layers, each contracted toward the simplex centroid by
/// its shrink factor. Exact duplicates are dropped (first occurrence kept).
inline ReferenceSet layered_points(std::size_t M, const std::vector<int>& layer_gaps, const std::vector<double>& shrink,
                                   LayerLattice lattice = LayerLattice::full)
{
    if (layer_gaps.empty() || layer_gaps.size() != shrink.size()) {
        throw contract_error("layered_points: gap and shrink lists must be non-empty and equal length");
    }
    for (std::size_t i = 0; i < shrink.size(); ++i) {
        if (!(shrink[i] > 0.0 && shrink[i] <= 1.0) || (i > 0 && !(shrink[i] < shrink[i - 1]))) {
            throw contract_error("layered_points: shrink factors must lie in (0,1] and strictly decrease");
        }
    }
    ReferenceSet out;
    std::set<ObjectiveVector> seen;
    const double centroid = 1.0 / static_cast<double>(M);
    for (std::size_t layer = 0; layer < layer_gaps.size(); ++layer) {
        const ReferenceSet base = das_dennis(M, layer_gaps[layer]);
        for (const auto& z : base.points) {
            if (lattice == LayerLattice::edges) {
                const auto nonzero = std::count_if(z.begin(), z.end(), [](double v) { return v > 0.0; });
                if (nonzero > 2) {
                    continue;
                }
            }
            ObjectiveVector q(M);
            for (std::size_t k = 0; k < M; ++k) {
                q[k] = shrink[layer] == 1.0 ? z[k] : centroid + shrink[layer] * (z[k] - centroid);
            }
            if (seen.insert(q).second) {
                out.points.push_back(std::move(q));
            }
        }
    }
    if (layer_gaps.size() == 1) {
        out.gaps = layer_gaps.front();
    }
    return out;
}

/// Share of points with at least one zero coordinate.
inline double boundary_fraction(const ReferenceSet& set, double tol = 1e-12)
{
    if (set.points.empty()) {
        return 0.0;
    }
    std::size_t boundary = 0;
    for (const auto& z : set.points) {
        if (std::any_of(z.begin(), z.end(), [tol](double v) { return v <= tol; })) {
            ++boundary;
        }
    }
    return static_cast<double>(boundary) / static_cast<double>(set.points.size());
}

// ---- normalization --------------------------------------------------------

struct NormalizationFrame {
    ObjectiveVector ideal;
    ObjectiveVector nadir;

    static constexpr double min_span = 1e-12;

    ObjectiveVector apply(const ObjectiveVector& f) const
    {
        ObjectiveVector out(f.size());
        for (std::size_t k = 0; k < f.size(); ++k) {
            out[k] = (f[k] - ideal[k]) / std::max(nadir[k] - ideal[k], min_span);
        }
        return out;
    }
};

inline NormalizationFrame make_frame(const std::vector<ObjectiveVector>& F)
{
    if (F.empty()) {
        throw contract_error("normalize: empty objective set");
    }
    const std::size_t M = F.front().size();
    NormalizationFrame frame{ObjectiveVector(M, std::numeric_limits<double>::infinity()),
                             ObjectiveVector(M, -std::numeric_limits<double>::infinity())};
    for (const auto& f : F) {
        if (f.size() != M) {
            throw contract_error("normalize: inconsistent objective dimension");
        }
        for (std::size_t k = 0; k < M; ++k) {
            frame.ideal[k] = std::min(frame.ideal[k], f[k]);
            frame.nadir[k] = std::max(frame.nadir[k], f[k]);
        }
    }
    return frame;
}

/// Ideal/nadir frame of F and F mapped into it. A collapsed dimension
/// (nadir == ideal) uses a 1e-12 denominator, so every entry maps to 0.
inline std::pair<NormalizationFrame, std::vector<ObjectiveVector>> normalize(const std::vector<ObjectiveVector>& F)
{
    NormalizationFrame frame = make_frame(F);
    std::vector<ObjectiveVector> out;
    out.reserve(F.size());
    for (const auto& f : F) {
        out.push_back(frame.apply(f));
    }
    return {std::move(frame), std::move(out)};
}

// ---- scalarization --------------------------------------------------------

enum class MetricKind { asf, pdm, pbi };

struct ScalarizingMetric {
    MetricKind kind = MetricKind::asf;
    double theta = 5.0;

    static ScalarizingMetric asf() { return {MetricKind::asf, 5.0}; }
    static ScalarizingMetric pdm() { return {MetricKind::pdm, 5.0}; }
    static ScalarizingMetric pbi(double theta = 5.0)
    {
        if (!(theta > 0.0)) {
            throw contract_error("PBI penalty theta must be positive");
        }
        return {MetricKind::pbi, theta};
    }
};

namespace detail {

// Projection length of f on the ray through z and the perpendicular residual.
inline std::pair<double, double> ray_distances(const ObjectiveVector& f, const ObjectiveVector& z)
{
    double zz = 0.0;
    double fz = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        zz += z[k] * z[k];
        fz += f[k] * z[k];
    }
    if (zz <= 0.0) {
        throw contract_error("scalarize: reference direction is the zero vector");
    }
    const double norm = std::sqrt(zz);
    const double d1 = fz / norm;
    double d2sq = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        const double r = f[k] - d1 * z[k] / norm;
        d2sq += r * r;
    }
    return {d1, std::sqrt(d2sq)};
}

} // namespace detail

/// ASF is the plain difference form max_k(fbar_k - z_k) with uniform weights.
inline double scalarize(const ScalarizingMetric& metric, const ObjectiveVector& fbar, const ObjectiveVector& z)
{
    if (fbar.size() != z.size()) {
        throw contract_error("scalarize: dimension mismatch");
    }
    switch (metric.kind) {
    case MetricKind::asf: {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < z.size(); ++k) {
            best = std::max(best, fbar[k] - z[k]);
        }
        return best;
    }
    case MetricKind::pdm: return detail::ray_distances(fbar, z).second;
    case MetricKind::pbi: {
        const auto [d1, d2] = detail::ray_distances(fbar, z);
        return d1 + metric.theta * d2;
    }
    }
    return 0.0;
}

struct Association {
    std::size_t index;
    double value;

    friend bool operator==(const Association&, const Association&) = default;
};

inline Association associate_one(const ObjectiveVector& fbar, const ReferenceSet& Z, const ScalarizingMetric& metric)
{
    Association best{0, std::numeric_limits<double>::infinity()};
    for (std::size_t j = 0; j < Z.points.size(); ++j) {
        const double v = scalarize(metric, fbar, Z.points[j]);
        if (v < best.value) {
            best = {j, v};
        }
    }
    return best;
}

/// Argmin reference index and scalar value per point; lowest index wins ties.
inline std::vector<Association> associate(const std::vector<ObjectiveVector>& Fbar, const ReferenceSet& Z,
                                          const ScalarizingMetric& metric)
{
    if (Z.points.empty()) {
        throw contract_error("associate: empty reference set");
    }
    std::vector<Association> out;
    out.reserve(Fbar.size());
    for (const auto& f : Fbar) {
        out.push_back(associate_one(f, Z, metric));
    }
    return out;
}

} // namespace ir2
