#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "ir2/core.hpp"
#include "ir2/forest.hpp"
#include "ir2/refassoc.hpp"

namespace ir2 {

// ---- target archive -------------------------------------------------------

/// Slot i holds the best solution seen so far for reference point i.
struct TargetArchive {
    std::vector<std::optional<Individual>> slots;

    TargetArchive() = default;
    explicit TargetArchive(std::size_t n) : slots(n) {}

    std::size_t size() const noexcept { return slots.size(); }
    std::size_t filled() const
    {
        return static_cast<std::size_t>(std::count_if(slots.begin(), slots.end(), [](const auto& s) { return s.has_value(); }));
    }
};

/// Frame from F_P only; incumbents are re-scored in that frame and replaced on
/// a strictly smaller scalarizer value.
inline TargetArchive update_target(const Population& P, TargetArchive T, const ReferenceSet& Z,
                                   const ScalarizingMetric& metric)
{
    if (T.size() != Z.size()) {
        throw contract_error("update_target: archive size differs from |Z|");
    }
    if (P.empty()) {
        return T;
    }
    const auto frame = make_frame(objectives_of(P));
    for (const auto& member : P) {
        const auto [index, value] = associate_one(frame.apply(member.f), Z, metric);
        auto& slot = T.slots[index];
        if (!slot) {
            slot = member;
            continue;
        }
        const double incumbent = scalarize(metric, frame.apply(slot->f), Z.points[index]);
        if (value < incumbent) {
            slot = member;
        }
    }
    return T;
}

// ---- sliding archive ------------------------------------------------------

/// The last few parent populations, keyed by generation.
class ParentHistory {
public:
    explicit ParentHistory(std::size_t keep = 6) : keep_(std::max<std::size_t>(keep, 1)) {}

    void record(int generation, Population P)
    {
        entries_.emplace_back(generation, std::move(P));
        while (entries_.size() > keep_) {
            entries_.pop_front();
        }
    }

    const Population& at(int generation) const
    {
        for (const auto& [g, P] : entries_) {
            if (g == generation) {
                return P;
            }
        }
        throw contract_error("ParentHistory: generation " + std::to_string(generation) + " not retained");
    }

    bool contains(int generation) const
    {
        return std::any_of(entries_.begin(), entries_.end(), [generation](const auto& e) { return e.first == generation; });
    }

private:
    std::size_t keep_;
    std::deque<std::pair<int, Population>> entries_;
};

/// Offspring of the last t_past generations plus one parent population.
struct SlidingArchive {
    std::size_t t_past = 5;
    std::deque<std::pair<int, Population>> offspring; // (generation, Q)
    int parent_generation = -1;
    Population parent;

    SlidingArchive() = default;
    explicit SlidingArchive(std::size_t tp) : t_past(tp) {}

    std::size_t size() const
    {
        std::size_t n = parent.size();
        for (const auto& [g, Q] : offspring) {
            n += Q.size();
        }
        return n;
    }

    bool empty() const { return size() == 0; }

    /// Offspring buffers oldest first, then the parent population.
    Population members() const
    {
        Population out;
        out.reserve(size());
        for (const auto& [g, Q] : offspring) {
            out.insert(out.end(), Q.begin(), Q.end());
        }
        out.insert(out.end(), parent.begin(), parent.end());
        return out;
    }
};

/// A_{t+1} = (A_t ∪ Q_t ∪ P_{t+1-t_past}) \ [P_{t-t_past} ∪ Q_{t-t_past}] as a
/// ring rotation. Generation indices below zero are clamped to the initial population.
inline SlidingArchive update_archive(SlidingArchive A, Population Q, const ParentHistory& history, int t)
{
    if (A.t_past < 1) {
        throw contract_error("update_archive: t_past must be at least 1");
    }
    if (t < 0) {
        throw contract_error("update_archive: negative generation");
    }
    const int tp = static_cast<int>(A.t_past);
    A.offspring.emplace_back(t, std::move(Q));
    while (!A.offspring.empty() && A.offspring.front().first <= t - tp) {
        A.offspring.pop_front();
    }
    const int g = std::max(0, t + 1 - tp);
    if (A.parent_generation != g) {
        A.parent = history.at(g);
        A.parent_generation = g;
    }
    return A;
}

// ---- mapping and training -------------------------------------------------

/// Pairs each archive member (input) with the target of its reference point
/// (output). Members whose slot is empty are skipped; the result may be empty.
inline TrainingDataset archive_mapping(const Population& archive, const TargetArchive& T, const ReferenceSet& Z,
                                       const ScalarizingMetric& metric)
{
    TrainingDataset data;
    if (archive.empty() || T.filled() == 0) {
        return data;
    }
    const auto [frame, Fbar] = normalize(objectives_of(archive));
    const auto assoc = associate(Fbar, Z, metric);
    for (std::size_t i = 0; i < archive.size(); ++i) {
        const auto& slot = T.slots[assoc[i].index];
        if (slot) {
            data.push_back(archive[i].x, slot->x);
        }
    }
    return data;
}

struct RepairModel {
    Forest forest;
    DecisionVector xmin;
    DecisionVector xmax;

    static constexpr double min_span = 1e-12;

    DecisionVector to_unit(const DecisionVector& x) const
    {
        DecisionVector out(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) {
            out[k] = (x[k] - xmin[k]) / std::max(xmax[k] - xmin[k], min_span);
        }
        return out;
    }

    DecisionVector from_unit(const DecisionVector& r) const
    {
        DecisionVector out(r.size());
        for (std::size_t k = 0; k < r.size(); ++k) {
            out[k] = xmin[k] + r[k] * std::max(xmax[k] - xmin[k], min_span);
        }
        return out;
    }
};

/// Dynamic bounds blend the data extrema with the problem bounds halfway.
inline std::pair<DecisionVector, DecisionVector> dynamic_bounds(const TrainingDataset& D, const DecisionVector& lower,
                                                                const DecisionVector& upper)
{
    const std::size_t n = lower.size();
    DecisionVector lo(n, std::numeric_limits<double>::infinity());
    DecisionVector hi(n, -std::numeric_limits<double>::infinity());
    auto scan = [&](const std::vector<DecisionVector>& rows) {
        for (const auto& r : rows) {
            for (std::size_t k = 0; k < n; ++k) {
                lo[k] = std::min(lo[k], r[k]);
                hi[k] = std::max(hi[k], r[k]);
            }
        }
    };
    scan(D.inputs);
    scan(D.outputs);
    DecisionVector xmin(n), xmax(n);
    for (std::size_t k = 0; k < n; ++k) {
        xmin[k] = 0.5 * (lo[k] + lower[k]);
        xmax[k] = 0.5 * (hi[k] + upper[k]);
    }
    return {xmin, xmax};
}

inline RepairModel train_repair_model(const TrainingDataset& D, const DecisionVector& lower, const DecisionVector& upper,
                                      const RandomSource& rng, std::size_t n_jobs = 1)
{
    if (D.empty()) {
        throw training_error("train_repair_model: empty dataset");
    }
    if (D.n_inputs() != lower.size() || D.n_outputs() != lower.size() || upper.size() != lower.size()) {
        throw contract_error("train_repair_model: dataset width differs from the bounds");
    }
    RepairModel model;
    std::tie(model.xmin, model.xmax) = dynamic_bounds(D, lower, upper);
    TrainingDataset unit;
    unit.inputs.reserve(D.size());
    unit.outputs.reserve(D.size());
    for (std::size_t i = 0; i < D.size(); ++i) {
        unit.push_back(model.to_unit(D.inputs[i]), model.to_unit(D.outputs[i]));
    }
    ForestParams params = ForestParams::for_dataset(unit);
    params.n_jobs = n_jobs;
    model.forest = fit(unit, params, rng);
    return model;
}

// ---- repair ---------------------------------------------------------------

inline DecisionVector enhance(const DecisionVector& X, const DecisionVector& Y, double eta)
{
    if (X.size() != Y.size()) {
        throw contract_error("enhance: length mismatch");
    }
    DecisionVector out(X.size());
    for (std::size_t k = 0; k < X.size(); ++k) {
        out[k] = X[k] + eta * (Y[k] - X[k]);
    }
    return out;
}

/// Out-of-box values are resampled as low + (high - low) * min(d, 1) * u^2
/// (mirrored for the upper side), where d is the violation as a fraction of
/// the box width and u ~ U(0,1). The density piles up next to the violated
/// bound and the draw never leaves the open interval (low, high).
inline double boundary_repair(double value, double low, double high, double /*original*/, RandomSource& rng)
{
    if (!(low < high)) {
        throw contract_error("boundary_repair: need low < high");
    }
    if (value >= low && value <= high) {
        return value;
    }
    const double width = high - low;
    const double u = rng.uniform_open();
    if (value < low) {
        const double d = std::min((low - value) / width, 1.0);
        return low + width * d * u * u;
    }
    const double d = std::min((value - high) / width, 1.0);
    return high - width * d * u * u;
}

struct RepairSettings {
    double eta = 1.1;
    double vicinity = 0.01; // near-bound tolerance as a fraction of the problem range
};

/// predict -> denormalize -> enhance -> near-bound restore -> boundary repair.
template <class Model>
DecisionVector repair_individual(const DecisionVector& I, const Model& model, const RepairSettings& settings,
                                 const DecisionVector& lower, const DecisionVector& upper, RandomSource& rng)
{
    const DecisionVector R = model.forest.predict(model.to_unit(I));
    DecisionVector Y = enhance(I, model.from_unit(R), settings.eta);
    for (std::size_t k = 0; k < I.size(); ++k) {
        const double near = std::min(std::abs(I[k] - model.xmin[k]), std::abs(model.xmax[k] - I[k]));
        if (near <= settings.vicinity * (upper[k] - lower[k])) {
            Y[k] = I[k];
        }
        Y[k] = boundary_repair(Y[k], lower[k], upper[k], I[k], rng);
    }
    return Y;
}

struct RepairOutcome {
    Population offspring;
    std::vector<std::size_t> selected; // indices into offspring, draw order
};

inline std::size_t repair_count(std::size_t n, double fraction)
{
    return std::min(n, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n))));
}

/// Repairs a uniformly drawn floor(fraction * |Q|) subset; the rest is untouched.
template <class Model>
RepairOutcome repair_offspring(Population Q, const Model& model, const RepairSettings& settings,
                               const DecisionVector& lower, const DecisionVector& upper, RandomSource& rng,
                               double fraction = 0.5)
{
    RepairOutcome out;
    out.selected = rng.sample(Q.size(), repair_count(Q.size(), fraction));
    for (std::size_t i : out.selected) {
        Q[i].x = repair_individual(Q[i].x, model, settings, lower, upper, rng);
        Q[i].f.clear();
    }
    out.offspring = std::move(Q);
    return out;
}

// ---- learning gate --------------------------------------------------------

/// (1/|P_d|) * sqrt(sum d_i^2), d_i the distance from P_d member i to the nearest member of P_t.
inline double g_metric(const Population& Pd, const Population& Pt)
{
    if (Pd.empty() || Pt.empty()) {
        throw contract_error("g_metric: empty population");
    }
    double total = 0.0;
    for (const auto& a : Pd) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& b : Pt) {
            if (a.f.size() != b.f.size()) {
                throw contract_error("g_metric: objective dimension mismatch");
            }
            double d2 = 0.0;
            for (std::size_t k = 0; k < a.f.size(); ++k) {
                const double d = a.f[k] - b.f[k];
                d2 += d * d;
            }
            best = std::min(best, d2);
        }
        total += best;
    }
    return std::sqrt(total) / static_cast<double>(Pd.size());
}

struct LearningGate {
    std::vector<double> history;
    double g_th = 10.0; // percent
    int t_freq = 5;
    double eta = 1.1;

    double max_g() const { return history.empty() ? 0.0 : *std::max_element(history.begin(), history.end()); }
};

/// Records G_t; learning is on iff G_t > g_th% of max(G) and t is a multiple of t_freq.
inline bool repair_gate(LearningGate& gate, double G_t, int t)
{
    if (gate.t_freq < 1) {
        throw contract_error("repair_gate: t_freq must be positive");
    }
    gate.history.push_back(G_t);
    return G_t > gate.g_th / 100.0 * gate.max_g() && t % gate.t_freq == 0;
}

// ---- per-run state --------------------------------------------------------

struct Ir2Settings {
    int t_past = 5;
    int t_freq = 5;
    double eta = 1.1;
    double g_th = 10.0;
    double repair_fraction = 0.5;
    std::size_t n_jobs = 1;
};

struct Ir2Step {
    double G = 0.0;
    bool flag = false;
    std::size_t rows = 0; // training rows used this generation
};

/// Everything IR2 carries between generations.
class Ir2State {
public:
    Ir2State(const Ir2Settings& settings, std::size_t n_ref)
        : settings_(settings), target_(n_ref), archive_(static_cast<std::size_t>(settings.t_past)),
          history_(static_cast<std::size_t>(settings.t_past) + 2)
    {
        if (settings.t_past < 1 || settings.t_freq < 1 || settings.eta < 1.0) {
            throw config_error("IR2 settings: need t_past >= 1, t_freq >= 1 and eta >= 1");
        }
        if (!(settings.repair_fraction >= 0.0 && settings.repair_fraction <= 1.0)) {
            throw config_error("IR2 settings: repair_fraction must lie in [0, 1]");
        }
        gate_.g_th = settings.g_th;
        gate_.t_freq = settings.t_freq;
        gate_.eta = settings.eta;
    }

    /// Target update, G_t, gate and (when on) training for generation t.
    Ir2Step prepare(const Population& P, int t, const ReferenceSet& Z, const ScalarizingMetric& metric,
                    const DecisionVector& lower, const DecisionVector& upper, const RandomSource& rng)
    {
        history_.record(t, P);
        target_ = update_target(P, std::move(target_), Z, metric);
        Ir2Step step;
        step.G = g_metric(history_.at(std::max(0, t - settings_.t_past)), P);
        step.flag = repair_gate(gate_, step.G, t);
        model_.reset();
        if (step.flag) {
            const TrainingDataset D = archive_mapping(archive_.members(), target_, Z, metric);
            if (D.empty()) {
                step.flag = false;
            } else {
                step.rows = D.size();
                model_ = train_repair_model(D, lower, upper, rng.stream("forest", static_cast<std::uint64_t>(t)),
                                            settings_.n_jobs);
            }
        }
        return step;
    }

    /// Archive rotation once Q_t is evaluated.
    void finish(const Population& Q, int t) { archive_ = update_archive(std::move(archive_), Q, history_, t); }

    const RepairModel& model() const
    {
        if (!model_) {
            throw contract_error("Ir2State::model: no model trained this generation");
        }
        return *model_;
    }
    bool has_model() const noexcept { return model_.has_value(); }

    RepairSettings repair_settings() const { return {settings_.eta, 0.01}; }
    const Ir2Settings& settings() const noexcept { return settings_; }
    const TargetArchive& target() const noexcept { return target_; }
    const SlidingArchive& archive() const noexcept { return archive_; }
    const LearningGate& gate() const noexcept { return gate_; }

private:
    Ir2Settings settings_;
    TargetArchive target_;
    SlidingArchive archive_;
    ParentHistory history_;
    LearningGate gate_;
    std::optional<RepairModel> model_;
};

} // namespace ir2
