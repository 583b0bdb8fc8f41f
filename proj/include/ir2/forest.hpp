#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "ir2/core.hpp"

namespace ir2 {

struct TrainingDataset {
    std::vector<DecisionVector> inputs;
    std::vector<DecisionVector> outputs;

    std::size_t size() const noexcept { return inputs.size(); }
    bool empty() const noexcept { return inputs.empty(); }
    std::size_t n_inputs() const noexcept { return inputs.empty() ? 0 : inputs.front().size(); }
    std::size_t n_outputs() const noexcept { return outputs.empty() ? 0 : outputs.front().size(); }

    void push_back(DecisionVector in, DecisionVector out)
    {
        inputs.push_back(std::move(in));
        outputs.push_back(std::move(out));
    }
};

struct ForestParams {
    std::size_t n_trees = 100;
    std::size_t n_features = 0; // 0 means every feature
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    std::optional<std::size_t> max_depth;
    bool bootstrap = true;
    std::size_t n_jobs = 1;

    /// n_trees = N_A and n_features = n_var, everything else at its default.
    static ForestParams for_dataset(const TrainingDataset& data)
    {
        ForestParams p;
        p.n_trees = data.size();
        p.n_features = data.n_inputs();
        return p;
    }
};

class RegressionTree {
public:
    struct Node {
        int feature = -1; // -1 marks a leaf
        double threshold = 0.0;
        std::uint32_t left = 0;
        std::uint32_t right = 0;
        std::uint32_t value = 0; // offset into values()
        double weight = 0.0;     // training samples reaching the node, bootstrap multiplicity included

        bool is_leaf() const noexcept { return feature < 0; }
    };

    RegressionTree() = default;
    RegressionTree(std::size_t n_outputs, std::vector<Node> nodes, std::vector<double> values)
        : n_outputs_(n_outputs), nodes_(std::move(nodes)), values_(std::move(values))
    {
    }

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t n_outputs() const noexcept { return n_outputs_; }

    std::span<const double> leaf_value(const Node& n) const { return {values_.data() + n.value, n_outputs_}; }

    const Node& route(std::span<const double> x) const
    {
        const Node* n = &nodes_.front();
        while (!n->is_leaf()) {
            n = &nodes_[x[static_cast<std::size_t>(n->feature)] <= n->threshold ? n->left : n->right];
        }
        return *n;
    }

    std::span<const double> predict(std::span<const double> x) const { return leaf_value(route(x)); }

    std::size_t leaf_count() const
    {
        return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
    }

    std::size_t depth() const
    {
        std::vector<std::size_t> d(nodes_.size(), 0);
        std::size_t best = 0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            best = std::max(best, d[i]);
            if (!nodes_[i].is_leaf()) {
                d[nodes_[i].left] = d[i] + 1;
                d[nodes_[i].right] = d[i] + 1;
            }
        }
        return best;
    }

private:
    std::size_t n_outputs_ = 0;
    std::vector<Node> nodes_;
    std::vector<double> values_;
};

namespace detail {

// Grows one CART tree. Samples are deduplicated with integer weights, and every
// feature keeps its own presorted index list that is stably partitioned at each split.
class TreeBuilder {
public:
    TreeBuilder(const TrainingDataset& data, const ForestParams& params)
        : data_(data), params_(params), n_in_(data.n_inputs()), n_out_(data.n_outputs())
    {
        sq_norm_.resize(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) {
            double s = 0.0;
            for (double v : data.outputs[i]) {
                s += v * v;
            }
            sq_norm_[i] = s;
        }
    }

    RegressionTree build(const std::vector<double>& weight, RandomSource& rng)
    {
        weight_ = &weight;
        nodes_.clear();
        values_.clear();
        std::vector<std::uint32_t> active;
        for (std::size_t i = 0; i < weight.size(); ++i) {
            if (weight[i] > 0.0) {
                active.push_back(static_cast<std::uint32_t>(i));
            }
        }
        order_.assign(n_in_, {});
        for (std::size_t f = 0; f < n_in_; ++f) {
            auto& o = order_[f];
            o = active;
            std::stable_sort(o.begin(), o.end(), [&](std::uint32_t a, std::uint32_t b) {
                return data_.inputs[a][f] < data_.inputs[b][f];
            });
        }
        goes_left_.assign(data_.size(), 0);
        scratch_.resize(active.size());
        sum_.resize(n_out_);
        left_sum_.resize(n_out_);
        s_dot_y_.assign(data_.size(), 0.0);

        nodes_.emplace_back();
        grow(0, 0, active.size(), 0, rng);
        return RegressionTree(n_out_, std::move(nodes_), std::move(values_));
    }

private:
    void grow(std::size_t node, std::size_t begin, std::size_t end, std::size_t depth, RandomSource& rng)
    {
        const auto& rows = order_.front();
        double W = 0.0;
        double Q = 0.0;
        std::fill(sum_.begin(), sum_.end(), 0.0);
        for (std::size_t p = begin; p < end; ++p) {
            const std::uint32_t i = rows[p];
            const double w = (*weight_)[i];
            W += w;
            Q += w * sq_norm_[i];
            const auto& y = data_.outputs[i];
            for (std::size_t k = 0; k < n_out_; ++k) {
                sum_[k] += w * y[k];
            }
        }
        nodes_[node].weight = W;
        nodes_[node].value = static_cast<std::uint32_t>(values_.size());
        for (std::size_t k = 0; k < n_out_; ++k) {
            values_.push_back(sum_[k] / W);
        }

        const bool depth_ok = !params_.max_depth || depth < *params_.max_depth;
        if (!depth_ok || W < static_cast<double>(params_.min_samples_split) || end - begin < 2) {
            return;
        }

        double S2 = 0.0;
        for (double s : sum_) {
            S2 += s * s;
        }
        for (std::size_t p = begin; p < end; ++p) {
            const std::uint32_t i = rows[p];
            const auto& y = data_.outputs[i];
            double d = 0.0;
            for (std::size_t k = 0; k < n_out_; ++k) {
                d += sum_[k] * y[k];
            }
            s_dot_y_[i] = d;
        }
        const double parent_sse = Q - S2 / W;

        std::vector<std::size_t> features(n_in_);
        std::iota(features.begin(), features.end(), std::size_t{0});
        const std::size_t n_try = params_.n_features == 0 ? n_in_ : std::min(params_.n_features, n_in_);
        if (n_try < n_in_) {
            features = rng.sample(n_in_, n_try);
            std::sort(features.begin(), features.end());
        }

        // Minimising SSE_L + SSE_R is maximising |S_L|^2/W_L + |S_R|^2/W_R.
        double best_gain = -std::numeric_limits<double>::infinity();
        int best_feature = -1;
        double best_threshold = 0.0;
        const double min_leaf = static_cast<double>(params_.min_samples_leaf);
        for (std::size_t f : features) {
            const auto& o = order_[f];
            std::fill(left_sum_.begin(), left_sum_.end(), 0.0);
            double WL = 0.0;
            double L2 = 0.0;
            double SdotL = 0.0;
            for (std::size_t p = begin; p + 1 < end; ++p) {
                const std::uint32_t i = o[p];
                const double w = (*weight_)[i];
                const auto& y = data_.outputs[i];
                double ly = 0.0;
                for (std::size_t k = 0; k < n_out_; ++k) {
                    ly += left_sum_[k] * y[k];
                    left_sum_[k] += w * y[k];
                }
                L2 += 2.0 * w * ly + w * w * sq_norm_[i];
                SdotL += w * s_dot_y_[i];
                WL += w;
                const double xa = data_.inputs[i][f];
                const double xb = data_.inputs[o[p + 1]][f];
                if (!(xa < xb)) {
                    continue;
                }
                const double WR = W - WL;
                if (WL < min_leaf || WR < min_leaf) {
                    continue;
                }
                const double R2 = S2 - 2.0 * SdotL + L2;
                const double gain = L2 / WL + R2 / WR;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    best_threshold = 0.5 * (xa + xb);
                    if (best_threshold >= xb) { // midpoint rounded up onto xb
                        best_threshold = xa;
                    }
                }
            }
        }
        if (best_feature < 0) {
            return;
        }
        const double child_sse = Q - best_gain;
        if (!(child_sse < parent_sse - 1e-12 * std::max(1.0, std::abs(parent_sse)))) {
            return;
        }

        const auto bf = static_cast<std::size_t>(best_feature);
        std::size_t n_left = 0;
        for (std::size_t p = begin; p < end; ++p) {
            const std::uint32_t i = order_[bf][p];
            goes_left_[i] = data_.inputs[i][bf] <= best_threshold ? 1 : 0;
            n_left += goes_left_[i];
        }
        for (auto& o : order_) {
            std::size_t l = begin;
            std::size_t r = 0;
            for (std::size_t p = begin; p < end; ++p) {
                if (goes_left_[o[p]] != 0) {
                    o[l++] = o[p];
                } else {
                    scratch_[r++] = o[p];
                }
            }
            std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(r), o.begin() + static_cast<std::ptrdiff_t>(l));
        }

        const auto left = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
        const auto right = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
        nodes_[node].feature = best_feature;
        nodes_[node].threshold = best_threshold;
        nodes_[node].left = left;
        nodes_[node].right = right;
        grow(left, begin, begin + n_left, depth + 1, rng);
        grow(right, begin + n_left, end, depth + 1, rng);
    }

    const TrainingDataset& data_;
    const ForestParams& params_;
    std::size_t n_in_;
    std::size_t n_out_;
    std::vector<double> sq_norm_;
    const std::vector<double>* weight_ = nullptr;
    std::vector<std::vector<std::uint32_t>> order_;
    std::vector<std::uint8_t> goes_left_;
    std::vector<std::uint32_t> scratch_;
    std::vector<double> sum_;
    std::vector<double> left_sum_;
    std::vector<double> s_dot_y_;
    std::vector<RegressionTree::Node> nodes_;
    std::vector<double> values_;
};

inline void validate(const TrainingDataset& data, const ForestParams& params)
{
    if (data.empty()) {
        throw training_error("forest fit: empty training dataset");
    }
    if (data.outputs.size() != data.inputs.size()) {
        throw training_error("forest fit: input and output row counts differ");
    }
    const std::size_t n_in = data.n_inputs();
    const std::size_t n_out = data.n_outputs();
    if (n_in == 0 || n_out == 0) {
        throw training_error("forest fit: zero-width rows");
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.inputs[i].size() != n_in || data.outputs[i].size() != n_out) {
            throw training_error("forest fit: ragged row " + std::to_string(i));
        }
    }
    if (params.n_trees == 0 || params.min_samples_split < 2 || params.min_samples_leaf < 1) {
        throw contract_error("forest fit: invalid parameters");
    }
}

} // namespace detail

class Forest {
public:
    Forest() = default;
    Forest(std::vector<RegressionTree> trees, ForestParams params, std::uint64_t seed, std::size_t n_inputs)
        : trees_(std::move(trees)), params_(params), seed_(seed), n_inputs_(n_inputs)
    {
    }

    bool fitted() const noexcept { return !trees_.empty(); }
    const std::vector<RegressionTree>& trees() const noexcept { return trees_; }
    const ForestParams& params() const noexcept { return params_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t n_inputs() const noexcept { return n_inputs_; }
    std::size_t n_outputs() const noexcept { return trees_.empty() ? 0 : trees_.front().n_outputs(); }

    DecisionVector predict(std::span<const double> x) const
    {
        if (!fitted()) {
            throw contract_error("Forest::predict: forest is not fitted");
        }
        if (x.size() != n_inputs_) {
            throw contract_error("Forest::predict: query has wrong length");
        }
        DecisionVector out(n_outputs(), 0.0);
        for (const auto& t : trees_) {
            const auto v = t.predict(x);
            for (std::size_t k = 0; k < out.size(); ++k) {
                out[k] += v[k];
            }
        }
        for (double& v : out) {
            v /= static_cast<double>(trees_.size());
        }
        return out;
    }

    /// Text format, one token stream:
    ///   ir2-forest 1 <n_trees> <n_inputs> <n_outputs> <seed>
    ///   per tree: tree <n_nodes>, then one line per node:
    ///   <feature> <threshold> <left> <right> <weight> <value_1> ... <value_n_outputs>
    /// Doubles are written in hexfloat so a load reproduces predictions bit for bit.
    void dump(std::ostream& os) const
    {
        os << "ir2-forest 1 " << trees_.size() << ' ' << n_inputs_ << ' ' << n_outputs() << ' ' << seed_ << '\n';
        os << std::hexfloat;
        for (const auto& t : trees_) {
            os << "tree " << t.nodes().size() << '\n';
            for (const auto& n : t.nodes()) {
                os << n.feature << ' ' << n.threshold << ' ' << n.left << ' ' << n.right << ' ' << n.weight;
                for (double v : t.leaf_value(n)) {
                    os << ' ' << v;
                }
                os << '\n';
            }
        }
        os << std::defaultfloat;
    }

    static Forest load(std::istream& is)
    {
        auto read_double = [&is]() {
            std::string tok;
            if (!(is >> tok)) {
                throw config_error("Forest::load: truncated input");
            }
            return std::strtod(tok.c_str(), nullptr);
        };
        std::string magic;
        int version = 0;
        std::size_t n_trees = 0, n_in = 0, n_out = 0;
        std::uint64_t seed = 0;
        if (!(is >> magic >> version >> n_trees >> n_in >> n_out >> seed) || magic != "ir2-forest" || version != 1) {
            throw config_error("Forest::load: not an ir2-forest stream");
        }
        std::vector<RegressionTree> trees;
        for (std::size_t t = 0; t < n_trees; ++t) {
            std::string tag;
            std::size_t n_nodes = 0;
            if (!(is >> tag >> n_nodes) || tag != "tree") {
                throw config_error("Forest::load: malformed tree header");
            }
            std::vector<RegressionTree::Node> nodes(n_nodes);
            std::vector<double> values;
            for (auto& n : nodes) {
                if (!(is >> n.feature)) {
                    throw config_error("Forest::load: truncated node");
                }
                n.threshold = read_double();
                is >> n.left >> n.right;
                n.weight = read_double();
                n.value = static_cast<std::uint32_t>(values.size());
                for (std::size_t k = 0; k < n_out; ++k) {
                    values.push_back(read_double());
                }
            }
            trees.emplace_back(n_out, std::move(nodes), std::move(values));
        }
        ForestParams p;
        p.n_trees = n_trees;
        p.n_features = n_in;
        return Forest(std::move(trees), p, seed, n_in);
    }

private:
    std::vector<RegressionTree> trees_;
    ForestParams params_;
    std::uint64_t seed_ = 0;
    std::size_t n_inputs_ = 0;
};

/// Tree k draws from rng.stream("tree", k), so the thread count never changes the result.
inline Forest fit(const TrainingDataset& data, const ForestParams& params, const RandomSource& rng)
{
    detail::validate(data, params);
    const std::size_t n = data.size();
    std::vector<RegressionTree> trees(params.n_trees);

    auto grow_range = [&](std::size_t first, std::size_t last) {
        detail::TreeBuilder builder(data, params);
        std::vector<double> weight(n);
        for (std::size_t t = first; t < last; ++t) {
            RandomSource tree_rng = rng.stream("tree", t);
            if (params.bootstrap) {
                std::fill(weight.begin(), weight.end(), 0.0);
                for (std::size_t s = 0; s < n; ++s) {
                    weight[tree_rng.index(n)] += 1.0;
                }
            } else {
                std::fill(weight.begin(), weight.end(), 1.0);
            }
            trees[t] = builder.build(weight, tree_rng);
        }
    };

    const std::size_t jobs = std::clamp<std::size_t>(params.n_jobs, 1, params.n_trees);
    if (jobs == 1) {
        grow_range(0, params.n_trees);
    } else {
        std::vector<std::jthread> workers;
        const std::size_t chunk = (params.n_trees + jobs - 1) / jobs;
        for (std::size_t first = 0; first < params.n_trees; first += chunk) {
            workers.emplace_back(grow_range, first, std::min(first + chunk, params.n_trees));
        }
    }
    return Forest(std::move(trees), params, rng.seed(), data.n_inputs());
}

} // namespace ir2
