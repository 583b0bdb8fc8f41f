#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ir2 {

using DecisionVector = std::vector<double>;
using ObjectiveVector = std::vector<double>;

// Error taxonomy. Everything derives from the standard exception types so
// callers that only care about std::invalid_argument / std::runtime_error
// keep working.
struct contract_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct unsupported_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct evaluation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct training_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Individual {
    DecisionVector x;
    ObjectiveVector f; // empty until evaluated
    int birth_generation = 0;

    bool evaluated() const noexcept { return !f.empty(); }

    friend bool operator==(const Individual&, const Individual&) = default;
};

using Population = std::vector<Individual>;

struct ProblemDefinition {
    std::string name;
    std::size_t n_var = 0;
    std::size_t n_obj = 0;
    DecisionVector lower;
    DecisionVector upper;
    std::function<ObjectiveVector(const DecisionVector&)> evaluate;
};

/// Pareto dominance for minimisation: a is no worse everywhere and strictly
/// better somewhere.
inline bool dominates(const ObjectiveVector& a, const ObjectiveVector& b)
{
    if (a.size() != b.size()) {
        throw contract_error("dominates: objective vectors differ in length");
    }
    bool strictly_better = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] > b[k]) {
            return false;
        }
        if (a[k] < b[k]) {
            strictly_better = true;
        }
    }
    return strictly_better;
}

/// Run-scoped function evaluation counter.
class EvaluationCounter {
public:
    void add(std::size_t n) noexcept { count_ += n; }
    std::size_t count() const noexcept { return count_; }

private:
    std::size_t count_ = 0;
};

inline ObjectiveVector evaluate_checked(const ProblemDefinition& problem, const DecisionVector& x,
                                        std::size_t index)
{
    ObjectiveVector f = problem.evaluate(x);
    if (f.size() != problem.n_obj) {
        throw evaluation_error("member " + std::to_string(index) + ": expected "
                               + std::to_string(problem.n_obj) + " objectives");
    }
    for (double v : f) {
        if (!std::isfinite(v)) {
            throw evaluation_error("member " + std::to_string(index) + ": non-finite objective value");
        }
    }
    return f;
}

/// Evaluates every member and bumps the counter by |pop|.
inline Population evaluate_all(const ProblemDefinition& problem, Population pop, EvaluationCounter& counter)
{
    for (std::size_t i = 0; i < pop.size(); ++i) {
        pop[i].f = evaluate_checked(problem, pop[i].x, i);
    }
    counter.add(pop.size());
    return pop;
}

inline std::vector<ObjectiveVector> objectives_of(const Population& pop)
{
    std::vector<ObjectiveVector> out;
    out.reserve(pop.size());
    for (const auto& ind : pop) {
        out.push_back(ind.f);
    }
    return out;
}

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept
{
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

} // namespace detail

/// Portable seeded random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard distributions are *not* portable across library
/// implementations, so every conversion from raw 64-bit words to doubles or
/// integers is done here. Named sub-streams are seeded with
/// splitmix64(seed ^ fnv1a(name) ^ splitmix64(index)), so adding a new
/// consumer never shifts the draws seen by existing ones.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed = 0) : seed_(seed), engine_(detail::splitmix64(seed)) {}

    std::uint64_t seed() const noexcept { return seed_; }

    RandomSource stream(std::string_view name, std::uint64_t index = 0) const
    {
        return RandomSource(detail::splitmix64(seed_ ^ detail::fnv1a(name) ^ detail::splitmix64(index)));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in the open interval (0, 1).
    double uniform_open()
    {
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return u;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased integer in [0, n).
    std::size_t index(std::size_t n)
    {
        if (n == 0) {
            throw contract_error("RandomSource::index: empty range");
        }
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max()
                                    - std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return static_cast<std::size_t>(r % bound);
    }

    template <class T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

    std::vector<std::size_t> permutation(std::size_t n)
    {
        std::vector<std::size_t> p(n);
        std::iota(p.begin(), p.end(), std::size_t{0});
        shuffle(p);
        return p;
    }

    /// k distinct indices from [0, n), in draw order.
    std::vector<std::size_t> sample(std::size_t n, std::size_t k)
    {
        if (k > n) {
            throw contract_error("RandomSource::sample: k > n");
        }
        std::vector<std::size_t> p(n);
        std::iota(p.begin(), p.end(), std::size_t{0});
        for (std::size_t i = 0; i < k; ++i) {
            std::swap(p[i], p[i + index(n - i)]);
        }
        p.resize(k);
        return p;
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace ir2
