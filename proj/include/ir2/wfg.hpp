#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "ir2/core.hpp"

// Walking Fish Group test problems: transformation functions, shape
// functions and the WFG1-WFG9 pipelines. Decision variables live in
// [0, 2i] and objective m is scaled by 2m.
namespace ir2::wfg {

/// Shape parameters of the parameter-dependent transformations. For WFG4 they
/// drive the multi-modal shift (defaults 30, 10, 0.35); for WFG7 they drive the
/// parameter-dependent bias (defaults 0.98/49.98, 0.02, 50).
struct WfgParams {
    double A = 30.0;
    double B = 10.0;
    double C = 0.35;

    friend bool operator==(const WfgParams&, const WfgParams&) = default;
};

inline WfgParams default_params(int problem_number)
{
    if (problem_number == 7) {
        return {0.98 / 49.98, 0.02, 50.0};
    }
    return {};
}

namespace detail {

constexpr double kEps = 1.0e-10;

inline double correct_to_01(double a)
{
    if (a <= 0.0 && a >= -kEps) {
        return 0.0;
    }
    if (a >= 1.0 && a <= 1.0 + kEps) {
        return 1.0;
    }
    return a;
}

} // namespace detail

// ---- transformations ------------------------------------------------------

inline double b_poly(double y, double alpha) { return detail::correct_to_01(std::pow(y, alpha)); }

inline double b_flat(double y, double A, double B, double C)
{
    const double tmp1 = std::min(0.0, std::floor(y - B)) * A * (B - y) / B;
    const double tmp2 = std::min(0.0, std::floor(C - y)) * (1.0 - A) * (y - C) / (1.0 - C);
    return detail::correct_to_01(A + tmp1 - tmp2);
}

inline double b_param(double y, double u, double A, double B, double C)
{
    const double v = A - (1.0 - 2.0 * u) * std::fabs(std::floor(0.5 - u) + A);
    return detail::correct_to_01(std::pow(y, B + (C - B) * v));
}

inline double s_linear(double y, double A)
{
    return detail::correct_to_01(std::fabs(y - A) / std::fabs(std::floor(A - y) + A));
}

inline double s_decept(double y, double A, double B, double C)
{
    const double tmp1 = std::floor(y - A + B) * (1.0 - C + (A - B) / B) / (A - B);
    const double tmp2 = std::floor(A + B - y) * (1.0 - C + (1.0 - A - B) / B) / (1.0 - A - B);
    return detail::correct_to_01(1.0 + (std::fabs(y - A) - B) * (tmp1 + tmp2 + 1.0 / B));
}

inline double s_multi(double y, double A, double B, double C)
{
    const double tmp1 = std::fabs(y - C) / (2.0 * (std::floor(C - y) + C));
    const double tmp2 = (4.0 * A + 2.0) * std::numbers::pi * (0.5 - tmp1);
    return detail::correct_to_01((1.0 + std::cos(tmp2) + 4.0 * B * tmp1 * tmp1) / (B + 2.0));
}

inline double r_sum(std::span<const double> y, std::span<const double> w)
{
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        num += w[i] * y[i];
        den += w[i];
    }
    return detail::correct_to_01(num / den);
}

inline double r_sum(std::span<const double> y)
{
    double num = 0.0;
    for (double v : y) {
        num += v;
    }
    return detail::correct_to_01(num / static_cast<double>(y.size()));
}

inline double r_nonsep(std::span<const double> y, int A)
{
    const int n = static_cast<int>(y.size());
    double num = 0.0;
    for (int j = 0; j < n; ++j) {
        num += y[j];
        for (int k = 0; k <= A - 2; ++k) {
            num += std::fabs(y[j] - y[(j + k + 1) % n]);
        }
    }
    const double half = std::ceil(A / 2.0);
    const double den = static_cast<double>(n) / A * half * (1.0 + 2.0 * A - 2.0 * half);
    return detail::correct_to_01(num / den);
}

// ---- shapes (m is 1-based, M objectives, x has M-1 entries) ---------------

inline double linear(std::span<const double> x, int m)
{
    const int M = static_cast<int>(x.size()) + 1;
    double r = 1.0;
    for (int i = 1; i <= M - m; ++i) {
        r *= x[i - 1];
    }
    if (m != 1) {
        r *= 1.0 - x[M - m];
    }
    return detail::correct_to_01(r);
}

inline double convex(std::span<const double> x, int m)
{
    const int M = static_cast<int>(x.size()) + 1;
    const double half_pi = std::numbers::pi / 2.0;
    double r = 1.0;
    for (int i = 1; i <= M - m; ++i) {
        r *= 1.0 - std::cos(x[i - 1] * half_pi);
    }
    if (m != 1) {
        r *= 1.0 - std::sin(x[M - m] * half_pi);
    }
    return detail::correct_to_01(r);
}

inline double concave(std::span<const double> x, int m)
{
    const int M = static_cast<int>(x.size()) + 1;
    const double half_pi = std::numbers::pi / 2.0;
    double r = 1.0;
    for (int i = 1; i <= M - m; ++i) {
        r *= std::sin(x[i - 1] * half_pi);
    }
    if (m != 1) {
        r *= std::cos(x[M - m] * half_pi);
    }
    return detail::correct_to_01(r);
}

inline double mixed(std::span<const double> x, int A, double alpha)
{
    const double tmp = 2.0 * A * std::numbers::pi;
    return detail::correct_to_01(std::pow(1.0 - x[0] - std::cos(tmp * x[0] + std::numbers::pi / 2.0) / tmp, alpha));
}

inline double disc(std::span<const double> x, int A, double alpha, double beta)
{
    const double c = std::cos(A * std::pow(x[0], beta) * std::numbers::pi);
    return detail::correct_to_01(1.0 - std::pow(x[0], alpha) * c * c);
}

// ---- problem pipelines ----------------------------------------------------

enum class Shape { wfg1, wfg2, linear_degenerate, concave };

/// Evaluates WFG<number> on z (length k + l) with M objectives.
class Problem {
public:
    Problem(int number, int M, int k, int l, WfgParams params)
        : number_(number), M_(M), k_(k), l_(l), params_(params)
    {
        if (number < 1 || number > 9) {
            throw config_error("WFG problem number must be in 1..9");
        }
        if (M < 2 || k < 1 || l < 1 || k % (M - 1) != 0) {
            throw config_error("WFG: k must be a positive multiple of M-1 and l >= 1");
        }
        if ((number == 2 || number == 3) && l % 2 != 0) {
            throw config_error("WFG2/WFG3 need an even number of distance parameters");
        }
    }

    int n_var() const { return k_ + l_; }
    int n_obj() const { return M_; }
    int k() const { return k_; }
    int l() const { return l_; }
    int number() const { return number_; }
    const WfgParams& params() const { return params_; }

    ObjectiveVector operator()(const DecisionVector& z) const
    {
        const int n = n_var();
        std::vector<double> y(n);
        for (int i = 0; i < n; ++i) {
            y[i] = z[i] / (2.0 * (i + 1));
        }
        std::vector<double> t;
        switch (number_) {
        case 1: t = wfg1_t(y); break;
        case 2:
        case 3: t = wfg23_t(y); break;
        case 4: t = wfg4_t(y); break;
        case 5: t = wfg5_t(y); break;
        case 6: t = wfg6_t(y); break;
        case 7: t = wfg7_t(y); break;
        case 8: t = wfg8_t(y); break;
        default: t = wfg9_t(y); break;
        }
        return shape(t);
    }

    /// A Pareto-optimal decision vector whose position parameters (in [0,1])
    /// are taken from `position` (size k).
    DecisionVector optimal_solution(std::span<const double> position) const
    {
        const int n = n_var();
        std::vector<double> y(n, 0.35);
        for (int i = 0; i < k_; ++i) {
            y[i] = position[i];
        }
        if (number_ == 1) {
            for (int i = 0; i < k_; ++i) {
                y[i] = std::pow(position[i], 50.0);
            }
        } else if (number_ == 8) {
            for (int i = k_; i < n; ++i) {
                const double u = r_sum(std::span<const double>(y.data(), i));
                const double tmp1 = std::fabs(std::floor(0.5 - u) + 0.98 / 49.98);
                const double tmp2 = 0.02 + 49.98 * (0.98 / 49.98 - (1.0 - 2.0 * u) * tmp1);
                y[i] = std::pow(0.35, 1.0 / tmp2);
            }
        } else if (number_ == 9) {
            y[n - 1] = 0.35;
            for (int i = n - 2; i >= k_; --i) {
                const double tmp1 = r_sum(std::span<const double>(y.data() + i + 1, n - i - 1));
                y[i] = std::pow(0.35, 1.0 / (0.02 + 1.96 * tmp1));
            }
        }
        DecisionVector z(n);
        for (int i = 0; i < n; ++i) {
            z[i] = y[i] * 2.0 * (i + 1);
        }
        return z;
    }

private:
    std::vector<double> reduce_sum(const std::vector<double>& y) const
    {
        // Weighted-by-one r_sum over each position group and the distance block.
        std::vector<double> t(M_);
        const int group = k_ / (M_ - 1);
        for (int i = 0; i < M_ - 1; ++i) {
            t[i] = r_sum(std::span<const double>(y.data() + i * group, group));
        }
        t[M_ - 1] = r_sum(std::span<const double>(y.data() + k_, y.size() - k_));
        return t;
    }

    std::vector<double> reduce_nonsep(const std::vector<double>& y) const
    {
        std::vector<double> t(M_);
        const int group = k_ / (M_ - 1);
        for (int i = 0; i < M_ - 1; ++i) {
            t[i] = r_nonsep(std::span<const double>(y.data() + i * group, group), group);
        }
        t[M_ - 1] = r_nonsep(std::span<const double>(y.data() + k_, y.size() - k_), l_);
        return t;
    }

    std::vector<double> wfg1_t(std::vector<double> y) const
    {
        const int n = n_var();
        for (int i = k_; i < n; ++i) {
            y[i] = s_linear(y[i], 0.35);
        }
        for (int i = k_; i < n; ++i) {
            y[i] = b_flat(y[i], 0.8, 0.75, 0.85);
        }
        for (int i = 0; i < n; ++i) {
            y[i] = b_poly(y[i], 0.02);
        }
        std::vector<double> t(M_);
        const int group = k_ / (M_ - 1);
        for (int i = 0; i < M_ - 1; ++i) {
            std::vector<double> w(group);
            for (int j = 0; j < group; ++j) {
                w[j] = 2.0 * (i * group + j + 1);
            }
            t[i] = r_sum(std::span<const double>(y.data() + i * group, group), w);
        }
        std::vector<double> w(l_);
        for (int j = 0; j < l_; ++j) {
            w[j] = 2.0 * (k_ + j + 1);
        }
        t[M_ - 1] = r_sum(std::span<const double>(y.data() + k_, l_), w);
        return t;
    }

    std::vector<double> wfg23_t(std::vector<double> y) const
    {
        const int n = n_var();
        for (int i = k_; i < n; ++i) {
            y[i] = s_linear(y[i], 0.35);
        }
        std::vector<double> y2(y.begin(), y.begin() + k_);
        for (int i = 0; i < l_ / 2; ++i) {
            const double pair[2] = {y[k_ + 2 * i], y[k_ + 2 * i + 1]};
            y2.push_back(r_nonsep(pair, 2));
        }
        std::vector<double> t(M_);
        const int group = k_ / (M_ - 1);
        for (int i = 0; i < M_ - 1; ++i) {
            t[i] = r_sum(std::span<const double>(y2.data() + i * group, group));
        }
        t[M_ - 1] = r_sum(std::span<const double>(y2.data() + k_, l_ / 2));
        return t;
    }

    std::vector<double> wfg4_t(std::vector<double> y) const
    {
        for (double& v : y) {
            v = s_multi(v, params_.A, params_.B, params_.C);
        }
        return reduce_sum(y);
    }

    std::vector<double> wfg5_t(std::vector<double> y) const
    {
        for (double& v : y) {
            v = s_decept(v, 0.35, 0.001, 0.05);
        }
        return reduce_sum(y);
    }

    std::vector<double> wfg6_t(std::vector<double> y) const
    {
        for (int i = k_; i < n_var(); ++i) {
            y[i] = s_linear(y[i], 0.35);
        }
        return reduce_nonsep(y);
    }

    std::vector<double> wfg7_t(std::vector<double> y) const
    {
        const int n = n_var();
        std::vector<double> y1 = y;
        for (int i = 0; i < k_; ++i) {
            const double u = r_sum(std::span<const double>(y.data() + i + 1, n - i - 1));
            y1[i] = b_param(y[i], u, params_.A, params_.B, params_.C);
        }
        for (int i = k_; i < n; ++i) {
            y1[i] = s_linear(y1[i], 0.35);
        }
        return reduce_sum(y1);
    }

    std::vector<double> wfg8_t(std::vector<double> y) const
    {
        const int n = n_var();
        std::vector<double> y1 = y;
        for (int i = k_; i < n; ++i) {
            const double u = r_sum(std::span<const double>(y.data(), i));
            y1[i] = b_param(y[i], u, 0.98 / 49.98, 0.02, 50.0);
        }
        for (int i = k_; i < n; ++i) {
            y1[i] = s_linear(y1[i], 0.35);
        }
        return reduce_sum(y1);
    }

    std::vector<double> wfg9_t(std::vector<double> y) const
    {
        const int n = n_var();
        std::vector<double> y1 = y;
        for (int i = 0; i < n - 1; ++i) {
            const double u = r_sum(std::span<const double>(y.data() + i + 1, n - i - 1));
            y1[i] = b_param(y[i], u, 0.98 / 49.98, 0.02, 50.0);
        }
        for (int i = 0; i < k_; ++i) {
            y1[i] = s_decept(y1[i], 0.35, 0.001, 0.05);
        }
        for (int i = k_; i < n; ++i) {
            y1[i] = s_multi(y1[i], 30.0, 95.0, 0.35);
        }
        return reduce_nonsep(y1);
    }

    ObjectiveVector shape(const std::vector<double>& t) const
    {
        // Degeneracy constants: A_1 = 1 and A_{2..M-1} = 0 for WFG3, all ones otherwise.
        std::vector<double> x(M_ - 1);
        for (int i = 0; i < M_ - 1; ++i) {
            const double a = (number_ == 3 && i > 0) ? 0.0 : 1.0;
            x[i] = std::max(t[M_ - 1], a) * (t[i] - 0.5) + 0.5;
        }
        const double dist = t[M_ - 1];
        ObjectiveVector f(M_);
        for (int m = 1; m <= M_; ++m) {
            double h;
            if (number_ == 1) {
                h = m < M_ ? convex(x, m) : mixed(x, 5, 1.0);
            } else if (number_ == 2) {
                h = m < M_ ? convex(x, m) : disc(x, 5, 1.0, 1.0);
            } else if (number_ == 3) {
                h = linear(x, m);
            } else {
                h = concave(x, m);
            }
            f[m - 1] = dist + 2.0 * m * h;
        }
        return f;
    }

    int number_;
    int M_;
    int k_;
    int l_;
    WfgParams params_;
};

} // namespace ir2::wfg
