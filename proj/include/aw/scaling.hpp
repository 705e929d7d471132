#pragma once
/**
 * Wanderer parameter sets, the finite-N discretization plan, point rescaling,
 * and the transform that trades minus parameters for plus parameters and a
 * time shift.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "combinatorics.hpp"
#include "errors.hpp"

namespace aw {

inline constexpr std::size_t kInfiniteCount = std::numeric_limits<std::size_t>::max();

// A nonincreasing nonnegative sequence: explicit prefix plus a certified bound on the omitted tail.
struct ParamSequence {
    std::vector<double> prefix;
    double tail_sum_bound = 0.0;

    double first() const { return prefix.empty() ? 0.0 : prefix.front(); }
    double at(std::size_t i) const { return i < prefix.size() ? prefix[i] : 0.0; }
    bool lazily_infinite() const { return tail_sum_bound > 0.0; }
};

struct ParamSet {
    ParamSequence a_plus, a_minus, b_plus, b_minus;
    double c_plus = 0.0, c_minus = 0.0;

    // Derived by validate_params.
    std::size_t J_a_plus = 0, J_a_minus = 0, J_b_plus = 0, J_b_minus = 0;
    double a_bar = std::numeric_limits<double>::infinity();
    double b_bar = -std::numeric_limits<double>::infinity();
    bool validated = false;

    double total_tail_bound() const {
        return a_plus.tail_sum_bound + a_minus.tail_sum_bound + b_plus.tail_sum_bound +
               b_minus.tail_sum_bound;
    }
};

inline void check_sequence(const ParamSequence& s, const std::string& name) {
    for (std::size_t i = 0; i < s.prefix.size(); ++i) {
        require(std::isfinite(s.prefix[i]), name + " entries must be finite");
        require(s.prefix[i] >= 0.0, name + " entries must be nonnegative");
        require(i == 0 || s.prefix[i - 1] >= s.prefix[i], name + " must be nonincreasing");
    }
    require(std::isfinite(s.tail_sum_bound) && s.tail_sum_bound >= 0.0,
            name + " tail_sum_bound must be finite and nonnegative (summability)");
    require(!s.lazily_infinite() || s.prefix.empty() || s.prefix.back() > 0.0,
            name + " has a positive tail after a zero entry");
}

inline std::size_t positive_count(const ParamSequence& s) {
    if (s.lazily_infinite()) return kInfiniteCount;
    return static_cast<std::size_t>(
        std::count_if(s.prefix.begin(), s.prefix.end(), [](double v) { return v > 0.0; }));
}

inline ParamSet validate_params(ParamSet p) {
    check_sequence(p.a_plus, "a_plus");
    check_sequence(p.a_minus, "a_minus");
    check_sequence(p.b_plus, "b_plus");
    check_sequence(p.b_minus, "b_minus");
    require(std::isfinite(p.c_plus) && p.c_plus >= 0.0, "c_plus must be finite and nonnegative");
    require(std::isfinite(p.c_minus) && p.c_minus >= 0.0, "c_minus must be finite and nonnegative");
    p.J_a_plus = positive_count(p.a_plus);
    p.J_a_minus = positive_count(p.a_minus);
    p.J_b_plus = positive_count(p.b_plus);
    p.J_b_minus = positive_count(p.b_minus);
    const double inf = std::numeric_limits<double>::infinity();
    if (p.a_minus.first() + p.b_minus.first() + p.c_minus > 0.0) {
        p.a_bar = 0.0;
        p.b_bar = 0.0;
    } else {
        p.a_bar = p.a_plus.first() == 0.0 ? inf : 1.0 / p.a_plus.first();
        p.b_bar = p.b_plus.first() == 0.0 ? -inf : -1.0 / p.b_plus.first();
    }
    p.validated = true;
    return p;
}

inline double sigma_q(double q) {
    return std::cbrt(q) * std::cbrt(1.0 + q) / (1.0 - q);
}
inline double f_q(double q) {
    return std::cbrt(q) / (2.0 * std::pow(1.0 + q, 2.0 / 3.0));
}

struct ScalingPlan {
    ParamSet params;
    double q = 0.0;
    std::vector<double> t;
    long N = 0;
    double sigma = 0.0, f = 0.0;
    std::vector<long> M;  // M[k] = N + floor(t_k N^{2/3})
    long A = 0, B = 0, C_plus = 0, C_minus = 0, D = 0;
    std::vector<double> x_seq;  // length M.back()
    std::vector<double> y_seq;  // length N
    long N_tilde = 0;

    long M_tilde(std::size_t r) const { return M[r] + A - B - N; }
};

inline long floor_n12(long N) {
    // floor(N^{1/12}) with protection against pow rounding just below an integer.
    long k = static_cast<long>(std::floor(std::pow(static_cast<double>(N), 1.0 / 12.0) + 1e-12));
    while (std::pow(static_cast<double>(k + 1), 12.0) <= static_cast<double>(N)) ++k;
    while (k > 0 && std::pow(static_cast<double>(k), 12.0) > static_cast<double>(N)) --k;
    return k;
}

inline ScalingPlan build_scaling_plan(const ParamSet& raw, double q, const std::vector<double>& t,
                                      long N) {
    const ParamSet p = validate_params(raw);
    require(q > 0.0 && q < 1.0, "q must lie in (0,1)");
    require(!t.empty(), "at least one time is required");
    for (std::size_t k = 1; k < t.size(); ++k) require(t[k - 1] < t[k], "times must be strictly increasing");
    require(N >= 1, "N must be positive");

    ScalingPlan s;
    s.params = p;
    s.q = q;
    s.t = t;
    s.N = N;
    s.sigma = sigma_q(q);
    s.f = f_q(q);
    const double Nd = static_cast<double>(N);
    const double n13 = std::cbrt(Nd);
    const double n23 = n13 * n13;
    for (double tk : t) s.M.push_back(N + static_cast<long>(std::floor(tk * n23)));
    const long n12 = floor_n12(N);

    auto plus_block = [&](const ParamSequence& seq, std::size_t J, const char* name) {
        const long cap = std::min<long>(n12, J == kInfiniteCount ? n12 : static_cast<long>(J));
        long count = 0;
        for (long i = 0; i < cap; ++i) {
            require(static_cast<std::size_t>(i) < seq.prefix.size(),
                    std::string(name) + " prefix is shorter than the plan requires");
            if (1.0 - 1.0 / (n13 * seq.prefix[i] * s.sigma) < q) break;
            ++count;
        }
        return count;
    };
    s.B = plus_block(p.b_plus, p.J_b_plus, "b_plus");
    s.A = plus_block(p.a_plus, p.J_a_plus, "a_plus");
    require(p.J_a_minus != kInfiniteCount && p.J_b_minus != kInfiniteCount,
            "the finite-N plan needs finitely many minus parameters");
    s.D = std::min<long>(static_cast<long>(std::max(p.J_a_minus, p.J_b_minus)), n12);
    s.C_plus = p.c_plus > 0.0 ? n12 : 0;
    s.C_minus = p.c_minus > 0.0 ? n12 : 0;
    s.N_tilde = N - s.A - s.C_plus - s.C_minus - s.D;

    const long lower_x = s.B + s.D + s.C_plus + s.C_minus;
    require(s.M.front() > lower_x,
            "infeasible plan: M_1 = " + std::to_string(s.M.front()) +
                " must exceed B+D+C+ + C- = " + std::to_string(lower_x) + " (raise N)");
    for (std::size_t k = 1; k < s.M.size(); ++k)
        require(s.M[k] > s.M[k - 1], "infeasible plan: M_k must be strictly increasing (raise N)");
    const long lower_y = s.A + s.D + s.C_plus + s.C_minus;
    require(N > lower_y, "infeasible plan: N = " + std::to_string(N) +
                             " must exceed A+D+C+ + C- = " + std::to_string(lower_y));

    auto fill = [&](std::vector<double>& out, long len, long plus_count, const ParamSequence& plus,
                    const ParamSequence& minus, const char* name) {
        out.clear();
        for (long i = 0; i < plus_count; ++i) out.push_back(1.0 - 1.0 / (n13 * plus.prefix[i] * s.sigma));
        for (long i = 0; i < s.D; ++i) out.push_back(1.0 - minus.at(i) / (n13 * s.sigma));
        for (long i = 0; i < s.C_plus; ++i)
            out.push_back(1.0 - 2.0 / (std::pow(Nd, 0.25) * p.c_plus * s.sigma));
        for (long i = 0; i < s.C_minus; ++i)
            out.push_back(1.0 - p.c_minus / (2.0 * std::pow(Nd, 5.0 / 12.0) * s.sigma));
        for (double v : out)
            require(v >= q && v <= 1.0, std::string("infeasible plan: a ") + name +
                                            " parameter falls below q (raise N)");
        out.resize(static_cast<std::size_t>(len), q);
    };
    fill(s.x_seq, s.M.back(), s.B, p.b_plus, p.b_minus, "x");
    fill(s.y_seq, N, s.A, p.a_plus, p.a_minus, "y");
    return s;
}

// X_i for i = 1..count at time index j (zero-based).
inline std::vector<double> rescale_points(const Partition& lambda, const ScalingPlan& plan,
                                          std::size_t j, std::size_t count) {
    require(j < plan.t.size(), "rescale_points: time index out of range");
    const double n13 = std::cbrt(static_cast<double>(plan.N));
    const double shift = 2.0 * plan.q * static_cast<double>(plan.N_tilde) / (1.0 - plan.q) +
                         plan.q * plan.t[j] * n13 * n13 / (1.0 - plan.q);
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = (lambda[i] - shift - static_cast<double>(i + 1)) / (plan.sigma * n13);
    return out;
}

inline std::vector<double> rescale_points(const PartitionSequence& seq, const ScalingPlan& plan,
                                          std::size_t j, std::size_t count) {
    require(j < plan.M.size(), "rescale_points: time index out of range");
    const std::size_t idx = static_cast<std::size_t>(plan.M[j]) - 1;
    require(idx < seq.seq.size(), "rescale_points: sequence too short for the plan");
    return rescale_points(seq.seq[idx], plan, j, count);
}

struct MinusElimination {
    ParamSet params;
    double delta = 0.0;
};

inline MinusElimination eliminate_minus_params(const ParamSet& raw) {
    const ParamSet p = validate_params(raw);
    require(p.c_minus == 0.0, "minus elimination needs c_minus = 0");
    require(p.J_a_minus != kInfiniteCount && p.J_b_minus != kInfiniteCount,
            "minus elimination needs finitely many minus parameters");

    auto merged = [](const ParamSequence& plus, const ParamSequence& minus, std::size_t J) {
        ParamSequence out = plus;
        for (std::size_t i = 0; i < J; ++i) out.prefix.push_back(1.0 / minus.prefix[i]);
        std::sort(out.prefix.rbegin(), out.prefix.rend());
        return out;
    };
    ParamSequence a_hat = merged(p.a_plus, p.a_minus, p.J_a_minus);
    ParamSequence b_hat = merged(p.b_plus, p.b_minus, p.J_b_minus);

    MinusElimination r;
    const long diff = static_cast<long>(p.J_a_minus) - static_cast<long>(p.J_b_minus);
    if (diff > 0) {
        r.delta = a_hat.first() > 0.0 ? std::min(1.0, 1.0 / (2.0 * a_hat.first())) : 1.0;
    } else if (diff < 0) {
        r.delta = -(b_hat.first() > 0.0 ? std::min(1.0, 1.0 / (2.0 * b_hat.first())) : 1.0);
    }
    const double d = r.delta;

    ParamSet out;
    out.c_plus = p.c_plus;
    out.a_plus = a_hat;
    out.b_plus = b_hat;
    if (d != 0.0) {
        for (double& v : out.a_plus.prefix) v = v / (1.0 - d * v);
        for (double& v : out.b_plus.prefix) v = v / (1.0 + d * v);
        // Tail entries never exceed the first entry, which bounds the map's distortion.
        if (d > 0.0) out.a_plus.tail_sum_bound /= (1.0 - d * a_hat.first());
        else out.b_plus.tail_sum_bound /= (1.0 + d * b_hat.first());
        auto& grow = diff > 0 ? out.b_plus.prefix : out.a_plus.prefix;
        for (long h = 0; h < std::labs(diff); ++h) grow.push_back(1.0 / std::fabs(d));
        std::sort(out.a_plus.prefix.rbegin(), out.a_plus.prefix.rend());
        std::sort(out.b_plus.prefix.rbegin(), out.b_plus.prefix.rend());
    }
    r.params = validate_params(out);
    return r;
}

}  // namespace aw
