#pragma once
/**
 * Partitions, single-variable skew Schur polynomials, the Schur process
 * probability mass function and exhaustive small-case enumeration.
 */

#include <cmath>
#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"

namespace aw {

class Partition {
public:
    Partition() = default;
    Partition(std::initializer_list<int> parts) : Partition(std::vector<int>(parts)) {}
    explicit Partition(std::vector<int> parts) : parts_(std::move(parts)) {
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            require(parts_[i] >= 0, "partition parts must be nonnegative");
            require(i == 0 || parts_[i - 1] >= parts_[i], "partition parts must be nonincreasing");
        }
        while (!parts_.empty() && parts_.back() == 0) parts_.pop_back();
    }

    // Zero-based; indices past the end read as 0.
    int operator[](std::size_t i) const { return i < parts_.size() ? parts_[i] : 0; }
    const std::vector<int>& parts() const { return parts_; }
    std::size_t length() const { return parts_.size(); }
    long weight() const { return std::accumulate(parts_.begin(), parts_.end(), 0L); }
    bool empty() const { return parts_.empty(); }

    auto operator<=>(const Partition&) const = default;
    bool operator==(const Partition&) const = default;

    std::string str() const {
        std::string s = "(";
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(parts_[i]);
        }
        return s + ")";
    }

private:
    std::vector<int> parts_;
};

struct PartitionSequence {
    std::vector<Partition> seq;
    std::size_t m_count = 0;
    std::size_t n_count = 0;

    auto operator<=>(const PartitionSequence&) const = default;
    bool operator==(const PartitionSequence&) const = default;
};

// upper_1 >= lower_1 >= upper_2 >= lower_2 >= ...
inline bool interlaces(const Partition& upper, const Partition& lower) {
    const std::size_t n = std::max(upper.length(), lower.length()) + 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (upper[i] < lower[i]) return false;
        if (lower[i] < upper[i + 1]) return false;
    }
    return true;
}

inline double skew_schur_single(const Partition& lambda, const Partition& mu, double x) {
    require(x >= 0.0, "skew_schur_single: variable must be nonnegative");
    if (!interlaces(lambda, mu)) return 0.0;
    return std::pow(x, static_cast<double>(lambda.weight() - mu.weight()));
}

// Calls fn(mu) for every mu with lambda ≽ mu.
inline void for_each_interlaced_below(const Partition& lambda,
                                      const std::function<void(const Partition&)>& fn) {
    const std::size_t len = lambda.length();
    std::vector<int> mu(len, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == len) {
            fn(Partition(mu));
            return;
        }
        for (int v = lambda[i]; v >= lambda[i + 1]; --v) {
            mu[i] = v;
            rec(i + 1);
        }
    };
    rec(0);
}

inline double schur_eval(const Partition& lambda, const std::vector<double>& vars) {
    for (double v : vars) require(v >= 0.0, "schur_eval: variables must be nonnegative");
    std::function<double(const Partition&, std::size_t)> rec = [&](const Partition& l,
                                                                   std::size_t n) -> double {
        if (n == 0) return l.empty() ? 1.0 : 0.0;
        if (l.length() > n) return 0.0;
        double total = 0.0;
        for_each_interlaced_below(l, [&](const Partition& mu) {
            if (mu.length() > n - 1) return;
            total += skew_schur_single(l, mu, vars[n - 1]) * rec(mu, n - 1);
        });
        return total;
    };
    return rec(lambda, vars.size());
}

inline void check_products(const std::vector<double>& X, const std::vector<double>& Y) {
    for (double x : X) require(x >= 0.0, "x parameters must be nonnegative");
    for (double y : Y) require(y >= 0.0, "y parameters must be nonnegative");
    for (double x : X)
        for (double y : Y) require(x * y < 1.0, "parameter products x_i*y_j must be < 1");
}

inline double cauchy_product(const std::vector<double>& X, const std::vector<double>& Y) {
    double p = 1.0;
    for (double x : X)
        for (double y : Y) p *= 1.0 - x * y;
    return p;
}

// All partitions with weight <= cap and length <= max_len.
inline std::vector<Partition> partitions_up_to(long cap, std::size_t max_len) {
    std::vector<Partition> out;
    std::vector<int> cur;
    std::function<void(long, int)> rec = [&](long remaining, int max_part) {
        out.emplace_back(cur);
        if (cur.size() == max_len) return;
        for (int p = static_cast<int>(std::min<long>(remaining, max_part)); p >= 1; --p) {
            cur.push_back(p);
            rec(remaining - p, p);
            cur.pop_back();
        }
    };
    rec(cap, static_cast<int>(cap));
    return out;
}

inline double cauchy_partial_sum(const std::vector<double>& X, const std::vector<double>& Y,
                                 long weight_cap) {
    check_products(X, Y);
    require(weight_cap >= 0, "weight_cap must be nonnegative");
    double total = 0.0;
    for (const auto& l : partitions_up_to(weight_cap, std::min(X.size(), Y.size())))
        total += schur_eval(l, X) * schur_eval(l, Y);
    return total;
}

inline double schur_process_pmf(const PartitionSequence& s, const std::vector<double>& X,
                                const std::vector<double>& Y) {
    check_products(X, Y);
    const std::size_t M = X.size(), N = Y.size();
    require(M >= 1 && N >= 1, "schur_process_pmf: need M, N >= 1");
    require(s.seq.size() == M + N - 1, "schur_process_pmf: sequence must have length M+N-1");
    double p = cauchy_product(X, Y);
    const Partition empty;
    for (std::size_t i = 0; i < M && p > 0.0; ++i)
        p *= skew_schur_single(s.seq[i], i == 0 ? empty : s.seq[i - 1], X[i]);
    // seq[j] = lambda(M, n) with n = N - (j - M + 1); the step below it carries y_n.
    for (std::size_t j = M - 1; j < M + N - 1 && p > 0.0; ++j)
        p *= skew_schur_single(s.seq[j], j + 1 < M + N - 1 ? s.seq[j + 1] : empty,
                                Y[N - 1 - (j - M + 1)]);
    return p;
}

struct Enumeration {
    std::map<PartitionSequence, double> atoms;
    double captured_mass = 0.0;
};

// Every profile with |lambda^M| <= cap and its exact mass.
inline Enumeration enumerate_distribution(const std::vector<double>& X,
                                          const std::vector<double>& Y, long weight_cap) {
    check_products(X, Y);
    const std::size_t M = X.size(), N = Y.size();
    require(M >= 1 && N >= 1, "enumerate_distribution: need M, N >= 1");
    require(weight_cap >= 0, "weight_cap must be nonnegative");

    // A chain is the list of partitions strictly below the top together with its mass.
    using Chain = std::pair<std::vector<Partition>, double>;
    auto descend = [](const Partition& top, const std::vector<double>& vars) {
        // vars.back() multiplies the first step below top, vars[0] the step onto the empty partition.
        std::vector<Chain> out;
        std::vector<Partition> path;
        std::function<void(const Partition&, std::size_t, double)> rec =
            [&](const Partition& cur, std::size_t level, double mass) {
                // cur = partition carrying vars[0..level); level == 0 means cur must be empty.
                if (level == 0) {
                    if (cur.empty()) out.emplace_back(path, mass);
                    return;
                }
                if (cur.length() > level) return;
                for_each_interlaced_below(cur, [&](const Partition& mu) {
                    const double f = skew_schur_single(cur, mu, vars[level - 1]);
                    if (f == 0.0) return;
                    path.push_back(mu);
                    rec(mu, level - 1, mass * f);
                    path.pop_back();
                });
            };
        rec(top, vars.size(), 1.0);
        return out;
    };

    Enumeration e;
    const double base = cauchy_product(X, Y);
    for (const auto& top : partitions_up_to(weight_cap, std::min(M, N))) {
        const auto left = descend(top, X);
        if (left.empty()) continue;
        const auto right = descend(top, Y);
        for (const auto& [lp, lm] : left) {
            for (const auto& [rp, rm] : right) {
                PartitionSequence s;
                s.m_count = M;
                s.n_count = N;
                s.seq.reserve(M + N - 1);
                // lp runs from lambda^{M-1} down to lambda^0 = empty; drop the final empty entry.
                for (std::size_t i = M - 1; i-- > 0;) s.seq.push_back(lp[i]);
                s.seq.push_back(top);
                for (std::size_t j = 0; j + 1 < N; ++j) s.seq.push_back(rp[j]);
                const double mass = base * lm * rm;
                e.atoms[s] = mass;
                e.captured_mass += mass;
            }
        }
    }
    if (e.captured_mass < 0.99)
        throw config_error("enumerate_distribution: captured mass " +
                           std::to_string(e.captured_mass) + " < 0.99; raise the cap");
    return e;
}

}  // namespace aw
