#pragma once
/**
 * Acceptance suites. Each check carries the criterion it belongs to, the
 * observed metric and its threshold; a suite passes when every check does.
 */

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "combinatorics.hpp"
#include "fredholm.hpp"
#include <nlohmann/json.hpp>
#include "kernels.hpp"
#include "lpp.hpp"
#include "scaling.hpp"
#include "stats.hpp"

namespace aw {

struct Check {
    std::string criterion;
    std::string name;
    double metric = 0.0;
    double threshold = 0.0;
    bool pass = false;
    double seconds = 0.0;
};

struct SuiteReport {
    std::string suite;
    std::vector<Check> checks;
    bool overall() const {
        if (checks.empty()) return false;
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    nlohmann::json to_json() const {
        nlohmann::json j;
        j["suite"] = suite;
        j["checks"] = nlohmann::json::array();
        for (const auto& c : checks)
            j["checks"].push_back({{"criterion", c.criterion},
                                   {"name", c.name},
                                   {"metric", c.metric},
                                   {"threshold", c.threshold},
                                   {"pass", c.pass},
                                   {"seconds", c.seconds}});
        j["overall"] = overall();
        return j;
    }
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Check with metric <= threshold.
inline Check at_most(std::string crit, std::string name, double metric, double threshold, double secs) {
    return {std::move(crit), std::move(name), metric, threshold, metric <= threshold, secs};
}

inline double keyed(std::uint64_t stream, std::uint64_t a, std::uint64_t b = 0) {
    return keyed_uniform(stream, a, b);
}

// Partial sums from RSK against brute-force Greene values on every corner; returns mismatches.
inline long greene_mismatches(const WeightMatrix& w) {
    const TableauPair t = rsk_forward(w);
    long bad = 0;
    auto compare = [&](const Partition& shape, std::size_t m, std::size_t n) {
        long partial = 0;
        for (std::size_t k = 1; k <= std::min(m, n); ++k) {
            partial += shape[k - 1];
            if (partial != greene_bruteforce(w, k, m, n)) ++bad;
        }
    };
    for (std::size_t m = 1; m <= w.M; ++m) compare(sub_shape(t.q, static_cast<int>(m)), m, w.N);
    for (std::size_t n = 1; n < w.N; ++n) compare(sub_shape(t.p, static_cast<int>(n)), w.M, n);
    return bad;
}

}  // namespace detail

// A1: Greene's theorem against RSK.
inline SuiteReport verify_greene() {
    SuiteReport r{"greene", {}};
    const auto t0 = std::chrono::steady_clock::now();
    long bad = 0, matrices = 0;
    for (std::size_t M = 1; M <= 3; ++M)
        for (std::size_t N = 1; N <= 3; ++N) {
            const std::size_t cells = M * N;
            long total = 1;
            for (std::size_t c = 0; c < cells; ++c) total *= 3;
            for (long code = 0; code < total; ++code) {
                WeightMatrix w(M, N);
                long v = code;
                for (std::size_t c = 0; c < cells; ++c, v /= 3) w.w[c] = static_cast<int>(v % 3);
                bad += detail::greene_mismatches(w);
                ++matrices;
            }
        }
    for (std::uint64_t s = 0; s < 1000; ++s) {
        WeightMatrix w(6, 6);
        // Every third matrix is sparse so that long chains compete with heavy single cells.
        const double density = s % 3 == 0 ? 0.35 : 1.0;
        for (std::size_t c = 0; c < 36; ++c) {
            if (detail::keyed(0xA1, s, 2 * c) > density) continue;
            w.w[c] = static_cast<int>(10.0 * detail::keyed(0xA1, s, 2 * c + 1));
        }
        bad += detail::greene_mismatches(w);
        ++matrices;
    }
    const double secs = detail::seconds_since(t0);
    r.checks.push_back(detail::at_most("A1", "rsk_vs_bruteforce_mismatches(" + std::to_string(matrices) + " matrices)",
                                       static_cast<double>(bad), 0.0, secs));
    r.checks.push_back(detail::at_most("A1", "runtime_seconds", secs, 60.0, secs));
    return r;
}

// A2: sampled profiles against the exact law; A3: monotone coupling.
inline SuiteReport verify_coupling(long samples = 100000, long pairs = 10000) {
    SuiteReport r{"coupling", {}};
    {
        const auto t0 = std::chrono::steady_clock::now();
        const std::vector<double> X{0.4, 0.3}, Y{0.5, 0.2};
        long cap = 4;
        Enumeration e;
        for (;; cap += 2) {
            e = enumerate_distribution(X, Y, cap);
            if (e.captured_mass >= 0.999) break;
        }
        std::map<PartitionSequence, long> observed;
        for (long s = 0; s < samples; ++s) observed[sample_schur_process(X, Y, static_cast<std::uint64_t>(s))]++;
        const ChiSquareResult chi = chi_square_gof(observed, e.atoms);
        const double secs = detail::seconds_since(t0);
        r.checks.push_back({"A2", "chi_square_p_value(cap=" + std::to_string(cap) + ")", chi.p_value, 1e-3,
                            chi.p_value > 1e-3, secs});
        r.checks.push_back(detail::at_most("A2", "enumerated_mass_deficit", 1.0 - e.captured_mass, 1e-3, secs));
        r.checks.push_back(detail::at_most("A2", "runtime_seconds", secs, 120.0, secs));
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        long violations = 0;
        for (long s = 0; s < pairs; ++s) {
            const auto us = static_cast<std::uint64_t>(s);
            const std::size_t M = 1 + static_cast<std::size_t>(5 * detail::keyed(0xA3, us, 0));
            const std::size_t N = 1 + static_cast<std::size_t>(5 * detail::keyed(0xA3, us, 1));
            std::vector<double> X(M), Y(N), Xs(M), Ys(N);
            for (std::size_t i = 0; i < M; ++i) {
                X[i] = 0.05 + 0.85 * detail::keyed(0xA3, us, 10 + i);
                Xs[i] = X[i] * detail::keyed(0xA3, us, 30 + i);
            }
            for (std::size_t j = 0; j < N; ++j) {
                Y[j] = 0.05 + 0.85 * detail::keyed(0xA3, us, 20 + j);
                Ys[j] = Y[j] * detail::keyed(0xA3, us, 40 + j);
            }
            const CoupledNoise noise(0xC0FFEEULL + us, M, N);
            const PartitionSequence big = lpp_profile(sample_weight_matrix(X, Y, noise));
            const PartitionSequence small = lpp_profile(sample_weight_matrix(Xs, Ys, noise));
            violations += !monotone_dominates(big, small);
        }
        r.checks.push_back(detail::at_most("A3", "monotone_violations(" + std::to_string(pairs) + " pairs)",
                                           static_cast<double>(violations), 0.0, detail::seconds_since(t0)));
    }
    return r;
}

// A4, A5, A6, A11: kernel identities.
inline SuiteReport verify_kernels() {
    SuiteReport r{"kernels", {}};
    const std::vector<double> grid{-2.0, -1.0, 0.0, 1.0, 2.0};
    {
        const auto t0 = std::chrono::steady_clock::now();
        struct Case {
            ParamSet p;
            std::vector<ContourChoice> choices;
            std::string label;
        };
        ParamSet zero, minus;
        minus.a_minus.prefix = {0.5};
        const std::vector<Case> cases{
            {zero, {{1.0, -1.0}, {0.3, -0.2}, {-0.5, 0.7}}, "zero"},
            {minus, {{-1.0, 1.0}, {-0.5, 0.3}, {-0.3, 1.5}}, "a_minus=0.5"}};
        for (const auto& c : cases) {
            double worst = 0.0, k1_max = 0.0;
            for (double x1 : grid)
                for (double x2 : grid) {
                    std::vector<KernelValue> v;
                    for (const auto& ch : c.choices) v.push_back(limit_kernel(c.p, 0.0, x1, 0.5, x2, {}, ch));
                    for (std::size_t a = 0; a < v.size(); ++a) {
                        k1_max = std::max(k1_max, std::abs(v[a].k1));
                        for (std::size_t b = a + 1; b < v.size(); ++b)
                            worst = std::max(worst, relative_gap(v[a].value, v[b].value));
                    }
                }
            const double secs = detail::seconds_since(t0);
            r.checks.push_back(detail::at_most("A4", "contour_independence_" + c.label, worst, 1e-6, secs));
            if (c.label != "zero")
                r.checks.push_back({"A4", "crossing_term_active_" + c.label, k1_max, 1e-3, k1_max > 1e-3, secs});
        }
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        double worst = 0.0;
        for (double x : grid)
            for (double y : grid)
                worst = std::max(worst, std::abs(limit_kernel(ParamSet{}, 0.0, x, 0.0, y).value - airy_kernel(x, y)));
        r.checks.push_back(detail::at_most("A5", "airy_reduction_max_abs", worst, 1e-8, detail::seconds_since(t0)));
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        ParamSet p;
        p.a_plus.prefix = {0.5};
        p.b_plus.prefix = {0.5};
        const double pts[10][4] = {{0, 0, 0, 0},      {0, 1, 0, -1},     {0, -1.5, 0, 0.5}, {0, 0.3, 0.4, 0.2},
                                   {0.4, 0.3, 0, 0.2}, {-0.5, 1, 0.5, 1}, {0.2, -2, 0.7, -1}, {0, 2, 0, 2},
                                   {-0.3, 0.5, -0.3, -0.5}, {0.6, -0.4, 0.1, 0.8}};
        double worst = 0.0;
        for (const auto& q : pts)
            worst = std::max(worst, std::abs(limit_kernel(p, q[0], q[1], q[2], q[3]).value -
                                             bp_finite({2.0}, {-2.0}, q[0], q[1], q[2], q[3]).value));
        r.checks.push_back(detail::at_most("A6", "finite_bp_reduction_max_abs", worst, 1e-8, detail::seconds_since(t0)));
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        ParamSet p;
        p.a_minus.prefix = {2.0};
        const MinusElimination me = eliminate_minus_params(p);
        const double pts[9][4] = {{0, -1, 0, 0},   {0, 0, 0, 1},     {0, 1, 0, -1},
                                  {0, 0.5, 0.5, 0}, {0, -0.5, 0.5, 1}, {0, 1.5, 0.5, 0.5},
                                  {0.5, 0, 0, 0},   {0.5, 1, 0, -0.5}, {0.3, -1, 0.8, 0.7}};
        double worst = 0.0;
        for (const auto& q : pts) {
            const cplx lhs = limit_kernel(me.params, q[0] - me.delta, q[1], q[2] - me.delta, q[3]).value;
            const cplx rhs = limit_kernel(p, q[0], q[1], q[2], q[3]).value;
            worst = std::max(worst, relative_gap(lhs, rhs));
        }
        r.checks.push_back(detail::at_most("A11", "minus_elimination_max_rel", worst, 1e-6, detail::seconds_since(t0)));
    }
    return r;
}

// A7: prelimit kernel converging to the limit parts.
inline SuiteReport verify_converge() {
    SuiteReport r{"converge", {}};
    const double q = 0.25;
    const std::vector<double> times{0.0, 0.5};
    struct Point {
        std::size_t u, v;
        double xt, yt;
    };
    const std::vector<Point> pts{{1, 0, 0.3, -0.4}, {0, 0, -0.5, 0.5}, {0, 1, 1.0, 0.2}};
    ParamSet zero, bp;
    bp.b_plus.prefix = {1.0};
    for (const auto& [label, p] : std::vector<std::pair<std::string, ParamSet>>{{"zero", zero}, {"b_plus=1", bp}}) {
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const auto t0 = std::chrono::steady_clock::now();
            const Point& pt = pts[k];
            const cplx lim = limit_parts_infinity(p, q, times[pt.u], pt.xt, times[pt.v], pt.yt).value;
            std::vector<double> e;
            for (long N : {1000L, 10000L, 100000L}) {
                const ScalingPlan plan = build_scaling_plan(p, q, times, N);
                const cplx kn = prelimit_kernel(plan, pt.u, lattice_position(plan, pt.u, pt.xt), pt.v,
                                                lattice_position(plan, pt.v, pt.yt))
                                    .value;
                e.push_back(std::abs(std::cbrt(static_cast<double>(N)) * plan.sigma * kn - lim));
            }
            const double secs = detail::seconds_since(t0);
            const std::string tag = label + "_point" + std::to_string(k + 1);
            const bool decreasing = e[0] > e[1] && e[1] > e[2];
            r.checks.push_back({"A7", "e_N_strictly_decreasing_" + tag, e[2] - e[1], 0.0, decreasing, secs});
            r.checks.push_back(detail::at_most("A7", "e_1e5_over_e_1e3_" + tag, e[2] / e[0],
                                               3.0 * std::cbrt(1e-2), secs));
        }
    }
    return r;
}

// A8: Monte Carlo factorial moments against determinant integrals of the circle kernel.
inline SuiteReport verify_determinantal(long samples = 100000) {
    SuiteReport r{"determinantal", {}};
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> X{0.5, 0.4, 0.3}, Y{0.45, 0.35, 0.25};
    std::vector<PointConfig> configs(static_cast<std::size_t>(samples));
    parallel_for(configs.size(), [&](std::size_t s) {
        configs[s] = point_config_raw(sample_schur_process(X, Y, 0xA8000000ULL + s), s);
    });
    std::map<std::tuple<std::size_t, long, std::size_t, long>, cplx> cache;
    std::mutex cache_mutex;
    const MultiTimeKernel kernel = [&](std::size_t u, double x, std::size_t v, double y) {
        const auto key = std::make_tuple(u, std::lround(x), v, std::lround(y));
        {
            std::lock_guard<std::mutex> lock(cache_mutex);
            if (auto it = cache.find(key); it != cache.end()) return it->second;
        }
        const cplx val = schur_circle_kernel(X, Y, static_cast<long>(u + 1), static_cast<long>(v + 1),
                                             std::lround(x), std::lround(y))
                             .value;
        std::lock_guard<std::mutex> lock(cache_mutex);
        cache.emplace(key, val);
        return val;
    };
    auto box = [&](std::uint64_t s, std::uint64_t slot) {
        const auto time = static_cast<std::size_t>(3 * detail::keyed(0xA8, s, 3 * slot));
        const double lo = -4.0 + std::floor(7.0 * detail::keyed(0xA8, s, 3 * slot + 1));
        const double width = 1.0 + std::floor(3.0 * detail::keyed(0xA8, s, 3 * slot + 2));
        return Box{time, lo, lo + width};
    };
    double worst = 0.0;
    int compared = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const std::vector<Box> boxes{box(s, 0)};
        const MomentReport mc = factorial_moment_mc(configs, boxes, {1});
        const double exact = det_moment_integral(kernel, boxes, {1}, Discrete{1.0, 0.0}, 0);
        worst = std::max(worst, std::fabs(mc.estimate - exact) / std::max(mc.std_error, 1e-12));
        ++compared;
    }
    for (std::uint64_t s = 100; compared < 30; ++s) {
        const Box a = box(s, 0), b = box(s, 1);
        if (a.time == b.time && !(a.hi <= b.lo || b.hi <= a.lo)) continue;
        const std::vector<Box> boxes{a, b};
        const MomentReport mc = factorial_moment_mc(configs, boxes, {1, 1});
        const double exact = det_moment_integral(kernel, boxes, {1, 1}, Discrete{1.0, 0.0}, 0);
        worst = std::max(worst, std::fabs(mc.estimate - exact) / std::max(mc.std_error, 1e-12));
        ++compared;
    }
    const double secs = detail::seconds_since(t0);
    r.checks.push_back(detail::at_most("A8", "max_standardized_deviation(20 boxes, 10 pairs)", worst, 4.0, secs));
    r.checks.push_back(detail::at_most("A8", "runtime_seconds", secs, 600.0, secs));
    return r;
}

// Frozen high-precision oracle values of the GUE Tracy-Widom distribution F_2(t).
inline const std::map<double, double>& tracy_widom_oracle() {
    static const std::map<double, double> v{
        {-2.0, 0.41322414250512}, {-1.0, 0.80721424199928}, {0.0, 0.96937282835526}, {1.0, 0.99750543814939}};
    return v;
}

inline OnePointKernel airy_one_point() {
    return slice_one_point([](double, double x, double, double y) { return cplx(airy_kernel(x, y)); }, 0.0,
                           Continuous{}, 0.0, 1.0);
}

inline OnePointKernel schur_one_point(std::vector<double> X, std::vector<double> Y, long M_u) {
    OnePointKernel k;
    k.block = [X, Y, M_u](const std::vector<double>& xs, const std::vector<double>& ys) {
        std::vector<long> a, b;
        for (double x : xs) a.push_back(std::lround(x));
        for (double y : ys) b.push_back(std::lround(y));
        return schur_circle_kernel_block(X, Y, M_u, M_u, a, b).value;
    };
    k.eval = [blk = k.block](double x, double y) { return blk({x}, {y})(0, 0); };
    k.measure = Discrete{1.0, 0.0};
    k.floor = 0.0;
    k.decay_rate = 0.5;
    certify_decay(k);
    return k;
}

// A9: Fredholm determinants.
inline SuiteReport verify_fredholm() {
    SuiteReport r{"fredholm", {}};
    const auto t0 = std::chrono::steady_clock::now();
    const OnePointKernel airy = airy_one_point();
    const auto& oracle = tracy_widom_oracle();
    for (double t : {0.0, -2.0}) {
        const double v = fredholm_cdf(airy, t, NystromMethod{}).value;
        r.checks.push_back(detail::at_most("A9", "F2(" + std::to_string(static_cast<int>(t)) + ")_vs_oracle",
                                           std::fabs(v - oracle.at(t)), 5e-4, detail::seconds_since(t0)));
    }
    {
        const OnePointKernel k = schur_one_point({0.5}, {0.5}, 1);
        double worst = 0.0;
        for (int m = -1; m <= 4; ++m) {
            // Rightmost point lambda_1 - 1 <= m iff lambda_1 <= m + 1.
            const double exact = 1.0 - std::pow(0.25, m + 2);
            worst = std::max(worst, std::fabs(fredholm_cdf(k, m).value - exact));
        }
        r.checks.push_back(detail::at_most("A9", "geometric_one_cell_exact", worst, 1e-9, detail::seconds_since(t0)));
    }
    {
        double worst = 0.0;
        for (double t : {-2.0, -1.0, 0.0, 1.0})
            worst = std::max(worst, std::fabs(fredholm_cdf(airy, t, SeriesMethod{}).value -
                                              fredholm_cdf(airy, t, NystromMethod{}).value));
        r.checks.push_back(detail::at_most("A9", "series_vs_nystrom_airy", worst, 1e-6, detail::seconds_since(t0)));
    }
    return r;
}

// A10: exponential upper tail of the rescaled top particle.
inline SuiteReport verify_tails(long seeds = 10000, long N = 200) {
    SuiteReport r{"tails", {}};
    const auto t0 = std::chrono::steady_clock::now();
    const ScalingPlan plan = build_scaling_plan(ParamSet{}, 0.25, {0.0}, N);
    std::vector<double> x1(static_cast<std::size_t>(seeds));
    parallel_for(x1.size(), [&](std::size_t s) {
        const WeightMatrix w = sample_weight_matrix(plan.x_seq, plan.y_seq,
                                                    CoupledNoise(0xA10000ULL + s, plan.x_seq.size(), plan.y_seq.size()));
        Tableau p;
        for (std::size_t i = 0; i < w.M; ++i)
            for (std::size_t j = 0; j < w.N; ++j)
                for (int c = 0; c < w(i, j); ++c) row_insert(p, static_cast<int>(j + 1));
        x1[s] = rescale_points(shape_of(p), plan, 0, 1)[0];
    });
    std::vector<double> sorted = x1;
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted[sorted.size() / 2], hi = sorted[sorted.size() - 31];
    std::vector<double> grid;
    for (int k = 0; k < 12; ++k) grid.push_back(lo + (hi - lo) * k / 11.0);
    const TailFit fit = tail_exponent_fit(x1, grid);
    const double secs = detail::seconds_since(t0);
    r.checks.push_back({"A10", "tail_slope_ci_upper(slope=" + std::to_string(fit.slope) + ")", fit.ci_high, 0.0,
                        fit.negative(), secs});
    return r;
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"greene", "coupling", "kernels", "converge",
                                                "determinantal", "fredholm", "tails"};
    return names;
}

inline SuiteReport run_suite(const std::string& name) {
    if (name == "greene") return verify_greene();
    if (name == "coupling") return verify_coupling();
    if (name == "kernels") return verify_kernels();
    if (name == "converge") return verify_converge();
    if (name == "determinantal") return verify_determinantal();
    if (name == "fredholm") return verify_fredholm();
    if (name == "tails") return verify_tails();
    throw config_error("unknown verify suite '" + name + "'");
}

}  // namespace aw
