#pragma once
/**
 * Monte Carlo factorial moments, their determinantal counterparts, Pearson
 * goodness of fit, and empirical tail-slope fits.
 */

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "combinatorics.hpp"
#include "errors.hpp"
#include "fredholm.hpp"
#include "scaling.hpp"

namespace aw {

struct PointConfig {
    std::vector<double> times;
    std::vector<std::vector<double>> points;  // per time, strictly decreasing
    std::uint64_t seed = 0;

    // Points past the stored prefix all lie below the last stored point.
    bool covers(std::size_t time, double lo) const { return !points[time].empty() && lo > points[time].back(); }
};

// Stored prefix: every nonzero part plus this many zero parts.
inline constexpr std::size_t kPointPadding = 10;

inline PointConfig point_config(const PartitionSequence& seq, const ScalingPlan& plan, std::uint64_t seed) {
    PointConfig pc;
    pc.times = plan.t;
    pc.seed = seed;
    for (std::size_t j = 0; j < plan.t.size(); ++j) {
        const std::size_t idx = static_cast<std::size_t>(plan.M[j]) - 1;
        require(idx < seq.seq.size(), "point_config: sequence too short for the plan");
        const std::size_t count = seq.seq[idx].length() + kPointPadding;
        pc.points.push_back(rescale_points(seq.seq[idx], plan, j, count));
    }
    return pc;
}

// Unscaled configuration {lambda_i - i} of the slices lambda(m, N), m = 1..m_count.
inline PointConfig point_config_raw(const PartitionSequence& seq, std::uint64_t seed) {
    PointConfig pc;
    pc.seed = seed;
    for (std::size_t m = 1; m <= seq.m_count; ++m) {
        const Partition& l = seq.seq[m - 1];
        std::vector<double> pts;
        for (std::size_t i = 0; i < l.length() + kPointPadding; ++i)
            pts.push_back(static_cast<double>(l[i]) - static_cast<double>(i + 1));
        pc.times.push_back(static_cast<double>(m));
        pc.points.push_back(std::move(pts));
    }
    return pc;
}

struct Box {
    std::size_t time = 0;  // index into PointConfig::times
    double lo = 0.0, hi = 0.0;  // [lo, hi)
    bool contains(double x) const { return x >= lo && x < hi; }
};

struct MomentReport {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
    std::vector<Box> boxes;
    std::vector<int> orders;
};

inline void check_boxes(const std::vector<Box>& boxes, const std::vector<int>& orders) {
    require(!boxes.empty() && boxes.size() == orders.size(), "one order per box is required");
    for (int o : orders) require(o >= 1, "orders must be at least 1");
    for (const Box& b : boxes) require(b.lo < b.hi, "boxes must be nonempty half-open intervals");
    for (std::size_t i = 0; i < boxes.size(); ++i)
        for (std::size_t j = i + 1; j < boxes.size(); ++j)
            if (boxes[i].time == boxes[j].time)
                require(boxes[i].hi <= boxes[j].lo || boxes[j].hi <= boxes[i].lo,
                        "boxes within one time must be disjoint");
}

inline double falling_factorial(long c, int n) {
    double v = 1.0;
    for (int k = 0; k < n; ++k) v *= static_cast<double>(c - k);
    return v;
}

// Mean and standard error; the error uses 100 batch means when there are enough samples.
inline std::pair<double, double> batch_mean(const std::vector<double>& v) {
    const std::size_t n = v.size();
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    const std::size_t batches = n >= 200 ? 100 : n;
    if (batches < 2) return {mean, 0.0};
    const std::size_t per = n / batches;
    std::vector<double> bm(batches, 0.0);
    for (std::size_t b = 0; b < batches; ++b) {
        for (std::size_t i = b * per; i < (b + 1) * per; ++i) bm[b] += v[i];
        bm[b] /= static_cast<double>(per);
    }
    double bmean = 0.0;
    for (double x : bm) bmean += x;
    bmean /= static_cast<double>(batches);
    double var = 0.0;
    for (double x : bm) var += (x - bmean) * (x - bmean);
    var /= static_cast<double>(batches - 1);
    return {mean, std::sqrt(var / static_cast<double>(batches))};
}

inline MomentReport factorial_moment_mc(const std::vector<PointConfig>& samples,
                                        const std::vector<Box>& boxes, const std::vector<int>& orders) {
    require(!samples.empty(), "factorial_moment_mc: empty sample list");
    check_boxes(boxes, orders);
    std::vector<double> vals(samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s) {
        double prod = 1.0;
        for (std::size_t b = 0; b < boxes.size(); ++b) {
            const Box& box = boxes[b];
            require(box.time < samples[s].points.size(), "box time outside the configuration");
            require(samples[s].covers(box.time, box.lo), "box reaches below the stored point prefix");
            long c = 0;
            for (double x : samples[s].points[box.time]) c += box.contains(x);
            prod *= falling_factorial(c, orders[b]);
        }
        vals[s] = prod;
    }
    MomentReport r;
    std::tie(r.estimate, r.std_error) = batch_mean(vals);
    r.n_samples = samples.size();
    r.boxes = boxes;
    r.orders = orders;
    return r;
}

using MultiTimeKernel = std::function<cplx(std::size_t, double, std::size_t, double)>;

/**
 * Integral of det[K(t_i, x_i; t_j, x_j)] over A_1^{n_1} x ... against the measure: exact
 * lattice sums for a counting measure, tensor Gauss-Legendre for Lebesgue measure.
 */
inline double det_moment_integral(const MultiTimeKernel& kernel, const std::vector<Box>& boxes,
                                  const std::vector<int>& orders, const Measure& measure,
                                  int gl_nodes = 16) {
    check_boxes(boxes, orders);
    int n = 0;
    for (int o : orders) n += o;
    require(n <= 4, "det_moment_integral: total order above 4");
    for (const Box& b : boxes) require(std::isfinite(b.lo) && std::isfinite(b.hi), "boxes must be bounded");

    // Per box: nodes and weights.
    std::vector<std::vector<double>> xs(boxes.size()), ws(boxes.size());
    for (std::size_t b = 0; b < boxes.size(); ++b) {
        if (const auto* d = std::get_if<Discrete>(&measure)) {
            double x = d->offset + d->step * std::ceil((boxes[b].lo - d->offset) / d->step);
            for (; x < boxes[b].hi; x += d->step) {
                xs[b].push_back(x);
                ws[b].push_back(1.0);
            }
        } else {
            const auto& g = gauss_legendre(gl_nodes);
            const double h = 0.5 * (boxes[b].hi - boxes[b].lo);
            for (int i = 0; i < gl_nodes; ++i) {
                xs[b].push_back(boxes[b].lo + h * (g.x[i] + 1.0));
                ws[b].push_back(h * g.w[i]);
            }
        }
    }
    // Flattened node list with a cached kernel matrix.
    std::vector<std::size_t> off(boxes.size() + 1, 0);
    for (std::size_t b = 0; b < boxes.size(); ++b) off[b + 1] = off[b] + xs[b].size();
    const std::size_t total = off.back();
    if (total == 0) return 0.0;
    std::vector<std::size_t> owner(total);
    std::vector<double> node(total), weight(total);
    for (std::size_t b = 0; b < boxes.size(); ++b)
        for (std::size_t i = 0; i < xs[b].size(); ++i) {
            owner[off[b] + i] = b;
            node[off[b] + i] = xs[b][i];
            weight[off[b] + i] = ws[b][i];
        }
    Eigen::MatrixXcd K(total, total);
    parallel_for(total, [&](std::size_t i) {
        for (std::size_t j = 0; j < total; ++j)
            K(i, j) = kernel(boxes[owner[i]].time, node[i], boxes[owner[j]].time, node[j]);
    });

    // Slot s of the n-tuple ranges over the nodes of box slot_box[s].
    std::vector<std::size_t> slot_box;
    for (std::size_t b = 0; b < boxes.size(); ++b)
        for (int o = 0; o < orders[b]; ++o) slot_box.push_back(b);
    std::vector<std::size_t> pick(n);
    cplx sum = 0.0;
    auto rec = [&](auto&& self, int s) -> void {
        if (s == n) {
            Eigen::MatrixXcd m(n, n);
            double w = 1.0;
            for (int i = 0; i < n; ++i) {
                w *= weight[pick[i]];
                for (int j = 0; j < n; ++j) m(i, j) = K(pick[i], pick[j]);
            }
            sum += w * m.determinant();
            return;
        }
        const std::size_t b = slot_box[s];
        for (std::size_t i = off[b]; i < off[b + 1]; ++i) {
            pick[s] = i;
            self(self, s + 1);
        }
    };
    rec(rec, 0);
    return sum.real();
}

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    std::size_t cells = 0;
};

/**
 * Pearson test of counts against probabilities. Cells with expected count below 5, outcomes
 * missing from `expected`, and the unassigned mass 1 - sum(expected) are pooled into one cell.
 */
template <class Key>
ChiSquareResult chi_square_gof(const std::map<Key, long>& observed, const std::map<Key, double>& expected) {
    long n = 0;
    for (const auto& [k, c] : observed) {
        require(c >= 0, "chi_square_gof: negative count");
        n += c;
    }
    require(n > 0, "chi_square_gof: no observations");
    double mass = 0.0;
    for (const auto& [k, p] : expected) {
        require(p >= 0.0, "chi_square_gof: negative probability");
        mass += p;
    }
    require(mass >= 0.99 && mass <= 1.0 + 1e-9, "chi_square_gof: expected masses must sum to at least 0.99");

    std::vector<std::pair<double, double>> cells;  // (observed, expected count)
    double other_obs = 0.0, other_exp = std::max(0.0, 1.0 - mass) * n;
    for (const auto& [k, p] : expected) {
        const auto it = observed.find(k);
        const double o = it == observed.end() ? 0.0 : static_cast<double>(it->second);
        if (p * n >= 5.0) cells.emplace_back(o, p * n);
        else {
            other_obs += o;
            other_exp += p * n;
        }
    }
    for (const auto& [k, c] : observed)
        if (!expected.count(k)) other_obs += static_cast<double>(c);
    if (other_exp >= 5.0) {
        cells.emplace_back(other_obs, other_exp);
    } else if (other_exp > 0.0 || other_obs > 0.0) {
        require(!cells.empty(), "chi_square_gof: insufficient counts for any cell");
        auto smallest = std::min_element(cells.begin(), cells.end(),
                                         [](const auto& a, const auto& b) { return a.second < b.second; });
        smallest->first += other_obs;
        smallest->second += other_exp;
    }
    require(!cells.empty(), "chi_square_gof: insufficient counts");
    ChiSquareResult r;
    r.cells = cells.size();
    for (const auto& [o, e] : cells) r.statistic += (o - e) * (o - e) / e;
    r.dof = static_cast<int>(cells.size()) - 1;
    r.p_value = r.dof == 0 ? 1.0 : boost::math::gamma_q(0.5 * r.dof, 0.5 * r.statistic);
    return r;
}

struct TailFit {
    double slope = 0.0, intercept = 0.0;
    double ci_low = 0.0, ci_high = 0.0;  // 95% confidence interval for the slope
    std::size_t points = 0;
    bool negative() const { return ci_high < 0.0; }
};

// Least-squares line through log P_emp(X > a) over grid points with at least 30 exceedances.
inline TailFit tail_exponent_fit(const std::vector<double>& samples, const std::vector<double>& a_grid,
                                 std::size_t min_samples = 10000) {
    require(samples.size() >= min_samples, "tail_exponent_fit: too few samples");
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    std::vector<double> xa, ly;
    for (double a : a_grid) {
        const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), a);
        if (above >= 30) {
            xa.push_back(a);
            ly.push_back(std::log(static_cast<double>(above) / n));
        }
    }
    require(xa.size() >= 3, "tail_exponent_fit: too few tail events on the grid");
    const double k = static_cast<double>(xa.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xa.size(); ++i) {
        mx += xa[i];
        my += ly[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xa.size(); ++i) {
        sxx += (xa[i] - mx) * (xa[i] - mx);
        sxy += (xa[i] - mx) * (ly[i] - my);
    }
    require(sxx > 0.0, "tail_exponent_fit: degenerate grid");
    TailFit f;
    f.points = xa.size();
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < xa.size(); ++i) {
        const double e = ly[i] - f.intercept - f.slope * xa[i];
        rss += e * e;
    }
    const double se = std::sqrt(rss / (k - 2.0) / sxx);
    const double tq = boost::math::quantile(boost::math::students_t(k - 2.0), 0.975);
    f.ci_low = f.slope - tq * se;
    f.ci_high = f.slope + tq * se;
    return f;
}

}  // namespace aw
