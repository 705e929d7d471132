#pragma once
/**
 * Correlation kernels.
 *
 *   phi_eval / log_phi      the deformation function Phi_{a,b,c}
 *   limit_kernel            K_{a,b,c} = K1 + K2 + K3 on legal ray contours
 *   prelimit_kernel         the finite-N kernel on notched circles near 1
 *   schur_circle_kernel     the Schur process kernel on two circles
 *   airy_kernel, bp_finite  reference kernels
 *   limit_parts_infinity    the N -> infinity limits of the scaled prelimit parts
 */

#include <Eigen/Dense>
#include <boost/math/special_functions/airy.hpp>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "quadrature.hpp"
#include "scaling.hpp"

namespace aw {

struct PhiEvaluator {
    ParamSet params;
    std::size_t truncation_index = 0;  // prefix terms used from each sequence
    double tail_bound = 0.0;           // certified bound on the omitted parameter mass

    // Bound on |log Phi_truncated(z) - log Phi(z)|, valid while every omitted
    // parameter times max(|z|, 1/|z|) stays below 1/2.
    double log_error_bound(cplx z) const {
        return 2.0 * tail_bound * (std::abs(z) + 1.0 / std::abs(z));
    }
};

inline PhiEvaluator make_phi(const ParamSet& raw,
                             std::size_t truncation_index = std::numeric_limits<std::size_t>::max()) {
    PhiEvaluator ev;
    ev.params = validate_params(raw);
    ev.truncation_index = truncation_index;
    double omitted = ev.params.total_tail_bound();
    for (const ParamSequence* s : {&ev.params.a_plus, &ev.params.a_minus, &ev.params.b_plus,
                                   &ev.params.b_minus})
        for (std::size_t i = truncation_index; i < s->prefix.size(); ++i) omitted += s->prefix[i];
    ev.tail_bound = omitted;
    return ev;
}

inline cplx log_phi(cplx z, const PhiEvaluator& ev) {
    require(std::abs(z) > 0.0, "phi_eval: z = 0 is an essential singularity");
    const ParamSet& p = ev.params;
    const std::size_t n = ev.truncation_index;
    cplx s = p.c_plus * z;
    if (p.c_minus > 0.0) s += p.c_minus / z;
    auto each = [&](const ParamSequence& q, auto&& term) {
        const std::size_t m = std::min(n, q.prefix.size());
        for (std::size_t i = 0; i < m; ++i)
            if (q.prefix[i] > 0.0) term(q.prefix[i]);
    };
    each(p.a_plus, [&](double a) {
        require(std::abs(z - 1.0 / a) > 1e-9, "phi_eval: z touches a pole 1/a_i^+");
        s -= std::log(1.0 - a * z);
    });
    each(p.a_minus, [&](double a) {
        require(std::abs(z - a) > 1e-9, "phi_eval: z touches a pole a_i^-");
        s -= std::log(1.0 - a / z);
    });
    each(p.b_plus, [&](double b) { s += std::log(1.0 + b * z); });
    each(p.b_minus, [&](double b) { s += std::log(1.0 + b / z); });
    return s;
}

inline cplx phi_eval(cplx z, const PhiEvaluator& ev) { return std::exp(log_phi(z, ev)); }

struct KernelValue {
    cplx value, k1, k2, k3;
    double err = 0.0;
};

// Shifted apexes: A = alpha + t1 for Gamma^+, B = beta + t2 for Gamma^-.
struct ContourChoice {
    double A = 1.0;
    double B = -1.0;
};

inline ContourChoice default_contours(const ParamSet& p) {
    if (p.a_bar > 0.0 && p.b_bar < 0.0) {
        double A = std::isfinite(p.a_bar) ? std::min(p.a_bar / 2.0, 1.0) : 1.0;
        double B = std::isfinite(p.b_bar) ? std::max(p.b_bar / 2.0, -1.0) : -1.0;
        if (std::isfinite(p.a_bar) && p.a_bar - A < 0.1) A = p.a_bar - 0.1;
        if (std::isfinite(p.b_bar) && B - p.b_bar < 0.1) B = p.b_bar + 0.1;
        if (A - B >= 0.2) return {A, B};
    }
    // Crossing contours; every pole of Phi lies in [a_bar, inf) and every zero in (-inf, b_bar].
    return {-1.0, 1.0};
}

inline double heat_term(double t1, double x1, double t2, double x2) {
    if (!(t2 > t1)) return 0.0;
    const double d = t2 - t1;
    return -std::exp(-(x2 - x1) * (x2 - x1) / (4 * d) - d * (x2 + x1) / 2 + d * d * d / 12) /
           std::sqrt(4 * kPi * d);
}

inline double default_half_length(double x1, double x2) {
    return std::max(8.0, 2.0 + std::sqrt(std::fabs(x1)) + std::sqrt(std::fabs(x2)));
}

// Crossing points of Gamma^+_A and Gamma^-_B: two conjugate points when A < B, the apex when A == B.
inline std::vector<cplx> ray_crossings(double A, double B) {
    if (A < B) {
        const double c = 0.5 * (A + B), d = 0.5 * (B - A);
        return {cplx(c, -d), cplx(c, d)};
    }
    if (A == B) return {cplx(A, 0.0)};
    return {};
}

inline KernelValue limit_kernel(const ParamSet& raw, double t1, double x1, double t2, double x2,
                                const QuadOpts& opts = {},
                                std::optional<ContourChoice> choice = std::nullopt) {
    const ParamSet p = raw.validated ? raw : validate_params(raw);
    const ContourChoice cc = choice ? *choice : default_contours(p);
    require(cc.A < p.a_bar, "contour request: alpha + t1 must lie left of a_bar");
    require(cc.B > p.b_bar, "contour request: beta + t2 must lie right of b_bar");
    const PhiEvaluator ev = make_phi(p);

    KernelValue kv;
    kv.k2 = heat_term(t1, x1, t2, x2);

    const auto crossings = ray_crossings(cc.A, cc.B);
    if (crossings.size() == 2) {
        auto e = [&](cplx w) {
            return (t2 - t1) * w * w + (t1 * t1 - t2 * t2) * w + w * (x2 - x1) + x1 * t1 - x2 * t2 -
                   t1 * t1 * t1 / 3 + t2 * t2 * t2 / 3;
        };
        const auto r = integrate_path_log(e, ContourSpec{VerticalSegment{crossings[0], crossings[1]}},
                                          opts);
        kv.k1 = r.value / (2 * kPi * kI);
        kv.err += r.err / (2 * kPi);
    }

    const double L = default_half_length(x1, x2);
    const ContourSpec cz{RayPair{cc.A, Side::plus, L + std::fabs(cc.A - t1)}};
    const ContourSpec cw{RayPair{cc.B, Side::minus, L + std::fabs(cc.B - t2)}};
    auto lz = [&](cplx Z) {
        const cplx z = Z - t1;
        return z * z * z / 3.0 - x1 * z + log_phi(Z, ev);
    };
    auto lw = [&](cplx W) {
        const cplx w = W - t2;
        return -w * w * w / 3.0 + x2 * w - log_phi(W, ev);
    };
    const auto r3 = integrate_double_singular_log(lz, lw, cz, cw, crossings, opts);
    const cplx pref = 1.0 / ((2 * kPi * kI) * (2 * kPi * kI));
    kv.k3 = pref * r3.value;
    kv.err += r3.err / (4 * kPi * kPi);
    if (!r3.converged && opts.target_rel_err > 0) kv.err = std::max(kv.err, r3.err);
    kv.value = kv.k1 + kv.k2 + kv.k3;
    return kv;
}

// Extended Airy / finite Borodin-Peche kernel with explicit X (poles, right) and Y (zeros, left).
inline KernelValue bp_finite(const std::vector<double>& X, const std::vector<double>& Y, double t1,
                             double x1, double t2, double x2, const QuadOpts& opts = {}) {
    const double inf = std::numeric_limits<double>::infinity();
    double hi = inf, lo = -inf;
    for (double v : X) hi = std::min(hi, v);
    for (double v : Y) lo = std::max(lo, v);
    require(hi > lo, "bp_finite: need min X > max Y");
    double A, B;
    if (std::isfinite(hi) && std::isfinite(lo)) {
        A = lo + 0.6 * (hi - lo);
        B = lo + 0.3 * (hi - lo);
    } else if (std::isfinite(hi)) {
        A = std::min(hi - 0.5, 0.5);
        B = A - 1.5;
    } else if (std::isfinite(lo)) {
        B = std::max(lo + 0.5, -0.5);
        A = B + 1.5;
    } else {
        A = 0.5;
        B = -1.0;
    }
    KernelValue kv;
    kv.k2 = heat_term(t1, x1, t2, x2);
    const double L = default_half_length(x1, x2);
    const ContourSpec cz{RayPair{A, Side::plus, L + std::fabs(A - t1)}};
    const ContourSpec cw{RayPair{B, Side::minus, L + std::fabs(B - t2)}};
    auto lz = [&](cplx Z) {
        const cplx z = Z - t1;
        cplx s = z * z * z / 3.0 - x1 * z;
        for (double xi : X) s -= std::log(Z - xi);
        for (double yj : Y) s += std::log(Z - yj);
        return s;
    };
    auto lw = [&](cplx W) {
        const cplx w = W - t2;
        cplx s = -w * w * w / 3.0 + x2 * w;
        for (double xi : X) s += std::log(W - xi);
        for (double yj : Y) s -= std::log(W - yj);
        return s;
    };
    const auto r = integrate_double_singular_log(lz, lw, cz, cw, {}, opts);
    kv.k3 = r.value / ((2 * kPi * kI) * (2 * kPi * kI));
    kv.err = r.err / (4 * kPi * kPi);
    kv.value = kv.k2 + kv.k3;
    return kv;
}

// (Ai(x)Ai'(y) - Ai'(x)Ai(y)) / (x - y), continuous across the diagonal.
inline double airy_kernel(double x, double y) {
    using boost::math::airy_ai;
    using boost::math::airy_ai_prime;
    if (std::fabs(x - y) > 1e-2) {
        return (airy_ai(x) * airy_ai_prime(y) - airy_ai_prime(x) * airy_ai(y)) / (x - y);
    }
    // Taylor expansion about the midpoint using Ai'' = m Ai; the omitted term is O(h^6).
    const double m = 0.5 * (x + y), h = 0.5 * (x - y);
    const double a = airy_ai(m), b = airy_ai_prime(m);
    const double h2 = h * h;
    return b * b - m * a * a + h2 * (-2 * a * a * m * m / 3 + a * b / 3 + 2 * b * b * m / 3) +
           h2 * h2 * (-2 * a * a * m * m * m / 15 + a * a / 20 + a * b * m / 15 + 2 * b * b * m * m / 15);
}

inline KernelValue extended_airy(double t1, double x1, double t2, double x2, const QuadOpts& opts = {}) {
    return bp_finite({}, {}, t1, x1, t2, x2, opts);
}

struct KernelBlock {
    Eigen::MatrixXcd value;  // value(i, k) = K(xs[i], ys[k])
    double err = 0.0;
    bool converged = true;
};

/**
 * Schur process kernel K(M_u, x; M_v, y) on a block of integer points, by a double trapezoid
 * rule on two zero-centred circles. The z circle is the inner one iff M_u > M_v.
 */
inline KernelBlock schur_circle_kernel_block(const std::vector<double>& X, const std::vector<double>& Y,
                                             long M_u, long M_v, const std::vector<long>& xs,
                                             const std::vector<long>& ys, const QuadOpts& opts = {}) {
    require(M_u >= 0 && M_v >= 0 && static_cast<std::size_t>(std::max(M_u, M_v)) <= X.size(),
            "schur_circle_kernel: M_u, M_v exceed the x parameters");
    require(!xs.empty() && !ys.empty(), "schur_circle_kernel: empty point block");
    double ymax = 0.0, xmax = 0.0;
    for (double v : Y) ymax = std::max(ymax, v);
    for (double v : X) xmax = std::max(xmax, v);
    require(ymax * xmax < 1.0, "schur_circle_kernel: need max y < min 1/x");

    auto base_z = [&](cplx z) {
        cplx s = 0.0;
        for (double yk : Y) s += std::log(1.0 - yk / z);
        for (long k = 0; k < M_u; ++k) s -= std::log(1.0 - X[k] * z);
        return s;
    };
    auto base_w = [&](cplx w) {
        cplx s = 0.0;
        for (double yk : Y) s -= std::log(1.0 - yk / w);
        for (long k = 0; k < M_v; ++k) s += std::log(1.0 - X[k] * w);
        return s;
    };
    // z^{-x-1} dz = i z^{-x} dtheta and w^y dw = i w^{y+1} dtheta.
    const auto [xlo, xhi] = std::minmax_element(xs.begin(), xs.end());
    const auto [ylo, yhi] = std::minmax_element(ys.begin(), ys.end());
    const double xc = 0.5 * (*xlo + *xhi), yc = 0.5 * (*ylo + *yhi);

    // Centre both circles where the maximum of |integrand| over the circle is smallest, so the
    // sum does not cancel; that maximum is log-convex in log r. The radius gap sets how many
    // nodes resolve 1/(z - w).
    const double lo = std::log(ymax > 0.0 ? ymax : 1e-3);
    const double hi = std::log(xmax > 0.0 ? 1.0 / xmax : 1e3);
    auto g = [&](double lr) {
        double mz = -std::numeric_limits<double>::infinity(), mw = mz;
        for (int k = 0; k < 64; ++k) {
            const cplx z = std::polar(std::exp(lr), 2 * kPi * (k + 0.5) / 64 - kPi);
            mz = std::max(mz, (base_z(z) - xc * std::log(z)).real());
            mw = std::max(mw, (base_w(z) + (yc + 1.0) * std::log(z)).real());
        }
        return mz + mw;
    };
    double a = lo + 0.1 * (hi - lo), b = hi - 0.1 * (hi - lo);
    for (int it = 0; it < 40; ++it) {
        const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
        if (g(m1) < g(m2)) b = m2;
        else a = m1;
    }
    const double c = 0.5 * (a + b);
    const double eta = std::min({0.1, 0.5 * (hi - c), 0.5 * (c - lo)});
    const double r1 = std::exp(M_u > M_v ? c - eta : c + eta);  // z radius
    const double r2 = std::exp(M_u > M_v ? c + eta : c - eta);  // w radius

    const auto nx = static_cast<Eigen::Index>(xs.size()), ny = static_cast<Eigen::Index>(ys.size());
    auto trap = [&](int n) {
        std::vector<cplx> Z(n), W(n), Bz(n), Bw(n);
        for (int k = 0; k < n; ++k) {
            const double th = 2 * kPi * (k + 0.5) / n - kPi;
            Z[k] = std::polar(r1, th);
            W[k] = std::polar(r2, th);
            Bz[k] = base_z(Z[k]);
            Bw[k] = base_w(W[k]);
        }
        Eigen::MatrixXcd A(nx, n), B(n, ny), C(n, n);
        std::vector<double> sx(nx), sy(ny);
        std::vector<cplx> L(n);
        for (Eigen::Index i = 0; i < nx; ++i) {
            for (int k = 0; k < n; ++k) L[k] = Bz[k] - static_cast<double>(xs[i]) * std::log(Z[k]);
            sx[i] = detail::max_real(L);
            for (int k = 0; k < n; ++k) A(i, k) = detail::safe_exp(L[k], sx[i]);
        }
        for (Eigen::Index i = 0; i < ny; ++i) {
            for (int k = 0; k < n; ++k) L[k] = Bw[k] + static_cast<double>(ys[i] + 1) * std::log(W[k]);
            sy[i] = detail::max_real(L);
            for (int k = 0; k < n; ++k) B(k, i) = detail::safe_exp(L[k], sy[i]);
        }
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) C(j, k) = 1.0 / (Z[j] - W[k]);
        Eigen::MatrixXcd out = A * (C * B);
        const double nn = static_cast<double>(n) * n;
        for (Eigen::Index i = 0; i < nx; ++i)
            for (Eigen::Index k = 0; k < ny; ++k) out(i, k) = detail::scaled(out(i, k) / nn, sx[i] + sy[k]);
        return out;
    };
    int n = 64;
    while (n * eta < 40.0 && n < 2048) n *= 2;
    Eigen::MatrixXcd prev = trap(n);
    for (;;) {
        KernelBlock kb;
        kb.value = trap(2 * n);
        const double diff = (kb.value - prev).cwiseAbs().maxCoeff();
        const double scale = kb.value.cwiseAbs().maxCoeff();
        kb.err = diff;
        kb.converged = diff <= std::max(opts.target_rel_err * scale, opts.abs_floor);
        if (kb.converged || n >= 4096) return kb;
        prev = std::move(kb.value);
        n *= 2;
    }
}

inline QuadResult schur_circle_kernel(const std::vector<double>& X, const std::vector<double>& Y,
                                      long M_u, long M_v, long x, long y, const QuadOpts& opts = {}) {
    const KernelBlock kb = schur_circle_kernel_block(X, Y, M_u, M_v, {x}, {y}, opts);
    return {kb.value(0, 0), kb.err, kb.converged};
}

/**
 * One-time slice K(t, x; t, y) on a block of points. With disjoint default contours the
 * K3 double integral is the bilinear form A C B on one discretization; otherwise each entry
 * is evaluated separately.
 */
inline KernelBlock limit_kernel_block(const ParamSet& raw, double t, const std::vector<double>& xs,
                                      const std::vector<double>& ys, const QuadOpts& opts = {}) {
    const ParamSet p = raw.validated ? raw : validate_params(raw);
    const ContourChoice cc = default_contours(p);
    const auto nx = static_cast<Eigen::Index>(xs.size()), ny = static_cast<Eigen::Index>(ys.size());
    KernelBlock kb;
    kb.value.resize(nx, ny);
    if (!(cc.A > cc.B)) {
        std::vector<double> errs(xs.size(), 0.0);
        parallel_for(xs.size(), [&](std::size_t i) {
            for (Eigen::Index k = 0; k < ny; ++k) {
                const KernelValue v = limit_kernel(p, t, xs[i], t, ys[k], opts, cc);
                kb.value(static_cast<Eigen::Index>(i), k) = v.value;
                errs[i] = std::max(errs[i], v.err);
            }
        });
        kb.err = *std::max_element(errs.begin(), errs.end());
        return kb;
    }
    const PhiEvaluator ev = make_phi(p);
    double xm = 0.0, ym = 0.0;
    for (double x : xs) xm = std::max(xm, std::fabs(x));
    for (double y : ys) ym = std::max(ym, std::fabs(y));
    const double L = default_half_length(xm, ym);
    const ContourSpec cz{RayPair{cc.A, Side::plus, L + std::fabs(cc.A - t)}};
    const ContourSpec cw{RayPair{cc.B, Side::minus, L + std::fabs(cc.B - t)}};
    auto pass = [&](double ppu) {
        const auto dz = detail::discretize(cz, ppu, {}, opts.singular_refine_depth, opts.gauss_order);
        const auto dw = detail::discretize(cw, ppu, {}, opts.singular_refine_depth, opts.gauss_order);
        const auto nz = static_cast<Eigen::Index>(dz.nodes.size());
        const auto nw = static_cast<Eigen::Index>(dw.nodes.size());
        std::vector<cplx> gz(nz), gw(nw);
        for (Eigen::Index j = 0; j < nz; ++j) {
            const cplx z = dz.nodes[j].z - t;
            gz[j] = z * z * z / 3.0 + log_phi(dz.nodes[j].z, ev);
        }
        for (Eigen::Index k = 0; k < nw; ++k) {
            const cplx w = dw.nodes[k].z - t;
            gw[k] = -w * w * w / 3.0 - log_phi(dw.nodes[k].z, ev);
        }
        Eigen::MatrixXcd A(nx, nz), B(nw, ny), C(nz, nw);
        std::vector<double> sx(nx), sy(ny);
        std::vector<cplx> l(std::max(nz, nw));
        for (Eigen::Index i = 0; i < nx; ++i) {
            for (Eigen::Index j = 0; j < nz; ++j) l[j] = gz[j] - xs[i] * (dz.nodes[j].z - t);
            sx[i] = detail::max_real({l.begin(), l.begin() + nz});
            for (Eigen::Index j = 0; j < nz; ++j) A(i, j) = dz.nodes[j].weight * detail::safe_exp(l[j], sx[i]);
        }
        for (Eigen::Index i = 0; i < ny; ++i) {
            for (Eigen::Index k = 0; k < nw; ++k) l[k] = gw[k] + ys[i] * (dw.nodes[k].z - t);
            sy[i] = detail::max_real({l.begin(), l.begin() + nw});
            for (Eigen::Index k = 0; k < nw; ++k) B(k, i) = dw.nodes[k].weight * detail::safe_exp(l[k], sy[i]);
        }
        for (Eigen::Index j = 0; j < nz; ++j)
            for (Eigen::Index k = 0; k < nw; ++k) C(j, k) = 1.0 / (dz.nodes[j].z - dw.nodes[k].z);
        Eigen::MatrixXcd out = A * (C * B);
        const cplx pref = 1.0 / ((2 * kPi * kI) * (2 * kPi * kI));
        for (Eigen::Index i = 0; i < nx; ++i)
            for (Eigen::Index k = 0; k < ny; ++k) out(i, k) = pref * detail::scaled(out(i, k), sx[i] + sy[k]);
        return out;
    };
    kb.value = pass(2.0 * opts.panels_per_unit);
    const Eigen::MatrixXcd coarse = pass(opts.panels_per_unit);
    kb.err = (kb.value - coarse).cwiseAbs().maxCoeff();
    kb.converged = kb.err <= std::max(opts.target_rel_err * kb.value.cwiseAbs().maxCoeff(), opts.abs_floor);
    return kb;
}

namespace detail {

// Precomputed sums over the non-q block of a plan sequence.
struct PlanSide {
    std::vector<double> special;
    long q_count = 0;
};

inline PlanSide plan_side(const std::vector<double>& seq, long len, double q) {
    PlanSide s;
    for (long k = 0; k < len; ++k) {
        if (seq[k] == q) ++s.q_count;
        else s.special.push_back(seq[k]);
    }
    return s;
}

}  // namespace detail

/**
 * Finite-N kernel K_N(u, x; v, y) for a plan (time indices zero-based). Real x, y use
 * principal-branch powers. K2 uses the negative binomial coefficient when x - y is an integer.
 */
inline KernelValue prelimit_kernel(const ScalingPlan& plan, std::size_t u, double x, std::size_t v,
                                   double y, const QuadOpts& opts = {}) {
    require(u < plan.M.size() && v < plan.M.size(), "prelimit_kernel: time index out of range");
    const double Nd = static_cast<double>(plan.N);
    const double eps = 1.0 / std::cbrt(Nd);
    const double delta = std::min(std::pow(Nd, -1.0 / 12.0), 0.5);
    require(delta > eps, "prelimit_kernel: N too small for the notched contours");
    const double q = plan.q;
    const long Mu = plan.M[u], Mv = plan.M[v];
    const double lq = std::log1p(-q);
    const auto xs_u = detail::plan_side(plan.x_seq, Mu, q);
    const auto xs_v = detail::plan_side(plan.x_seq, Mv, q);
    const auto ys = detail::plan_side(plan.y_seq, plan.N, q);

    KernelValue kv;
    const long n = Mu - Mv;

    // K1: segment from 1 - i eps to 1 + i eps.
    {
        auto e = [&](cplx w) {
            return -static_cast<double>(n) * std::log(1.0 - q * w) + (y - x - 1.0) * std::log(w) +
                   static_cast<double>(n) * lq;
        };
        const auto r = integrate_path_log(
            e, ContourSpec{VerticalSegment{cplx(1.0, -eps), cplx(1.0, eps)}}, opts);
        kv.k1 = r.value / (2 * kPi * kI);
        kv.err += r.err / (2 * kPi);
    }

    // K2: -(1-q)^n [w^{x-y}] (1-qw)^{-n}, only for u > v.
    if (u > v) {
        const double k = x - y;
        const double kr = std::round(k);
        if (std::fabs(k - kr) < 1e-9) {
            if (n == 0) {
                kv.k2 = kr == 0.0 ? -1.0 : 0.0;
            } else if (kr >= 0.0) {
                const double lc = std::lgamma(n + kr) - std::lgamma(kr + 1.0) - std::lgamma(double(n));
                kv.k2 = -std::exp(n * lq + lc + kr * std::log(q));
            }
        } else {
            auto e = [&](cplx w) {
                return -static_cast<double>(n) * std::log(1.0 - q * w) + (y - x - 1.0) * std::log(w) +
                       static_cast<double>(n) * lq;
            };
            const auto r = integrate_path_log(e, ContourSpec{Circle{1.0}}, opts);
            kv.k2 = -r.value / (2 * kPi * kI);
            kv.err += r.err / (2 * kPi);
        }
    }

    // K3: notched circles crossing at 1 +- i eps.
    auto lz = [&](cplx z) {
        cplx s = static_cast<double>(ys.q_count) * std::log(1.0 - q / z) -
                 static_cast<double>(xs_u.q_count) * std::log(1.0 - q * z) - (x + 1.0) * std::log(z) +
                 static_cast<double>(Mu) * lq;
        for (double yk : ys.special) s += std::log(1.0 - yk / z);
        for (double xk : xs_u.special) s -= std::log(1.0 - xk * z);
        return s;
    };
    auto lw = [&](cplx w) {
        cplx s = -static_cast<double>(ys.q_count) * std::log(1.0 - q / w) +
                 static_cast<double>(xs_v.q_count) * std::log(1.0 - q * w) + y * std::log(w) -
                 static_cast<double>(Mv) * lq;
        for (double yk : ys.special) s -= std::log(1.0 - yk / w);
        for (double xk : xs_v.special) s += std::log(1.0 - xk * w);
        return s;
    };
    const ContourSpec cz{NotchedCircle{1.0 - eps, delta, Side::plus, eps, 64}};
    const ContourSpec cw{NotchedCircle{1.0 + eps, delta, Side::minus, eps, 64}};
    const auto r3 = integrate_double_singular_log(lz, lw, cz, cw,
                                                  {cplx(1.0, -eps), cplx(1.0, eps)}, opts);
    kv.k3 = r3.value / ((2 * kPi * kI) * (2 * kPi * kI));
    kv.err += r3.err / (4 * kPi * kPi);
    kv.value = kv.k1 + kv.k2 + kv.k3;
    return kv;
}

// Lattice position x_N for a rescaled coordinate at time index j.
inline double lattice_position(const ScalingPlan& plan, std::size_t j, double xt) {
    const double n13 = std::cbrt(static_cast<double>(plan.N));
    return 2 * plan.q / (1 - plan.q) * static_cast<double>(plan.N_tilde) +
           plan.q * plan.t[j] / (1 - plan.q) * n13 * n13 + plan.sigma * xt * n13;
}

/** Right-hand sides of the three scaled prelimit limits at (t_u, xt; t_v, yt). */
inline KernelValue limit_parts_infinity(const ParamSet& raw, double q, double t_u, double xt,
                                        double t_v, double yt, const QuadOpts& opts = {}) {
    const ParamSet p = validate_params(raw);
    const PhiEvaluator ev = make_phi(p);
    const double s = sigma_q(q), f = f_q(q);
    KernelValue kv;
    {
        auto e = [&](cplx w) { return (yt - xt) * w - f * (t_v - t_u) * w * w; };
        const auto r = integrate_path_log(e, ContourSpec{VerticalSegment{cplx(0, -s), cplx(0, s)}},
                                          opts);
        kv.k1 = r.value / (2 * kPi * kI);
        kv.err += r.err / (2 * kPi);
    }
    if (t_u > t_v) {
        const double d = f * (t_u - t_v);
        kv.k2 = -std::exp(-(yt - xt) * (yt - xt) / (4 * d)) / std::sqrt(4 * kPi * d);
    }
    // Phi(-w) / Phi(-z) reproduces the parameter product of the limit.
    auto lz = [&](cplx z) { return z * z * z / 3.0 - xt * z + f * t_u * z * z - log_phi(-z, ev); };
    auto lw = [&](cplx w) { return -w * w * w / 3.0 + yt * w - f * t_v * w * w + log_phi(-w, ev); };
    const double L = default_half_length(xt, yt) + f * (std::fabs(t_u) + std::fabs(t_v)) + s;
    const ContourSpec cz{RayPair{-s, Side::plus, L}};
    const ContourSpec cw{RayPair{s, Side::minus, L}};
    const auto r3 = integrate_double_singular_log(lz, lw, cz, cw, {cplx(0, -s), cplx(0, s)}, opts);
    kv.k3 = r3.value / ((2 * kPi * kI) * (2 * kPi * kI));
    kv.err += r3.err / (4 * kPi * kPi);
    kv.value = kv.k1 + kv.k2 + kv.k3;
    return kv;
}

inline double relative_gap(cplx a, cplx b) {
    const double m = std::max(std::abs(a), std::abs(b));
    return m > 1e-14 ? std::abs(a - b) / m : std::abs(a - b);
}

/** Max relative deviation between the limit parts and the transformed K_{a,b,c} parts. */
inline double matching_transform_check(const ParamSet& raw, double q, double t_u, double t_v,
                                       double xt, double yt, const QuadOpts& opts = {}) {
    const ParamSet p = validate_params(raw);
    const double s = sigma_q(q), f = f_q(q);
    const KernelValue lhs = limit_parts_infinity(p, q, t_u, xt, t_v, yt, opts);
    const double T1 = f * t_v, X1 = yt + f * f * t_v * t_v;
    const double T2 = f * t_u, X2 = xt + f * f * t_u * t_u;
    const KernelValue k = limit_kernel(p, T1, X1, T2, X2, opts, ContourChoice{-s, s});
    const double pref = std::exp((xt * f * t_u + 2 * f * f * f * t_u * t_u * t_u / 3) -
                                 (yt * f * t_v + 2 * f * f * f * t_v * t_v * t_v / 3));
    return std::max({relative_gap(lhs.k1, pref * k.k1), relative_gap(lhs.k2, pref * k.k2),
                     relative_gap(lhs.k3, pref * k.k3)});
}

}  // namespace aw
