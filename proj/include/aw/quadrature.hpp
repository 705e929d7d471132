#pragma once
/**
 * Contour descriptors and quadrature engines.
 *
 * Single integrals use composite Gauss-Legendre on straight pieces and arcs,
 * and the trapezoidal rule on full circles. Double integrals of
 * f(z, w) / (z - w) use tensor Gauss-Legendre with panels graded
 * geometrically toward every declared crossing of the two contours. The
 * innermost cell pair at a crossing, where 1/(z - w) behaves like
 * (x^2 + y^2)^{-1/2}, is integrated with a Duffy split whose Jacobian cancels
 * the singularity. Error estimates come from repeating the computation with
 * doubled panel density.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"

namespace aw {

using cplx = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846;
inline const cplx kI{0.0, 1.0};

struct QuadOpts {
    int panels_per_unit = 4;
    int gauss_order = 16;
    int singular_refine_depth = 12;
    double target_rel_err = 1e-10;
    double abs_floor = 1e-13;
    bool estimate_error = true;
};

struct QuadResult {
    cplx value{0.0, 0.0};
    double err = 0.0;
    bool converged = true;
};

enum class Side { plus, minus };

// Gamma^+_a (rays at +-pi/4) or Gamma^-_a (rays at +-3pi/4), truncated at half_length.
struct RayPair {
    double apex = 0.0;
    Side dir = Side::plus;
    double half_length = 8.0;
};
// Zero-centred, positively oriented.
struct Circle {
    double radius = 1.0;
};
struct VerticalSegment {
    cplx lower, upper;
};
// gamma^{+-}_{a,delta}: two 45-degree arms from the apex to a +- delta +- i delta closed by a
// zero-centred arc. Arm panels have size scale/ppu near the apex and grow geometrically.
struct NotchedCircle {
    double apex = 1.0;
    double delta = 0.5;
    Side dir = Side::plus;
    double scale = 0.1;
    int arc_panels = 32;
};

struct ContourSpec {
    std::variant<RayPair, Circle, VerticalSegment, NotchedCircle> kind;
    int panels = 0;  // trapezoid node count for circles (0 selects 128)
};

struct GaussRule {
    std::vector<double> x, w;
};

inline const GaussRule& gauss_legendre(int n) {
    static std::mutex m;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(m);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
    require(n >= 1, "gauss_legendre: order must be positive");
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-16) break;
        }
        r.x[i] = -z;
        r.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return cache.emplace(n, std::move(r)).first->second;
}

namespace detail {

struct Piece {
    bool arc = false;
    cplx p0;       // line start
    cplx u;        // unit direction for lines
    double len = 0.0;
    double R = 0.0, th0 = 0.0;  // arcs: angle th0 + s/R
    // Grading for lines: size h0 within `extent` of an anchor, then growing linearly.
    double h0 = 0.25, extent = std::numeric_limits<double>::infinity(), growth = 0.5;
    std::vector<double> anchors;
    int fixed_panels = 0;  // arcs

    cplx point(double s) const {
        return arc ? std::polar(R, th0 + s / R) : p0 + s * u;
    }
    cplx tangent(double s) const {
        return arc ? kI * std::polar(1.0, th0 + s / R) : u;
    }
};

struct Panel {
    int piece = 0;
    double s0 = 0.0, s1 = 0.0;
    int tag = -1;
};

// Innermost cell touching a crossing: direction away from the crossing is side * u.
struct Tag {
    int crossing = 0;
    int piece = 0;
    double side = 1.0;
    double h = 0.0;
};

struct Node {
    cplx z, weight;
    int tag = -1;
};

struct Discretization {
    std::vector<Piece> pieces;
    std::vector<Panel> panels;
    std::vector<Tag> tags;
    std::vector<Node> nodes;
    std::vector<cplx> crossing_points;
};

inline std::vector<Piece> pieces_of(const ContourSpec& c, double ppu) {
    std::vector<Piece> out;
    const cplx e1 = std::polar(1.0, kPi / 4), e3 = std::polar(1.0, 3 * kPi / 4);
    const cplx em1 = std::conj(e1), em3 = std::conj(e3);
    auto line = [&](cplx p0, cplx u, double len, double h0) {
        Piece p;
        p.p0 = p0;
        p.u = u;
        p.len = len;
        p.h0 = h0;
        return p;
    };
    if (const auto* r = std::get_if<RayPair>(&c.kind)) {
        require(r->half_length > 0.0, "RayPair: half_length must be positive");
        const cplx a = r->apex;
        const double L = r->half_length;
        const cplx down = r->dir == Side::plus ? em1 : em3;
        const cplx up = r->dir == Side::plus ? e1 : e3;
        Piece lower = line(a + L * down, -down, L, 1.0 / ppu);
        lower.anchors = {L};
        Piece upper = line(a, up, L, 1.0 / ppu);
        upper.anchors = {0.0};
        out = {lower, upper};
    } else if (const auto* v = std::get_if<VerticalSegment>(&c.kind)) {
        require(std::abs(v->lower - std::conj(v->upper)) <= 1e-12 * (1.0 + std::abs(v->upper)),
                "VerticalSegment endpoints must be complex conjugates");
        require(v->upper.imag() > v->lower.imag(), "VerticalSegment must run upward");
        Piece p = line(v->lower, kI, v->upper.imag() - v->lower.imag(), 1.0 / ppu);
        p.anchors = {0.0, p.len};
        out = {p};
    } else if (const auto* cc = std::get_if<Circle>(&c.kind)) {
        require(cc->radius > 0.0, "Circle: radius must be positive");
        Piece p;
        p.arc = true;
        p.R = cc->radius;
        p.th0 = -kPi;
        p.len = 2 * kPi * p.R;
        p.fixed_panels = std::max(8, static_cast<int>(std::ceil(2 * kPi * p.R * ppu)));
        out = {p};
    } else {
        const auto& n = std::get<NotchedCircle>(c.kind);
        require(n.delta > 0.0 && n.scale > 0.0, "NotchedCircle: delta and scale must be positive");
        const double sgn = n.dir == Side::plus ? 1.0 : -1.0;
        const cplx a = n.apex;
        const cplx far_up = a + sgn * n.delta + kI * n.delta;
        const cplx far_down = std::conj(far_up);
        const double arm = n.delta * std::sqrt(2.0);
        const double h0 = n.scale / ppu;
        Piece upper = line(a, (far_up - a) / arm, arm, h0);
        upper.anchors = {0.0};
        Piece lower = line(far_down, (a - far_down) / arm, arm, h0);
        lower.anchors = {arm};
        for (Piece* p : {&upper, &lower}) {
            p->extent = 12.0 * n.scale;
            p->growth = 0.5;
        }
        Piece arc;
        arc.arc = true;
        arc.R = std::abs(far_up);
        arc.th0 = std::arg(far_up);
        require(arc.th0 > 0.0, "NotchedCircle: arm end must lie in the upper half plane");
        arc.len = arc.R * (2 * kPi - 2 * arc.th0);
        arc.fixed_panels = std::max(4, static_cast<int>(std::ceil(n.arc_panels * ppu / 4.0)));
        out = {upper, arc, lower};
    }
    return out;
}

inline std::vector<double> march(const Piece& p, double l, double r,
                                 const std::vector<double>& anchors) {
    auto size_at = [&](double s) {
        double d = std::numeric_limits<double>::infinity();
        for (double a : anchors) d = std::min(d, std::fabs(s - a));
        if (!(d > p.extent)) return p.h0;
        return p.h0 + p.growth * (d - p.extent);
    };
    std::vector<double> pts{l};
    double s = l;
    while (r - s > 1e-14 * (1.0 + std::fabs(r))) {
        const double step = size_at(s);
        if (r - s < 1.3 * step) {
            if (r - s > step) pts.push_back(s + 0.5 * (r - s));
            break;
        }
        s += step;
        pts.push_back(s);
    }
    pts.push_back(r);
    return pts;
}

inline Discretization discretize(const ContourSpec& c, double ppu,
                                 const std::vector<cplx>& crossings, int depth, int order) {
    Discretization d;
    d.pieces = pieces_of(c, ppu);
    d.crossing_points = crossings;

    // Locate crossings on line pieces.
    std::vector<std::vector<std::pair<double, int>>> hits(d.pieces.size());
    for (std::size_t ci = 0; ci < crossings.size(); ++ci) {
        bool found = false;
        for (std::size_t pi = 0; pi < d.pieces.size(); ++pi) {
            const Piece& p = d.pieces[pi];
            if (p.arc) continue;
            double s = std::real((crossings[ci] - p.p0) * std::conj(p.u));
            const double tol = 1e-10 * (1.0 + p.len);
            if (s < -tol || s > p.len + tol) continue;
            if (std::abs(p.point(s) - crossings[ci]) > 1e-9 * (1.0 + std::abs(crossings[ci])))
                continue;
            s = std::clamp(s, 0.0, p.len);
            if (s < tol) s = 0.0;
            if (p.len - s < tol) s = p.len;
            hits[pi].emplace_back(s, static_cast<int>(ci));
            found = true;
        }
        require(found, "declared crossing does not lie on the contour");
    }

    for (std::size_t pi = 0; pi < d.pieces.size(); ++pi) {
        const Piece& p = d.pieces[pi];
        std::vector<Panel> local;
        if (p.arc) {
            const int n = p.fixed_panels;
            for (int k = 0; k < n; ++k)
                local.push_back({static_cast<int>(pi), p.len * k / n, p.len * (k + 1) / n, -1});
        } else {
            std::vector<double> cuts{0.0, p.len};
            std::vector<double> anchors = p.anchors;
            for (auto [s, ci] : hits[pi]) {
                cuts.push_back(s);
                anchors.push_back(s);
            }
            std::sort(cuts.begin(), cuts.end());
            cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
            for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
                const auto pts = march(p, cuts[k], cuts[k + 1], anchors);
                for (std::size_t m = 0; m + 1 < pts.size(); ++m)
                    local.push_back({static_cast<int>(pi), pts[m], pts[m + 1], -1});
            }
            // Geometric refinement toward each crossing; the innermost cell is tagged.
            for (auto [s, ci] : hits[pi]) {
                std::vector<Panel> refined;
                for (const Panel& pn : local) {
                    const bool right = std::fabs(pn.s0 - s) < 1e-15 * (1.0 + p.len) && pn.tag < 0;
                    const bool left = std::fabs(pn.s1 - s) < 1e-15 * (1.0 + p.len) && pn.tag < 0;
                    if (!right && !left) {
                        refined.push_back(pn);
                        continue;
                    }
                    const double h = pn.s1 - pn.s0;
                    const double side = right ? 1.0 : -1.0;
                    const double inner = h * std::ldexp(1.0, -depth);
                    d.tags.push_back({ci, static_cast<int>(pi), side, inner});
                    const int tag = static_cast<int>(d.tags.size()) - 1;
                    std::vector<Panel> sub;
                    sub.push_back({static_cast<int>(pi), 0.0, inner, tag});
                    for (int k = depth; k >= 1; --k)
                        sub.push_back({static_cast<int>(pi), h * std::ldexp(1.0, -k),
                                       h * std::ldexp(1.0, -k + 1), -1});
                    for (Panel q : sub) {
                        if (right) {
                            q.s0 += s;
                            q.s1 += s;
                        } else {
                            const double a = s - q.s1, b = s - q.s0;
                            q.s0 = a;
                            q.s1 = b;
                        }
                        refined.push_back(q);
                    }
                }
                local = std::move(refined);
            }
        }
        d.panels.insert(d.panels.end(), local.begin(), local.end());
    }

    const GaussRule& g = gauss_legendre(order);
    for (const Panel& pn : d.panels) {
        const Piece& p = d.pieces[pn.piece];
        const double mid = 0.5 * (pn.s0 + pn.s1), half = 0.5 * (pn.s1 - pn.s0);
        for (std::size_t k = 0; k < g.x.size(); ++k) {
            const double s = mid + half * g.x[k];
            d.nodes.push_back({p.point(s), g.w[k] * half * p.tangent(s), pn.tag});
        }
    }
    return d;
}

// exp(logmag) * unit phase without overflow in intermediate products.
inline cplx scaled(cplx s, double log_scale) {
    if (s == cplx(0.0, 0.0)) return s;
    return std::polar(std::exp(std::log(std::abs(s)) + log_scale), std::arg(s));
}

template <class LogF>
std::vector<cplx> eval_log(const std::vector<Node>& nodes, LogF&& lf) {
    std::vector<cplx> out(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t i) { out[i] = lf(nodes[i].z); });
    return out;
}

inline double max_real(const std::vector<cplx>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (const cplx& x : v)
        if (std::isfinite(x.real())) m = std::max(m, x.real());
    return std::isfinite(m) ? m : 0.0;
}

inline cplx safe_exp(cplx l, double shift) {
    if (!std::isfinite(l.real())) {
        if (l.real() < 0) return 0.0;
        throw numerical_error("integrand is not finite on the contour");
    }
    return std::exp(l - shift);
}

struct SepPass {
    cplx sum;
    double log_scale;
};

template <class LogZ, class LogW>
SepPass separable_pass(LogZ&& lz, LogW&& lw, const ContourSpec& cz, const ContourSpec& cw,
                       const std::vector<cplx>& crossings, const QuadOpts& o, double ppu) {
    const Discretization dz =
        discretize(cz, ppu, crossings, o.singular_refine_depth, o.gauss_order);
    const Discretization dw =
        discretize(cw, ppu, crossings, o.singular_refine_depth, o.gauss_order);
    const auto Lz = eval_log(dz.nodes, lz);
    const auto Lw = eval_log(dw.nodes, lw);
    const double sz = max_real(Lz), sw = max_real(Lw);

    struct Active {
        cplx z, a;
        int crossing;
    };
    auto build = [](const Discretization& d, const std::vector<cplx>& L, double shift) {
        std::vector<Active> act;
        double amax = 0.0;
        std::vector<cplx> vals(d.nodes.size());
        for (std::size_t i = 0; i < d.nodes.size(); ++i) {
            vals[i] = d.nodes[i].weight * safe_exp(L[i], shift);
            amax = std::max(amax, std::abs(vals[i]));
        }
        for (std::size_t i = 0; i < d.nodes.size(); ++i) {
            const int tag = d.nodes[i].tag;
            // Negligible nodes are dropped; tagged nodes are always kept.
            if (tag < 0 && std::abs(vals[i]) < 1e-18 * amax) continue;
            act.push_back({d.nodes[i].z, vals[i], tag < 0 ? -1 : d.tags[tag].crossing});
        }
        return act;
    };
    const auto Az = build(dz, Lz, sz);
    const auto Aw = build(dw, Lw, sw);

    std::vector<cplx> rows(Az.size());
    parallel_for(Az.size(), [&](std::size_t k) {
        const Active& zk = Az[k];
        cplx acc = 0.0;
        if (zk.crossing < 0) {
            for (const Active& wl : Aw) acc += wl.a / (zk.z - wl.z);
        } else {
            for (const Active& wl : Aw)
                if (wl.crossing != zk.crossing) acc += wl.a / (zk.z - wl.z);
        }
        rows[k] = zk.a * acc;
    });
    cplx total = 0.0;
    for (const cplx& r : rows) total += r;

    // Duffy cells: every pair of innermost z and w cells at the same crossing.
    const GaussRule& g = gauss_legendre(o.gauss_order);
    auto to01 = [&](std::size_t k) { return 0.5 * (g.x[k] + 1.0); };
    for (const Tag& tz : dz.tags) {
        for (const Tag& tw : dw.tags) {
            if (tz.crossing != tw.crossing) continue;
            const cplx c = crossings[tz.crossing];
            const cplx uz = dz.pieces[tz.piece].u, uw = dw.pieces[tw.piece].u;
            const cplx dirz = tz.side * uz, dirw = tw.side * uw;
            cplx cell = 0.0;
            for (std::size_t i = 0; i < g.x.size(); ++i) {
                const double a = to01(i), wa = 0.5 * g.w[i];
                for (std::size_t j = 0; j < g.x.size(); ++j) {
                    const double v = to01(j), wv = 0.5 * g.w[j];
                    // Triangle rho <= tau (scaled): tau = hz a, rho = hw a v.
                    {
                        const cplx Z = c + dirz * (tz.h * a), W = c + dirw * (tw.h * a * v);
                        const cplx diff_over_a = dirz * tz.h - dirw * (tw.h * v);
                        cell += wa * wv * safe_exp(lz(Z), sz) * safe_exp(lw(W), sw) / diff_over_a;
                    }
                    // Triangle tau <= rho: tau = hz a v, rho = hw a.
                    {
                        const cplx Z = c + dirz * (tz.h * a * v), W = c + dirw * (tw.h * a);
                        const cplx diff_over_a = dirz * (tz.h * v) - dirw * tw.h;
                        cell += wa * wv * safe_exp(lz(Z), sz) * safe_exp(lw(W), sw) / diff_over_a;
                    }
                }
            }
            total += cell * (tz.h * tw.h) * uz * uw;
        }
    }
    return {total, sz + sw};
}

inline QuadResult finish(cplx coarse, cplx fine, const QuadOpts& o, bool estimated) {
    QuadResult r;
    r.value = fine;
    r.err = estimated ? std::abs(fine - coarse) : 0.0;
    r.converged = r.err <= std::max(o.target_rel_err * std::abs(fine), o.abs_floor);
    return r;
}

}  // namespace detail

/**
 * Integral of exp(lz(z) + lw(w)) / (z - w) over cz x cw, where lz and lw return logarithms.
 * Working in logs lets callers with huge exponents avoid overflow.
 */
template <class LogZ, class LogW>
QuadResult integrate_double_singular_log(LogZ&& lz, LogW&& lw, const ContourSpec& cz,
                                         const ContourSpec& cw, const std::vector<cplx>& crossings,
                                         const QuadOpts& o) {
    const double ppu = o.panels_per_unit;
    const auto fine = detail::separable_pass(lz, lw, cz, cw, crossings, o, 2.0 * ppu);
    const cplx vf = detail::scaled(fine.sum, fine.log_scale);
    if (!o.estimate_error) return detail::finish(vf, vf, o, false);
    const auto coarse = detail::separable_pass(lz, lw, cz, cw, crossings, o, ppu);
    return detail::finish(detail::scaled(coarse.sum, coarse.log_scale), vf, o, true);
}

// Separable integrand fz(z) * fw(w) / (z - w).
template <class FZ, class FW>
QuadResult integrate_double_singular_separable(FZ&& fz, FW&& fw, const ContourSpec& cz,
                                               const ContourSpec& cw,
                                               const std::vector<cplx>& crossings,
                                               const QuadOpts& o) {
    auto lz = [&](cplx z) { return std::log(fz(z)); };
    auto lw = [&](cplx w) { return std::log(fw(w)); };
    return integrate_double_singular_log(lz, lw, cz, cw, crossings, o);
}

// General integrand f(z, w) / (z - w); costs one evaluation of f per node pair.
template <class F>
QuadResult integrate_double_singular(F&& f, const ContourSpec& cz, const ContourSpec& cw,
                                     const std::vector<cplx>& crossings, const QuadOpts& o) {
    auto pass = [&](double ppu) {
        const auto dz = detail::discretize(cz, ppu, crossings, o.singular_refine_depth, o.gauss_order);
        const auto dw = detail::discretize(cw, ppu, crossings, o.singular_refine_depth, o.gauss_order);
        std::vector<cplx> rows(dz.nodes.size());
        parallel_for(dz.nodes.size(), [&](std::size_t k) {
            const auto& zk = dz.nodes[k];
            const int cz_id = zk.tag < 0 ? -1 : dz.tags[zk.tag].crossing;
            cplx acc = 0.0;
            for (const auto& wl : dw.nodes) {
                const int cw_id = wl.tag < 0 ? -1 : dw.tags[wl.tag].crossing;
                if (cz_id >= 0 && cz_id == cw_id) continue;
                acc += wl.weight * f(zk.z, wl.z) / (zk.z - wl.z);
            }
            rows[k] = zk.weight * acc;
        });
        cplx total = 0.0;
        for (const cplx& r : rows) total += r;
        const GaussRule& g = gauss_legendre(o.gauss_order);
        for (const auto& tz : dz.tags) {
            for (const auto& tw : dw.tags) {
                if (tz.crossing != tw.crossing) continue;
                const cplx c = crossings[tz.crossing];
                const cplx uz = dz.pieces[tz.piece].u, uw = dw.pieces[tw.piece].u;
                const cplx dirz = tz.side * uz, dirw = tw.side * uw;
                cplx cell = 0.0;
                for (std::size_t i = 0; i < g.x.size(); ++i) {
                    const double a = 0.5 * (g.x[i] + 1.0), wa = 0.5 * g.w[i];
                    for (std::size_t j = 0; j < g.x.size(); ++j) {
                        const double v = 0.5 * (g.x[j] + 1.0), wv = 0.5 * g.w[j];
                        cell += wa * wv * f(c + dirz * (tz.h * a), c + dirw * (tw.h * a * v)) /
                                (dirz * tz.h - dirw * (tw.h * v));
                        cell += wa * wv * f(c + dirz * (tz.h * a * v), c + dirw * (tw.h * a)) /
                                (dirz * (tz.h * v) - dirw * tw.h);
                    }
                }
                total += cell * (tz.h * tw.h) * uz * uw;
            }
        }
        return total;
    };
    const cplx fine = pass(2.0 * o.panels_per_unit);
    if (!o.estimate_error) return detail::finish(fine, fine, o, false);
    return detail::finish(pass(o.panels_per_unit), fine, o, true);
}

/** Integral of exp(lf(z)) along c. */
template <class LogF>
QuadResult integrate_path_log(LogF&& lf, const ContourSpec& c, const QuadOpts& o) {
    if (const auto* circ = std::get_if<Circle>(&c.kind)) {
        require(circ->radius > 0.0, "Circle: radius must be positive");
        auto trap = [&](int n) {
            cplx s = 0.0;
            for (int k = 0; k < n; ++k) {
                const cplx z = std::polar(circ->radius, 2 * kPi * k / n - kPi);
                s += detail::safe_exp(lf(z), 0.0) * z;
            }
            return s * kI * (2 * kPi / n);
        };
        int n = c.panels > 0 ? c.panels : 128;
        cplx prev = trap(n);
        for (;;) {
            const cplx next = trap(2 * n);
            auto r = detail::finish(prev, next, o, true);
            if (r.converged || n >= (1 << 16) || !o.estimate_error) return r;
            prev = next;
            n *= 2;
        }
    }
    auto pass = [&](double ppu) {
        const auto d = detail::discretize(c, ppu, {}, 0, o.gauss_order);
        const auto L = detail::eval_log(d.nodes, lf);
        const double shift = detail::max_real(L);
        cplx s = 0.0;
        for (std::size_t i = 0; i < d.nodes.size(); ++i)
            s += d.nodes[i].weight * detail::safe_exp(L[i], shift);
        return detail::scaled(s, shift);
    };
    const cplx fine = pass(2.0 * o.panels_per_unit);
    if (!o.estimate_error) return detail::finish(fine, fine, o, false);
    return detail::finish(pass(o.panels_per_unit), fine, o, true);
}

template <class F>
QuadResult integrate_path(F&& f, const ContourSpec& c, const QuadOpts& o) {
    return integrate_path_log([&](cplx z) { return std::log(cplx(f(z))); }, c, o);
}

}  // namespace aw
