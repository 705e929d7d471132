#include <gtest/gtest.h>

#include <boost/math/special_functions/airy.hpp>
#include <array>
#include <cmath>

#include "aw/kernels.hpp"

using namespace aw;

namespace {

const double kAiryDiag0 = 0.0669874837796640;  // Ai'(0)^2

ParamSet a_minus(double v) {
    ParamSet p;
    p.a_minus.prefix = {v};
    return p;
}

}  // namespace

TEST(Phi, Examples) {
    const PhiEvaluator zero = make_phi(ParamSet{});
    EXPECT_EQ(phi_eval(cplx(0.3, 2.0), zero), cplx(1.0));

    ParamSet c;
    c.c_plus = 1.0;
    EXPECT_NEAR(std::abs(phi_eval(1.0, make_phi(c)) - std::exp(1.0)), 0.0, 1e-14);

    ParamSet a;
    a.a_plus.prefix = {0.5};
    EXPECT_NEAR(std::abs(phi_eval(1.0, make_phi(a)) - 2.0), 0.0, 1e-14);
}

TEST(Phi, TruncationChangeWithinTailBound) {
    ParamSet p;
    for (int i = 1; i <= 16; ++i) {
        p.a_plus.prefix.push_back(0.3 / (i * i));
        p.b_minus.prefix.push_back(0.2 / (i * i));
    }
    for (std::size_t n : {2u, 4u, 8u}) {
        const PhiEvaluator coarse = make_phi(p, n), fine = make_phi(p, 2 * n);
        for (cplx z : {cplx(0.5, 0.5), cplx(-1.0, 0.2), cplx(0.1, -1.5)}) {
            const double change = std::abs(log_phi(z, coarse) - log_phi(z, fine));
            EXPECT_LE(change, coarse.log_error_bound(z)) << n;
        }
    }
}

TEST(LimitKernel, ZeroParamsReduceToAiry) {
    const KernelValue k = limit_kernel(ParamSet{}, 0, 0, 0, 0);
    EXPECT_NEAR(k.value.real(), kAiryDiag0, 1e-8);
    EXPECT_NEAR(k.value.imag(), 0.0, 1e-8);
    EXPECT_EQ(std::abs(k.k1), 0.0);
    for (double x : {-2.0, 0.5})
        for (double y : {-1.0, 1.5}) EXPECT_NEAR(limit_kernel(ParamSet{}, 0, x, 0, y).value.real(), airy_kernel(x, y), 1e-8);
}

TEST(LimitKernel, HeatTermExample) {
    const KernelValue k = limit_kernel(ParamSet{}, 0, 0, 1, 0);
    EXPECT_NEAR(k.k2.real(), -0.306609971527876, 1e-12);
    EXPECT_NEAR(k.k2.real(), -std::exp(1.0 / 12) / std::sqrt(4 * kPi), 1e-14);
    EXPECT_EQ(limit_kernel(ParamSet{}, 1, 0, 0, 0).k2, cplx(0.0));
}

TEST(LimitKernel, FiniteParametersMatchBorodinPecheFormula) {
    ParamSet p;
    p.a_plus.prefix = {0.5};
    p.b_plus.prefix = {0.5};
    for (const auto& q : std::vector<std::array<double, 4>>{{0, 0, 0, 0}, {0, 1, 0.5, -1}, {0.4, -0.5, 0, 0.3}}) {
        const cplx a = limit_kernel(p, q[0], q[1], q[2], q[3]).value;
        const cplx b = bp_finite({2.0}, {-2.0}, q[0], q[1], q[2], q[3]).value;
        EXPECT_LT(std::abs(a - b), 1e-8);
    }
}

TEST(LimitKernel, ContourIndependenceWithCrossing) {
    const ParamSet p = a_minus(0.5);
    for (double x1 : {-1.0, 0.5})
        for (double x2 : {-0.5, 1.0}) {
            const cplx a = limit_kernel(p, 0, x1, 0.5, x2, {}, ContourChoice{-1.0, 1.0}).value;
            const cplx b = limit_kernel(p, 0, x1, 0.5, x2, {}, ContourChoice{-0.4, 0.6}).value;
            const cplx c = limit_kernel(p, 0, x1, 0.5, x2, {}, ContourChoice{-0.2, 1.4}).value;
            EXPECT_LT(relative_gap(a, b), 1e-6);
            EXPECT_LT(relative_gap(a, c), 1e-6);
        }
}

TEST(LimitKernel, CrossingTermVanishesForDisjointContours) {
    ParamSet p;
    p.a_plus.prefix = {0.4};
    p.b_plus.prefix = {0.3};
    EXPECT_EQ(std::abs(limit_kernel(p, 0, 0.2, 0.3, -0.1).k1), 0.0);
    EXPECT_EQ(std::abs(limit_kernel(p, 0, 0.2, 0.3, -0.1, {}, ContourChoice{0.5, 0.5}).k1), 0.0);
    EXPECT_GT(std::abs(limit_kernel(p, 0, 0.2, 0.3, -0.1, {}, ContourChoice{-0.5, 0.5}).k1), 1e-3);
}

TEST(LimitKernel, RejectsIllegalContours) {
    ParamSet p;
    p.a_plus.prefix = {0.5};
    EXPECT_THROW(limit_kernel(p, 0, 0, 0, 0, {}, ContourChoice{2.5, -1.0}), config_error);
}

TEST(LimitKernel, ContinuousInSpace) {
    const ParamSet p = a_minus(0.5);
    const double h = 1e-4;
    for (double x : {-1.0, 0.0, 1.0}) {
        const cplx lo = limit_kernel(p, 0, x - h, 0.5, 0.2).value;
        const cplx mid = limit_kernel(p, 0, x, 0.5, 0.2).value;
        const cplx hi = limit_kernel(p, 0, x + h, 0.5, 0.2).value;
        // Bounded increments and no jump beyond quadrature error in the second difference.
        EXPECT_LT(std::abs(hi - mid), h);
        EXPECT_LT(std::abs((hi - mid) - (mid - lo)), 1e-8);
        const cplx up = limit_kernel(p, 0, x, 0.5, 0.2 + h).value;
        EXPECT_LT(std::abs(up - mid), h);
    }
}

TEST(LimitKernel, GaugeInvariantDeterminant) {
    ParamSet p;
    p.a_plus.prefix = {0.5};
    const double xs[2] = {-0.7, 0.4};
    auto gauge = [](double x) { return std::exp(0.3 * x + 0.1 * x * x); };
    cplx k[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) k[i][j] = limit_kernel(p, 0, xs[i], 0, xs[j]).value;
    const cplx det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
    const cplx det_g = k[0][0] * k[1][1] - (gauge(xs[0]) / gauge(xs[1]) * k[0][1]) * (gauge(xs[1]) / gauge(xs[0]) * k[1][0]);
    EXPECT_LE(std::abs(det - det_g), 1e-12 * std::abs(det));
}

TEST(ReferenceKernels, AiryDiagonalAndContinuity) {
    EXPECT_NEAR(airy_kernel(0, 0), kAiryDiag0, 1e-14);
    const double x = 0.8;
    const double diag = std::pow(boost::math::airy_ai_prime(x), 2) - x * std::pow(boost::math::airy_ai(x), 2);
    EXPECT_NEAR(airy_kernel(x, x), diag, 1e-14);
    for (double d : {1e-7, 1e-9, 1e-12}) EXPECT_NEAR(airy_kernel(0, d), kAiryDiag0, 1e-6);
    EXPECT_NEAR(airy_kernel(0.0, 0.011), airy_kernel(0.0, 0.0099), 1e-4);
}

TEST(ReferenceKernels, EmptyBorodinPecheIsExtendedAiry) {
    EXPECT_NEAR(extended_airy(0, 0.3, 0, -0.2).value.real(), airy_kernel(0.3, -0.2), 1e-8);
    const cplx a = bp_finite({}, {}, 0, 0.3, 0.6, -0.2).value;
    const cplx b = limit_kernel(ParamSet{}, 0, 0.3, 0.6, -0.2).value;
    EXPECT_LT(std::abs(a - b), 1e-8);
}

TEST(SchurCircleKernel, OneCellGeometric) {
    const QuadResult d1 = schur_circle_kernel({0.5}, {0.5}, 1, 1, -1, -1);
    const QuadResult d0 = schur_circle_kernel({0.5}, {0.5}, 1, 1, 0, 0);
    EXPECT_NEAR(d1.value.real(), 0.75, 1e-9);
    EXPECT_NEAR(d0.value.real(), 0.1875, 1e-9);
    EXPECT_TRUE(d1.converged);
}

TEST(SchurCircleKernel, GaugeInvariantDeterminant) {
    const std::vector<double> X{0.5, 0.4}, Y{0.45, 0.3};
    const long pts[2] = {-1, 1};
    cplx k[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) k[i][j] = schur_circle_kernel(X, Y, 2, 2, pts[i], pts[j]).value;
    auto f = [](long x) { return std::pow(1.7, static_cast<double>(x)); };
    const cplx det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
    const cplx det_g = k[0][0] * k[1][1] - (f(pts[0]) / f(pts[1]) * k[0][1]) * (f(pts[1]) / f(pts[0]) * k[1][0]);
    EXPECT_LE(std::abs(det - det_g), 1e-12 * std::abs(det));
}

TEST(SchurCircleKernel, BlockMatchesPointwise) {
    const std::vector<double> X{0.5, 0.4, 0.3}, Y{0.45, 0.35};
    const KernelBlock b = schur_circle_kernel_block(X, Y, 3, 2, {-2, 0, 3}, {-1, 2});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) {
            const long xs[3] = {-2, 0, 3}, ys[2] = {-1, 2};
            EXPECT_LT(std::abs(b.value(i, j) - schur_circle_kernel(X, Y, 3, 2, xs[i], ys[j]).value), 1e-13);
        }
}

TEST(PrelimitKernel, EqualTimesHaveNoHeatPart) {
    const ScalingPlan plan = build_scaling_plan(ParamSet{}, 0.25, {0.0, 0.5}, 27);
    EXPECT_EQ(prelimit_kernel(plan, 0, 17, 0, 18).k2, cplx(0.0));
    EXPECT_EQ(prelimit_kernel(plan, 0, 17, 1, 18).k2, cplx(0.0));
    EXPECT_NE(prelimit_kernel(plan, 1, 20, 0, 17).k2, cplx(0.0));
}

TEST(PrelimitKernel, MatchesCircleKernelOnLattice) {
    for (long N : {27L, 64L}) {
        const ScalingPlan plan = build_scaling_plan(ParamSet{}, 0.25, {0.0, 0.5}, N);
        for (std::size_t u = 0; u < 2; ++u)
            for (std::size_t v = 0; v < 2; ++v)
                for (long x : {static_cast<long>(0.6 * N), static_cast<long>(0.7 * N)}) {
                    const long y = static_cast<long>(0.65 * N);
                    const cplx kn = prelimit_kernel(plan, u, x, v, y).value;
                    const cplx kc = schur_circle_kernel(plan.x_seq, plan.y_seq, plan.M[u], plan.M[v], x, y).value *
                                    std::pow(0.75, static_cast<double>(plan.M[u] - plan.M[v]));
                    EXPECT_LT(std::abs(kn - kc), 1e-9) << N << ' ' << u << ' ' << v << ' ' << x;
                }
    }
}

TEST(MatchingTransform, ZeroAndMinusParams) {
    EXPECT_LT(matching_transform_check(ParamSet{}, 0.25, 0.0, 0.0, 0.3, -0.4), 1e-8);
    EXPECT_LT(matching_transform_check(ParamSet{}, 0.25, 0.5, 0.0, 0.3, -0.4), 1e-8);
    EXPECT_LT(matching_transform_check(a_minus(0.5), 0.25, 0.5, 0.0, 0.3, -0.4), 1e-6);
}

TEST(MinusElimination, KernelIdentity) {
    const ParamSet p = a_minus(2.0);
    const MinusElimination me = eliminate_minus_params(p);
    for (const auto& q : std::vector<std::array<double, 4>>{{0, -1, 0, 0}, {0, 0.5, 0.5, 0}, {0.5, 1, 0, -0.5}}) {
        const cplx lhs = limit_kernel(me.params, q[0] - me.delta, q[1], q[2] - me.delta, q[3]).value;
        const cplx rhs = limit_kernel(p, q[0], q[1], q[2], q[3]).value;
        EXPECT_LT(relative_gap(lhs, rhs), 1e-6);
    }
}

TEST(LimitKernelBlock, MatchesPointwise) {
    ParamSet p;
    p.b_plus.prefix = {1.0};
    const std::vector<double> xs{0.1, 1.3}, ys{0.4, 2.0};
    const KernelBlock b = limit_kernel_block(p, 0.0, xs, ys);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_LT(std::abs(b.value(i, j) - limit_kernel(p, 0, xs[i], 0, ys[j]).value), 1e-9);
}
