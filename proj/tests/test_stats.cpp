#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "aw/kernels.hpp"
#include "aw/lpp.hpp"
#include "aw/stats.hpp"

using namespace aw;

namespace {

PointConfig single_time(std::vector<double> pts) {
    PointConfig pc;
    pc.times = {0.0};
    pc.points = {std::move(pts)};
    return pc;
}

// Poisson(mu) points uniform on [0, 1), plus a sentinel below every box.
std::vector<PointConfig> poisson_configs(double mu, std::size_t n) {
    std::mt19937_64 rng(42);
    std::poisson_distribution<int> count(mu);
    std::uniform_real_distribution<double> pos(0.0, 1.0);
    std::vector<PointConfig> out;
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<double> pts(static_cast<std::size_t>(count(rng)));
        for (double& x : pts) x = pos(rng);
        std::sort(pts.rbegin(), pts.rend());
        pts.push_back(-10.0);
        out.push_back(single_time(std::move(pts)));
    }
    return out;
}

}  // namespace

TEST(FactorialMoment, FirstOrderIsMeanCount) {
    const std::vector<PointConfig> s{single_time({3.5, 2.2, 1.0, -5}), single_time({2.9, 0.1, -5}),
                                     single_time({1.5, -5})};
    const MomentReport r = factorial_moment_mc(s, {Box{0, 0.0, 3.0}}, {1});
    EXPECT_DOUBLE_EQ(r.estimate, (2 + 2 + 1) / 3.0);
}

TEST(FactorialMoment, BoxBelowPointsIsZero) {
    const std::vector<PointConfig> s{single_time({3.5, 2.2, -5}), single_time({1.0, -6})};
    EXPECT_EQ(factorial_moment_mc(s, {Box{0, -4.0, -3.0}}, {2}).estimate, 0.0);
    EXPECT_THROW(factorial_moment_mc(s, {Box{0, -7.0, -3.0}}, {1}), config_error);
}

TEST(FactorialMoment, PoissonMoments) {
    const auto s = poisson_configs(2.0, 100000);
    for (int n = 1; n <= 3; ++n) {
        const MomentReport r = factorial_moment_mc(s, {Box{0, 0.0, 1.0}}, {n});
        EXPECT_NEAR(r.estimate, std::pow(2.0, n), 4 * r.std_error) << n;
    }
}

TEST(FactorialMoment, InvariantUnderSampleOrder) {
    auto s = poisson_configs(1.5, 1000);
    const double a = factorial_moment_mc(s, {Box{0, 0.2, 0.7}}, {1}).estimate;
    std::reverse(s.begin(), s.end());
    EXPECT_NEAR(factorial_moment_mc(s, {Box{0, 0.2, 0.7}}, {1}).estimate, a, 1e-15);
}

TEST(DetMomentIntegral, FirstOrderIsDensityIntegral) {
    const MultiTimeKernel k = [](std::size_t, double x, std::size_t, double y) {
        return cplx(airy_kernel(x, y));
    };
    const double v = det_moment_integral(k, {Box{0, -1.0, 1.0}}, {1}, Continuous{}, 24);
    const double ref = det_moment_integral(k, {Box{0, -1.0, 0.0}}, {1}, Continuous{}, 24) +
                       det_moment_integral(k, {Box{0, 0.0, 1.0}}, {1}, Continuous{}, 24);
    EXPECT_NEAR(v, ref, 1e-12);
}

TEST(DetMomentIntegral, SymmetricInBoxes) {
    const MultiTimeKernel k = [](std::size_t, double x, std::size_t, double y) {
        return cplx(airy_kernel(x, y));
    };
    const Box a{0, -2.0, -1.0}, b{0, 0.0, 0.5};
    EXPECT_NEAR(det_moment_integral(k, {a, b}, {1, 1}, Continuous{}),
                det_moment_integral(k, {b, a}, {1, 1}, Continuous{}), 1e-14);
}

TEST(DetMomentIntegral, OneCellSchur) {
    const MultiTimeKernel k = [](std::size_t, double x, std::size_t, double y) {
        return schur_circle_kernel({0.5}, {0.5}, 1, 1, std::lround(x), std::lround(y)).value;
    };
    EXPECT_NEAR(det_moment_integral(k, {Box{0, -1.0, 0.0}}, {1}, Discrete{1.0, 0.0}), 0.75, 1e-9);
}

TEST(PointConfig, StrictlyDecreasingPerTime) {
    const ScalingPlan plan = build_scaling_plan(ParamSet{}, 0.25, {0.0, 0.5}, 200);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const PointConfig pc = point_config(sample_schur_process(plan.x_seq, plan.y_seq, seed), plan, seed);
        ASSERT_EQ(pc.points.size(), 2u);
        for (const auto& pts : pc.points)
            for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_LT(pts[i], pts[i - 1]);
    }
}

TEST(ChiSquare, SingleOutcomeGivesOne) {
    const ChiSquareResult r = chi_square_gof(std::map<int, long>{{0, 500}}, std::map<int, double>{{0, 1.0}});
    EXPECT_EQ(r.p_value, 1.0);
}

TEST(ChiSquare, CalibratedAndPowerful) {
    std::mt19937_64 rng(7);
    std::geometric_distribution<int> geo(0.5), shifted(0.45);
    std::map<int, double> expected;
    for (int k = 0; k < 40; ++k) expected[k] = 0.5 * std::pow(0.5, k);
    std::map<int, long> same, off;
    for (int i = 0; i < 100000; ++i) {
        ++same[geo(rng)];
        ++off[shifted(rng)];
    }
    EXPECT_GT(chi_square_gof(same, expected).p_value, 1e-3);
    EXPECT_LT(chi_square_gof(off, expected).p_value, 1e-6);
}

TEST(TailFit, ExponentialSlopeIsMinusOne) {
    std::mt19937_64 rng(3);
    std::exponential_distribution<double> e(1.0);
    std::vector<double> x(100000);
    for (double& v : x) v = e(rng);
    std::vector<double> grid;
    for (double a = 0.5; a <= 6.0; a += 0.25) grid.push_back(a);
    const TailFit f = tail_exponent_fit(x, grid);
    EXPECT_LE(f.ci_low, -1.0);
    EXPECT_GE(f.ci_high, -1.0);
    EXPECT_NEAR(f.slope, -1.0, 0.05);
}

TEST(TailFit, GaussianSlopeNegative) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> x(50000);
    for (double& v : x) v = g(rng);
    const TailFit f = tail_exponent_fit(x, {0.0, 0.5, 1.0, 1.5, 2.0, 2.5});
    EXPECT_TRUE(f.negative());
    EXPECT_THROW(tail_exponent_fit(std::vector<double>(100, 0.0), {0.0, 1.0}), config_error);
}
