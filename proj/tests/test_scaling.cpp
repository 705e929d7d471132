#include <gtest/gtest.h>

#include <cmath>

#include "aw/lpp.hpp"
#include "aw/scaling.hpp"

using namespace aw;

namespace {

ParamSet with_b_plus(std::vector<double> b) {
    ParamSet p;
    p.b_plus.prefix = std::move(b);
    return p;
}

}  // namespace

TEST(ValidateParams, CaseTable) {
    ParamSet z = validate_params(ParamSet{});
    EXPECT_EQ(z.J_a_plus + z.J_a_minus + z.J_b_plus + z.J_b_minus, 0u);
    EXPECT_TRUE(std::isinf(z.a_bar) && z.a_bar > 0);
    EXPECT_TRUE(std::isinf(z.b_bar) && z.b_bar < 0);

    ParamSet a;
    a.a_plus.prefix = {0.5};
    a = validate_params(a);
    EXPECT_DOUBLE_EQ(a.a_bar, 2.0);
    EXPECT_TRUE(std::isinf(a.b_bar));
    EXPECT_EQ(a.J_a_plus, 1u);

    ParamSet c;
    c.c_minus = 1.0;
    c = validate_params(c);
    EXPECT_EQ(c.a_bar, 0.0);
    EXPECT_EQ(c.b_bar, 0.0);
}

TEST(ValidateParams, RejectsBadSequences) {
    EXPECT_THROW(validate_params(with_b_plus({-1.0})), config_error);
    EXPECT_THROW(validate_params(with_b_plus({0.5, 1.0})), config_error);
    ParamSet p = with_b_plus({1.0});
    p.b_plus.tail_sum_bound = std::numeric_limits<double>::infinity();
    EXPECT_THROW(validate_params(p), config_error);
    p.b_plus.tail_sum_bound = 0.5;
    EXPECT_EQ(validate_params(p).J_b_plus, kInfiniteCount);
}

TEST(SigmaAndF, ValuesAndIdentity) {
    EXPECT_NEAR(sigma_q(0.25), 0.904805872198302, 1e-14);
    EXPECT_NEAR(f_q(0.25), 0.271441761659491, 1e-14);
    for (int k = 1; k <= 9; ++k) {
        const double q = 0.1 * k, s = sigma_q(q);
        EXPECT_NEAR(q / (2 * (1 - q) * (1 - q)) / (s * s), f_q(q), 1e-14) << q;
    }
}

TEST(BuildScalingPlan, ZeroParams) {
    const ScalingPlan s = build_scaling_plan(ParamSet{}, 0.25, {0.0}, 1000);
    EXPECT_EQ(s.A + s.B + s.C_plus + s.C_minus + s.D, 0);
    EXPECT_EQ(s.N_tilde, 1000);
    ASSERT_EQ(s.x_seq.size(), 1000u);
    for (double v : s.x_seq) EXPECT_EQ(v, 0.25);
    for (double v : s.y_seq) EXPECT_EQ(v, 0.25);
}

TEST(BuildScalingPlan, OnePlusParameter) {
    const ScalingPlan s = build_scaling_plan(with_b_plus({1.0}), 0.25, {0.0}, 1000);
    EXPECT_EQ(s.B, 1);
    EXPECT_NEAR(s.x_seq[0], 1 - 1 / (10 * sigma_q(0.25)), 1e-12);
    EXPECT_NEAR(s.x_seq[0], 0.889479, 1e-6);
    EXPECT_EQ(s.x_seq[1], 0.25);
}

TEST(BuildScalingPlan, TimesAndProducts) {
    const ScalingPlan s = build_scaling_plan(ParamSet{}, 0.25, {-0.5, 1.0}, 1000);
    EXPECT_EQ(s.M[0], 950);
    EXPECT_EQ(s.M[1], 1100);

    ParamSet p;
    p.a_plus.prefix = {0.8, 0.4};
    p.b_plus.prefix = {1.0};
    p.a_minus.prefix = {0.6};
    p.c_plus = 0.5;
    p.c_minus = 0.7;
    const ScalingPlan w = build_scaling_plan(p, 0.3, {0.0, 0.5}, 5000);
    EXPECT_EQ(w.N_tilde, w.N - w.A - w.C_plus - w.C_minus - w.D);
    for (double x : w.x_seq)
        for (double y : w.y_seq) {
            EXPECT_GE(x, 0.3);
            EXPECT_GE(y, 0.3);
            EXPECT_TRUE(x * y < 1.0 || (x == 1.0) != (y == 1.0));
        }
}

TEST(BuildScalingPlan, InfeasibleSizeIsDiagnosed) {
    try {
        build_scaling_plan(with_b_plus({1.0, 1.0}), 0.25, {0.0, 0.001}, 8);
        FAIL() << "expected a feasibility diagnostic";
    } catch (const config_error& e) {
        EXPECT_NE(std::string(e.what()).find("infeasible"), std::string::npos);
    }
}

TEST(RescalePoints, Examples) {
    const ScalingPlan s = build_scaling_plan(ParamSet{}, 0.25, {0.0, 1.0}, 1000);
    const double empty = rescale_points(Partition{}, s, 1, 1)[0];
    EXPECT_NEAR(empty, (-2 * 0.25 * 1000 / 0.75 - 0.25 * 100 / 0.75 - 1) / (sigma_q(0.25) * 10), 1e-12);
    EXPECT_NEAR(rescale_points(Partition{667}, s, 0, 1)[0], -0.0736806299728077, 1e-12);
}

TEST(RescalePoints, StrictlyDecreasingOnSamples) {
    const ScalingPlan s = build_scaling_plan(ParamSet{}, 0.25, {0.0}, 200);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const PartitionSequence seq = sample_schur_process(s.x_seq, s.y_seq, seed);
        const auto x = rescale_points(seq, s, 0, seq.seq[s.M[0] - 1].length() + 5);
        for (std::size_t i = 1; i < x.size(); ++i) EXPECT_LT(x[i], x[i - 1]);
    }
}

TEST(EliminateMinusParams, Identity) {
    ParamSet p;
    p.a_plus.prefix = {0.7};
    p.b_plus.prefix = {0.4, 0.2};
    const MinusElimination e = eliminate_minus_params(p);
    EXPECT_EQ(e.delta, 0.0);
    EXPECT_EQ(e.params.a_plus.prefix, p.a_plus.prefix);
    EXPECT_EQ(e.params.b_plus.prefix, p.b_plus.prefix);
}

TEST(EliminateMinusParams, SingleAMinus) {
    ParamSet p;
    p.a_minus.prefix = {2.0};
    const MinusElimination e = eliminate_minus_params(p);
    EXPECT_EQ(e.delta, 1.0);
    EXPECT_EQ(e.params.a_plus.prefix, std::vector<double>{1.0});
    EXPECT_EQ(e.params.b_plus.prefix, std::vector<double>{1.0});
    EXPECT_EQ(e.params.J_a_minus + e.params.J_b_minus, 0u);
}

TEST(EliminateMinusParams, Rejections) {
    ParamSet c;
    c.c_minus = 0.5;
    EXPECT_THROW(eliminate_minus_params(c), config_error);
    ParamSet inf;
    inf.b_minus.prefix = {1.0};
    inf.b_minus.tail_sum_bound = 0.1;
    EXPECT_THROW(eliminate_minus_params(inf), config_error);
}
