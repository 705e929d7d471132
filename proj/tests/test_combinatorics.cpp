#include <gtest/gtest.h>

#include <cmath>

#include "aw/combinatorics.hpp"

using namespace aw;

TEST(Partition, TrimsTrailingZerosAndRejectsBadInput) {
    const Partition p{3, 1, 0, 0};
    EXPECT_EQ(p, (Partition{3, 1}));
    EXPECT_EQ(p.length(), 2u);
    EXPECT_EQ(p.weight(), 4);
    EXPECT_EQ(p[5], 0);
    EXPECT_THROW(Partition({1, 2}), config_error);
    EXPECT_THROW(Partition({-1}), config_error);
}

TEST(Interlaces, Examples) {
    EXPECT_TRUE(interlaces({2, 1}, {1}));
    EXPECT_FALSE(interlaces({1, 1}, {}));
    EXPECT_TRUE(interlaces({3, 1}, {2, 1}));
    EXPECT_TRUE(interlaces({}, {}));
    EXPECT_FALSE(interlaces({1}, {2}));
}

TEST(SkewSchurSingle, Examples) {
    EXPECT_DOUBLE_EQ(skew_schur_single({2, 1}, {1}, 0.5), 0.25);
    EXPECT_EQ(skew_schur_single({1, 1}, {}, 0.7), 0.0);
    EXPECT_EQ(skew_schur_single({4, 2}, {4, 2}, 0.3), 1.0);
    EXPECT_THROW(skew_schur_single({1}, {}, -0.1), config_error);
}

TEST(SchurEval, Examples) {
    EXPECT_DOUBLE_EQ(schur_eval({1}, {0.3, 0.9}), 1.2);
    EXPECT_DOUBLE_EQ(schur_eval({2, 1}, {2.0, 3.0}), 30.0);
    EXPECT_DOUBLE_EQ(schur_eval({5}, {0.7}), std::pow(0.7, 5));
    EXPECT_EQ(schur_eval({1, 1}, {0.7}), 0.0);
}

TEST(SchurEval, BranchingConsistency) {
    const double x1 = 0.37, x2 = 1.3;
    for (const Partition& lam : partitions_up_to(6, 6)) {
        const double lhs = schur_eval(lam, {x1, x2});
        double rhs = 0.0;
        for (const Partition& mu : partitions_up_to(lam.weight(), 6))
            rhs += skew_schur_single(lam, mu, x2) * schur_eval(mu, {x1});
        EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::fabs(lhs))) << lam.str();
        EXPECT_GE(lhs, 0.0);
    }
}

TEST(CauchyPartialSum, Examples) {
    EXPECT_DOUBLE_EQ(cauchy_partial_sum({0.5}, {0.5}, 3), 1.328125);
    EXPECT_DOUBLE_EQ(cauchy_partial_sum({0.5, 0.2}, {0.3, 0.1}, 0), 1.0);
    EXPECT_NEAR(cauchy_partial_sum({0.4}, {0.5}, 60), 1.25, 1e-14);
    EXPECT_THROW(cauchy_partial_sum({2.0}, {0.5}, 3), config_error);
}

TEST(CauchyPartialSum, MonotoneConvergenceToProduct) {
    const std::vector<double> X{0.6, 0.4}, Y{0.7, 0.5};
    const double limit = 1.0 / ((1 - 0.42) * (1 - 0.3) * (1 - 0.28) * (1 - 0.2));
    double prev = 0.0;
    for (long cap = 0; cap <= 40; ++cap) {
        const double s = cauchy_partial_sum(X, Y, cap);
        EXPECT_GE(s, prev);
        EXPECT_LE(s, limit * (1 + 1e-14));
        prev = s;
    }
    EXPECT_NEAR(prev, limit, 1e-10);
}

TEST(SchurProcessPmf, Examples) {
    for (int k = 0; k < 6; ++k) {
        const PartitionSequence s{{Partition{k}}, 1, 1};
        EXPECT_NEAR(schur_process_pmf(s, {0.5}, {0.5}), 0.75 * std::pow(0.25, k), 1e-16);
    }
    const PartitionSequence two{{Partition{1}, Partition{1}}, 2, 1};
    EXPECT_NEAR(schur_process_pmf(two, {0.5, 0.4}, {0.5}), 0.15, 1e-15);
    const PartitionSequence bad{{Partition{1, 1}, Partition{}}, 2, 1};
    EXPECT_EQ(schur_process_pmf(bad, {0.5, 0.4}, {0.5}), 0.0);
}

TEST(EnumerateDistribution, Examples) {
    const Enumeration e = enumerate_distribution({0.5}, {0.5}, 10);
    EXPECT_EQ(e.atoms.size(), 11u);
    EXPECT_NEAR(e.captured_mass, 1 - std::pow(0.25, 11), 1e-15);

    const Enumeration z = enumerate_distribution({0.05, 0.02}, {0.04, 0.01}, 0);
    ASSERT_EQ(z.atoms.size(), 1u);
    EXPECT_NEAR(z.captured_mass, (1 - 0.002) * (1 - 0.0005) * (1 - 0.0008) * (1 - 0.0002), 1e-15);
    EXPECT_THROW(enumerate_distribution({0.9}, {0.9}, 1), config_error);
}

TEST(EnumerateDistribution, MassesMatchPmfAndSumToOne) {
    const std::vector<double> X{0.5, 0.3}, Y{0.4, 0.35};
    const Enumeration e = enumerate_distribution(X, Y, 14);
    double total = 0.0;
    for (const auto& [seq, mass] : e.atoms) {
        EXPECT_GT(mass, 0.0);
        EXPECT_NEAR(mass, schur_process_pmf(seq, X, Y), 1e-16);
        ASSERT_EQ(seq.seq.size(), 3u);
        EXPECT_TRUE(interlaces(seq.seq[1], seq.seq[0]));
        EXPECT_TRUE(interlaces(seq.seq[1], seq.seq[2]));
        total += mass;
    }
    EXPECT_NEAR(total, e.captured_mass, 1e-13);
    EXPECT_GT(e.captured_mass, 1 - 1e-5);
}
