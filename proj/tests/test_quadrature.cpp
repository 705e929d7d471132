#include <gtest/gtest.h>

#include <boost/math/special_functions/airy.hpp>
#include <cmath>

#include "aw/quadrature.hpp"

using namespace aw;

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
    const GaussRule& g = gauss_legendre(16);
    double s0 = 0.0, s30 = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        s0 += g.w[i];
        s30 += g.w[i] * std::pow(g.x[i], 30);
    }
    EXPECT_NEAR(s0, 2.0, 1e-14);
    EXPECT_NEAR(s30, 2.0 / 31.0, 1e-14);
}

TEST(IntegratePath, ResidueOnCircle) {
    const QuadResult r = integrate_path([](cplx z) { return 1.0 / z; }, ContourSpec{Circle{1.0}}, QuadOpts{});
    EXPECT_NEAR(std::abs(r.value / (2 * kPi * kI) - 1.0), 0.0, 1e-12);
    EXPECT_TRUE(r.converged);
}

TEST(IntegratePath, AiryOnRayPair) {
    const QuadResult r = integrate_path([](cplx z) { return std::exp(z * z * z / 3.0); },
                                        ContourSpec{RayPair{-1.0, Side::plus, 8.0}}, QuadOpts{});
    const cplx v = r.value / (2 * kPi * kI);
    EXPECT_NEAR(v.real(), boost::math::airy_ai(0.0), 1e-9);
    EXPECT_NEAR(v.imag(), 0.0, 1e-9);
}

TEST(IntegratePath, ErrorFunctionOnSegment) {
    const QuadResult r = integrate_path([](cplx w) { return std::exp(w * w); },
                                        ContourSpec{VerticalSegment{cplx(0, -1), cplx(0, 1)}}, QuadOpts{});
    const cplx v = r.value / (2 * kPi * kI);
    EXPECT_NEAR(v.real(), std::erf(1.0) / (2 * std::sqrt(kPi)), 1e-10);
    EXPECT_NEAR(v.imag(), 0.0, 1e-10);
}

TEST(IntegratePath, ZeroIntegrand) {
    const QuadResult r = integrate_path([](cplx) { return cplx(0.0); }, ContourSpec{RayPair{}}, QuadOpts{});
    EXPECT_EQ(std::abs(r.value), 0.0);
}

TEST(IntegratePath, RayTruncationIsStable) {
    auto f = [](cplx z) { return std::exp(z * z * z / 3.0 - 1.5 * z); };
    const cplx a = integrate_path(f, ContourSpec{RayPair{-1.0, Side::plus, 8.0 + std::sqrt(1.5)}}, {}).value;
    const cplx b = integrate_path(f, ContourSpec{RayPair{-1.0, Side::plus, 2 * (8.0 + std::sqrt(1.5))}}, {}).value;
    EXPECT_LT(std::abs(a - b), 1e-12);
    EXPECT_NEAR((a / (2 * kPi * kI)).real(), boost::math::airy_ai(1.5), 1e-10);
}

TEST(IntegratePath, ErrorEstimateShrinksWithPanels) {
    auto f = [](cplx z) { return std::exp(z * z * z / 3.0); };
    QuadOpts coarse;
    coarse.panels_per_unit = 1;
    coarse.gauss_order = 6;
    QuadOpts fine = coarse;
    fine.panels_per_unit = 2;
    const ContourSpec c{RayPair{-1.0, Side::plus, 8.0}};
    const QuadResult a = integrate_path(f, c, coarse), b = integrate_path(f, c, fine);
    EXPECT_LE(b.err, 2.0 * a.err + 1e-15);
}

TEST(IntegrateDoubleSingular, DisjointMatchesTensorProduct) {
    auto fz = [](cplx z) { return std::exp(z * z * z / 3.0); };
    auto fw = [](cplx w) { return std::exp(-w * w * w / 3.0); };
    const ContourSpec cz{RayPair{1.0, Side::plus, 8.0}}, cw{RayPair{-1.0, Side::minus, 8.0}};
    const QuadResult sep = integrate_double_singular_separable(fz, fw, cz, cw, {}, QuadOpts{});
    const QuadResult gen = integrate_double_singular([&](cplx z, cplx w) { return fz(z) * fw(w); }, cz, cw, {},
                                                     QuadOpts{});
    EXPECT_LT(std::abs(sep.value - gen.value), 1e-12 * std::abs(sep.value));

    // Disjoint: (1/(2 pi i))^2 of the double integral is the Airy kernel at the origin.
    const cplx k = sep.value / ((2 * kPi * kI) * (2 * kPi * kI));
    const double aip = boost::math::airy_ai_prime(0.0);
    EXPECT_NEAR(k.real(), aip * aip, 1e-10);
}

TEST(IntegrateDoubleSingular, CrossingContoursReachTheSameKernel) {
    // Crossing contours pick up the residue term, here the segment integral of e^{0}.
    auto lz = [](cplx z) { return z * z * z / 3.0; };
    auto lw = [](cplx w) { return -w * w * w / 3.0; };
    const double s = 0.9;
    const ContourSpec cz{RayPair{-s, Side::plus, 8.0}}, cw{RayPair{s, Side::minus, 8.0}};
    const QuadResult cross =
        integrate_double_singular_log(lz, lw, cz, cw, {cplx(0, -s), cplx(0, s)}, QuadOpts{});
    const cplx k3 = cross.value / ((2 * kPi * kI) * (2 * kPi * kI));
    const cplx k1 = cplx(0, 2 * s) / (2 * kPi * kI);
    const double aip = boost::math::airy_ai_prime(0.0);
    EXPECT_NEAR((k1 + k3).real(), aip * aip, 1e-8);
    EXPECT_NEAR((k1 + k3).imag(), 0.0, 1e-8);
}

TEST(IntegrateDoubleSingular, ZeroIntegrand) {
    const QuadResult r = integrate_double_singular([](cplx, cplx) { return cplx(0.0); },
                                                   ContourSpec{RayPair{1.0, Side::plus, 8.0}},
                                                   ContourSpec{RayPair{-1.0, Side::minus, 8.0}}, {}, QuadOpts{});
    EXPECT_EQ(std::abs(r.value), 0.0);
}
