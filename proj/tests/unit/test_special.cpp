#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "eisp/error.hpp"
#include "eisp/special.hpp"

using namespace eisp;
using namespace eisp::special;

namespace {

// Reference values from 40-digit arbitrary-precision evaluation.
struct Reference {
    double x, j0, j1, y0, y1;
};

const Reference references[] = {
    {10.943974, -0.18084592567918454835, -0.16780136567558156358, -0.15939154974257653388, 0.1737649587126175965},
    {71.539112, -0.0062338754389378426225, 0.09408538299478753924, 0.094126652288152876097, 0.0068918640050128848414},
    {0.1969, 0.99033105788936744127, 0.097973661586018129417, -1.091484631116129329, -3.3727614549174011002},
    {0.056131, 0.99921248280308505135, 0.02805444824262473896, -1.9053085743663468083, -11.404112108858675546},
    {39.013672, 0.11047169734377528289, 0.065549838734907564149, 0.064129002088487857193, -0.10965901670611669774},
    {211.358107, -0.054681953575908019362, -0.0048111265773321242004, -0.0046817556583061482569, 0.05467103123061537381},
    {0.471285, 0.94523869560862370263, 0.22916046056745402194, -0.48784102020934879049, -1.5473454933502416474},
    {0.143883, 0.99483111338357634963, 0.071755491046402554011, -1.2980042723536642475, -4.5411773658445284561},
    {24.546849, 0.031109595179199098472, -0.15739204561169202325, -0.15799277033826422844, -0.034332892637135541596},
    {320.919203, 0.042429216993786837319, -0.013480040134915980349, -0.013546129295622358491, -0.042450373641109475981},
    {0.041814, 0.99956294511336171872, 0.02090243108031861729, -2.0935753325628220283, -15.275475835086273069},
    {0.01777, 0.99992105833299452739, 0.0088846492993372086133, -2.6392784569765986467, -35.851815133163848405},
    {0.617493, 0.90692336612727167671, 0.29426290566141722111, -0.28673149153831718605, -1.2298165035593131817},
    {0.314218, 0.97546866058297604573, 0.15517798091751820408, -0.77533994938840379523, -2.2003378086922901391},
    {10.201459, -0.24960715251350371021, -0.0069789552142250039198, 0.0052202264795096832774, 0.25015792993507325583},
    {0.080981, 0.99836119126150415189, 0.040457317373864358998, -1.6701876084771772637, -7.9419340033143248277},
    {0.5, 0.93846980724081290423, 0.24226845767487388638, -0.44451873350670655715, -1.4714723926702430692},
    {7.3, 0.28821694763501439904, 0.082570430493257831051, 0.062773886374037597732, -0.28459437186807210845},
    {19.9, 0.17287775639261846235, 0.050117424807379740922, 0.045762094159385478714, -0.17178303121049256457},
    {20.1, 0.15953606793729709074, 0.082801005760209763489, 0.078810592428750292646, -0.1576259807478115438},
};

}  // namespace

TEST(Bessel, MatchesHighPrecisionReference) {
    for (const auto& r : references) {
        SCOPED_TRACE(r.x);
        EXPECT_NEAR(bessel_j0(r.x), r.j0, 1e-12);
        EXPECT_NEAR(bessel_j1(r.x), r.j1, 1e-12);
        EXPECT_NEAR(bessel_y0(r.x), r.y0, 1e-12 * std::max(1.0, std::abs(r.y0)));
        EXPECT_NEAR(bessel_y1(r.x), r.y1, 1e-12 * std::max(1.0, std::abs(r.y1)));
    }
}

TEST(Bessel, AgreesWithStandardLibraryAcrossRange) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> logx(-2.0, 3.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = std::pow(10.0, logx(rng));
        SCOPED_TRACE(x);
        ASSERT_NEAR(bessel_j0(x), std::cyl_bessel_j(0.0, x), 1e-10);
        ASSERT_NEAR(bessel_j1(x), std::cyl_bessel_j(1.0, x), 1e-10);
        ASSERT_NEAR(bessel_y0(x), std::cyl_neumann(0.0, x), 1e-10 * std::max(1.0, std::abs(std::cyl_neumann(0.0, x))));
        ASSERT_NEAR(bessel_y1(x), std::cyl_neumann(1.0, x), 1e-10 * std::max(1.0, std::abs(std::cyl_neumann(1.0, x))));
    }
}

TEST(Bessel, ParityAndOrigin) {
    EXPECT_DOUBLE_EQ(bessel_j0(0.0), 1.0);
    EXPECT_DOUBLE_EQ(bessel_j1(0.0), 0.0);
    EXPECT_DOUBLE_EQ(bessel_j0(-3.2), bessel_j0(3.2));
    EXPECT_DOUBLE_EQ(bessel_j1(-3.2), -bessel_j1(3.2));
    EXPECT_THROW(bessel_y0(0.0), Error);
    EXPECT_THROW(bessel_y1(-1.0), Error);
}

TEST(Bessel, WronskianHolds) {
    // J1 Y0 - J0 Y1 = 2 / (pi x)
    for (double x : {0.01, 0.3, 2.0, 9.5, 19.99, 20.01, 55.0, 800.0}) {
        const double w = bessel_j1(x) * bessel_y0(x) - bessel_j0(x) * bessel_y1(x);
        EXPECT_NEAR(w * std::numbers::pi * x / 2.0, 1.0, 1e-11) << x;
    }
}

TEST(Hankel, CombinesBothKinds) {
    const cplx h0 = hankel1_0(4.0);
    EXPECT_DOUBLE_EQ(h0.real(), bessel_j0(4.0));
    EXPECT_DOUBLE_EQ(h0.imag(), bessel_y0(4.0));
    const cplx h1 = hankel1_1(4.0);
    EXPECT_DOUBLE_EQ(h1.real(), bessel_j1(4.0));
    EXPECT_DOUBLE_EQ(h1.imag(), bessel_y1(4.0));
}

TEST(BesselSequence, IntegerOrdersMatchStandardLibrary) {
    for (double x : {0.05, 0.9, 4.2, 5.13, 12.0, 25.15, 60.0}) {
        const auto j = bessel_jn_sequence(40, x);
        const auto y = bessel_yn_sequence(20, x);
        for (int n = 0; n <= 40; ++n) {
            const double ref = std::cyl_bessel_j(static_cast<double>(n), x);
            EXPECT_NEAR(j[n], ref, 1e-12 + 1e-10 * std::abs(ref)) << "J_" << n << "(" << x << ")";
        }
        for (int n = 0; n <= 20; ++n) {
            const double ref = std::cyl_neumann(static_cast<double>(n), x);
            if (std::abs(ref) > 1e200) continue;
            EXPECT_NEAR(y[n], ref, 1e-10 * std::max(1.0, std::abs(ref))) << "Y_" << n << "(" << x << ")";
        }
    }
}
