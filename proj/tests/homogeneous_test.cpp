#include "spectramass/homogeneous.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "spectramass/rng.hpp"
#include "test_util.hpp"

using namespace spectramass;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Euclidean, ClosedForm) {
    EXPECT_NEAR(euclidean_mass(1, kPi * kPi), 1.0, 1e-14);
    EXPECT_NEAR(euclidean_mass(2, 4.0 * kPi), 1.0, 1e-14);
    EXPECT_EQ(euclidean_mass(3, 0.0), 0.0);
}

TEST(Lattice, OneDimClosedForm) {
    EXPECT_NEAR(lattice_mass(1, 2.0), 0.5, 1e-12);
    EXPECT_NEAR(lattice_mass(1, 4.0), 1.0, 1e-12);
    EXPECT_EQ(lattice_mass(1, 5.0), 1.0); // clamped above the spectrum
}

TEST(Lattice, TwoDimLowEnergyAndOracle) {
    const double lam = 0.01;
    const double v = lattice_mass(2, lam);
    EXPECT_NEAR(v / (lam / (4.0 * kPi)), 1.0, 0.01);

    // Midpoint-grid area oracle on the positive quadrant.
    const int R = 4000;
    long hits = 0;
    for (int i = 0; i < R; ++i) {
        const double x = (i + 0.5) / (2.0 * R);
        const double sx = 4.0 * std::pow(std::sin(kPi * x), 2);
        if (sx > lam) continue;
        for (int j = 0; j < R; ++j) {
            const double y = (j + 0.5) / (2.0 * R);
            if (sx + 4.0 * std::pow(std::sin(kPi * y), 2) <= lam) ++hits;
        }
    }
    const double oracle = 4.0 * static_cast<double>(hits) / (4.0 * static_cast<double>(R) * R);
    EXPECT_NEAR(v, oracle, 5e-3 * oracle + 1e-7);
}

TEST(Lattice, Normalization) {
    EXPECT_NEAR(lattice_mass(2, 8.0), 1.0, 1e-8);
    EXPECT_EQ(lattice_mass(3, 12.0), 1.0); // MC hits the whole box exactly
    EXPECT_EQ(lattice_mass(4, 16.0), 1.0);
}

TEST(Lattice, EuclideanAgreementLowEnergy) {
    for (int n = 1; n <= 3; ++n) {
        for (double lam : {0.002, 0.01}) {
            const double ratio = lattice_mass(n, lam) / euclidean_mass(n, lam);
            EXPECT_NEAR(ratio, 1.0, 0.02) << "n=" << n << " lambda=" << lam;
        }
    }
}

TEST(Lattice, MonotoneInLambda) {
    SplitMix64 rng(2024);
    for (int n = 1; n <= 4; ++n) {
        for (int trial = 0; trial < 12; ++trial) {
            double a = rng.uniform(0.0, 4.0 * n);
            double b = rng.uniform(0.0, 4.0 * n);
            if (a > b) std::swap(a, b);
            EXPECT_GE(lattice_mass(n, b) - lattice_mass(n, a), -1e-8) << "n=" << n;
        }
    }
}

TEST(Lattice, DimensionCap) {
    EXPECT_THROW(lattice_mass(5, 1.0), DimensionTooLarge);
}

TEST(Hyperbolic, ThreeDimExact) {
    EXPECT_EQ(hyperbolic_mass(3, 0.5), 0.0);
    const double c3 = weyl_constant(3);
    EXPECT_NEAR(c3, 1.0 / (6.0 * kPi * kPi), 1e-15);
    EXPECT_NEAR(hyperbolic_mass(3, 2.0), c3, 1e-8 * c3);
    for (double lam : {1.1, 3.7, 25.0, 100.0}) {
        const double expect = c3 * std::pow(lam - 1.0, 1.5);
        EXPECT_NEAR(hyperbolic_mass(3, lam) / expect, 1.0, 1e-8) << "lambda=" << lam;
    }
}

TEST(Hyperbolic, TwoDimWeylRatio) {
    const double lam = 1e4;
    const double ratio = hyperbolic_mass(2, lam) / (weyl_constant(2) * lam);
    EXPECT_NEAR(ratio, 1.0, 1e-2);
}

TEST(Hyperbolic, MonotoneInLambda) {
    SplitMix64 rng(5);
    for (int n : {2, 3, 4, 5}) {
        for (int trial = 0; trial < 8; ++trial) {
            double a = rng.uniform(0.0, 50.0), b = rng.uniform(0.0, 50.0);
            if (a > b) std::swap(a, b);
            EXPECT_GE(hyperbolic_mass(n, b) - hyperbolic_mass(n, a), -1e-8);
        }
    }
}

TEST(Heisenberg, SeriesConstants) {
    EXPECT_NEAR(heisenberg_series_constant(1), 1.0 / 32.0, 1e-10);
    EXPECT_NEAR(heisenberg_series_constant(2), 1.0 / (576.0 * kPi), 1e-10);
}

TEST(Heisenberg, MassValues) {
    EXPECT_NEAR(heisenberg_mass(1, 2.0), 0.125, 1e-9);
    EXPECT_EQ(heisenberg_mass(1, 0.0), 0.0);
}

TEST(Heisenberg, ExponentIsNPlusOne) {
    for (int n : {1, 2, 3}) {
        const double l1 = 0.7, l2 = 19.0;
        const double slope = (std::log(heisenberg_mass(n, l2)) - std::log(heisenberg_mass(n, l1))) /
                             (std::log(l2) - std::log(l1));
        EXPECT_NEAR(slope, n + 1.0, 1e-12);
    }
}

TEST(Tree, GapAndEdge) {
    EXPECT_EQ(tree_mass(4, 1.0), 0.0); // bottom of the spectrum for q = 4
    for (int q : {2, 3, 4, 9}) {
        const double bottom = tree_spectrum_bottom(q);
        EXPECT_EQ(tree_mass(q, 0.5 * bottom), 0.0);
        EXPECT_EQ(tree_mass(q, bottom), 0.0);
    }
}

TEST(Tree, TotalMassIsOne) {
    for (int q : {2, 3, 4, 9}) {
        const double top = tree_spectrum_top(q);
        EXPECT_NEAR(tree_mass(q, top), 1.0, 1e-6) << "q=" << q;
        EXPECT_NEAR(tree_mass(q, top + 3.0), 1.0, 1e-6); // clamped
    }
    // Independent high-resolution trapezoid of the density, q = 2.
    const double top_t = kPi / std::log(2.0);
    const double oracle = testutil::trapezoid(
        [](double t) { return tree_plancherel_density(2, t); }, 0.0, top_t, 1'000'000);
    EXPECT_NEAR(oracle, 1.0, 1e-9);
}

TEST(Tree, GapEdgeCoefficient) {
    // Measured M(bottom+eps)/eps^{3/2} approaches the closed-form gap
    // coefficient as eps -> 0.
    for (int q : {2, 3, 9}) {
        const double bottom = tree_spectrum_bottom(q);
        const double eps = 1e-3;
        const double measured = tree_mass(q, bottom + eps) / std::pow(eps, 1.5);
        EXPECT_NEAR(measured / tree_gap_coefficient(q), 1.0, 0.02) << "q=" << q;
    }
}

TEST(Tree, MonotoneInLambda) {
    SplitMix64 rng(11);
    for (int q : {2, 5}) {
        for (int trial = 0; trial < 10; ++trial) {
            double a = rng.uniform(0.0, tree_spectrum_top(q) + 1.0);
            double b = rng.uniform(0.0, tree_spectrum_top(q) + 1.0);
            if (a > b) std::swap(a, b);
            EXPECT_GE(tree_mass(q, b) - tree_mass(q, a), -1e-9);
        }
    }
}

TEST(HeatTransform, EuclideanClosedForm) {
    // Exact-tail curve (empty sampled part carries no weight).
    for (int n : {1, 2, 3}) {
        HomogeneousSpace sp{HomogeneousSpace::Kind::Euclidean, n, 2};
        std::vector<double> g{0.0};
        auto curve = sample_mass_curve(sp, g);
        for (double t : {0.1, 0.5, 1.0, 10.0}) {
            const double expect = std::pow(4.0 * kPi * t, -0.5 * n);
            EXPECT_NEAR(heat_transform(curve, t), expect, 1e-6 * expect) << "n=" << n << " t=" << t;
        }
    }
}

TEST(HeatTransform, SampledGridAgrees) {
    // Same computation with a dense piecewise-linear sampled head.
    HomogeneousSpace sp{HomogeneousSpace::Kind::Euclidean, 1, 2};
    std::vector<double> g;
    for (int i = 0; i <= 20000; ++i) g.push_back(i * 5e-5);
    auto curve = sample_mass_curve(sp, g);
    const double t = 1.0;
    EXPECT_NEAR(heat_transform(curve, t), std::pow(4.0 * kPi, -0.5), 1e-6);
}

TEST(HeatTransform, ZeroCurveAndMissingTail) {
    SpectralMassCurve zero;
    zero.lambda = {0.0, 1.0, 2.0};
    zero.mass = {0.0, 0.0, 0.0};
    zero.tail = TailModel{0.0, 0.0};
    EXPECT_EQ(heat_transform(zero, 1.0), 0.0);
    zero.tail.reset();
    EXPECT_THROW(heat_transform(zero, 1.0), MissingTailModel);
}

TEST(HeatBound, HoldsOnTestedSpaces) {
    {
        HomogeneousSpace sp{HomogeneousSpace::Kind::Euclidean, 2, 2};
        std::vector<double> grid{1.0, 10.0, 100.0};
        auto rep = spectral_vs_heat_bound(sp, grid);
        EXPECT_GT(rep.min_slack, 0.0);
        // Closed form on both sides: c2 lambda vs e * c2 * Gamma(2) * lambda.
        EXPECT_NEAR(rep.max_ratio, 1.0 / M_E, 1e-9);
    }
    {
        HomogeneousSpace sp{HomogeneousSpace::Kind::Tree, 1, 2};
        std::vector<double> grid{0.1};
        auto rep = spectral_vs_heat_bound(sp, grid);
        EXPECT_GT(rep.min_slack, 0.0); // mass is zero below the gap, bound positive
    }
    {
        HomogeneousSpace sp{HomogeneousSpace::Kind::Lattice, 1, 2};
        std::vector<double> grid;
        for (double l = 0.5; l <= 4.0; l += 0.5) grid.push_back(l);
        auto rep = spectral_vs_heat_bound(sp, grid);
        EXPECT_GT(rep.min_slack, 0.0);
        EXPECT_EQ(rep.checked, grid.size());
    }
}

TEST(Curves, ValidateCatchesViolations) {
    SpectralMassCurve c;
    c.lambda = {0.0, 1.0, 2.0};
    c.mass = {0.0, 0.5, 0.4};
    c.err_est = {0.0, 0.0, 0.0};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.mass = {0.0, 0.5, 0.9};
    EXPECT_NO_THROW(c.validate());
}

TEST(WeylConstants, LowDimensions) {
    EXPECT_NEAR(weyl_constant(1), 1.0 / kPi, 1e-15);
    EXPECT_NEAR(weyl_constant(2), 1.0 / (4.0 * kPi), 1e-15);
    EXPECT_NEAR(weyl_constant(3), 1.0 / (6.0 * kPi * kPi), 1e-15);
    EXPECT_GT(make_weyl_constant(4).c_n, 0.0);
}
