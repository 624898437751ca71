#include "spectramass/numerics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "spectramass/rng.hpp"
#include "test_util.hpp"

using namespace spectramass;

namespace {

constexpr double kPi = std::numbers::pi;

// Homogeneous-tree Plancherel density with branching q; the full interval
// [0, pi/log q] carries total mass one.
double tree_density(int q, double t) {
    const double s2 = std::pow(std::sin(t * std::log(static_cast<double>(q))), 2);
    return 4.0 * q * (q + 1) * std::log(static_cast<double>(q)) * s2 /
           (2.0 * kPi * ((q - 1.0) * (q - 1.0) + 4.0 * q * s2));
}

} // namespace

TEST(Integrate, PolynomialAndDegenerate) {
    EXPECT_NEAR(integrate([](double x) { return x * x; }, 0.0, 1.0), 1.0 / 3.0, 1e-12);
    EXPECT_EQ(integrate([](double) { return 1.0; }, 2.5, 2.5), 0.0);
}

TEST(Integrate, TreeDensityTotalMass) {
    const double top = kPi / std::log(2.0);
    const double val = integrate([](double t) { return tree_density(2, t); }, 0.0, top);
    const double oracle =
        testutil::trapezoid([](double t) { return tree_density(2, t); }, 0.0, top, 2'000'000);
    EXPECT_NEAR(val, 1.0, 1e-8);
    EXPECT_NEAR(val, oracle, 1e-8);
}

TEST(Integrate, LinearityOnRandomPolynomials) {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        double cf[4], cg[4];
        for (int i = 0; i < 4; ++i) {
            cf[i] = rng.uniform(-2.0, 2.0);
            cg[i] = rng.uniform(-2.0, 2.0);
        }
        const double alpha = rng.uniform(-3.0, 3.0), beta = rng.uniform(-3.0, 3.0);
        auto poly = [](const double* c, double x) {
            return c[0] + x * (c[1] + x * (c[2] + x * c[3]));
        };
        auto f = [&](double x) { return poly(cf, x); };
        auto g = [&](double x) { return poly(cg, x); };
        auto fg = [&](double x) { return alpha * f(x) + beta * g(x); };
        const double a = rng.uniform(-1.0, 0.0), b = rng.uniform(0.5, 2.0);
        EXPECT_NEAR(integrate(fg, a, b), alpha * integrate(f, a, b) + beta * integrate(g, a, b),
                    1e-9);
    }
}

TEST(Integrate, BudgetExhaustionThrows) {
    Quadrature q;
    q.abs_tol = q.rel_tol = 1e-14;
    q.max_subdivisions = 4;
    auto nasty = [](double x) { return std::sqrt(std::fabs(x - 0.3141)); };
    EXPECT_THROW(integrate(nasty, 0.0, 1.0, q), NonConvergent);
}

TEST(SumSeries, Geometric) {
    auto term = [](std::int64_t k) { return std::pow(2.0, -static_cast<double>(k)); };
    auto tail = [](std::int64_t k) { return std::pow(2.0, 1.0 - static_cast<double>(k)); };
    EXPECT_NEAR(sum_series(term, tail, 1e-12), 2.0, 1e-11);
}

TEST(SumSeries, NonConvergentThrows) {
    auto term = [](std::int64_t) { return 0.0; };
    auto tail = [](std::int64_t) { return 1.0; };
    EXPECT_THROW(sum_series(term, tail, 1e-3, 1000), NonConvergent);
}

TEST(BesselJ, ValuesAtZero) {
    EXPECT_EQ(bessel_j(0, 0.0), 1.0);
    EXPECT_EQ(bessel_j(1, 0.0), 0.0);
    EXPECT_EQ(bessel_j(7, 0.0), 0.0);
}

namespace {

// Independent oracle: J_n(x) = (1/pi) \int_0^pi cos(n t - x sin t) dt.
// Trapezoid on a periodic smooth integrand converges spectrally.
double bessel_oracle(int n, double x) {
    const long pts = 4000 + static_cast<long>(100.0 * x);
    return testutil::trapezoid(
               [&](double t) { return std::cos(n * t - x * std::sin(t)); }, 0.0, kPi, pts) /
           kPi;
}

} // namespace

TEST(BesselJ, FirstZeroOfJ0) {
    // Locate the first zero with bisection on the oracle, then check it
    // against the frozen reference and the library evaluation.
    double lo = 2.0, hi = 3.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (bessel_oracle(0, lo) * bessel_oracle(0, mid) <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    const double zero = 0.5 * (lo + hi);
    EXPECT_NEAR(zero, 2.404825557695773, 1e-10);
    EXPECT_NEAR(bessel_j(0, 2.404825557695773), 0.0, 1e-9);
}

TEST(BesselJ, MatchesIntegralOracle) {
    for (int n : {0, 1, 2, 5, 11}) {
        for (double x : {0.3, 1.0, 5.0, 11.9, 12.1, 30.0, 85.0, 400.0}) {
            EXPECT_NEAR(bessel_j(n, x), bessel_oracle(n, x), 1e-10)
                << "n=" << n << " x=" << x;
        }
    }
}

TEST(BesselJ, ThreeTermRecurrence) {
    for (int j = 1; j <= 20; ++j) {
        for (double x = 0.5; x <= 50.0; x += 2.7) {
            const double lhs = bessel_j(j - 1, x) + bessel_j(j + 1, x);
            const double rhs = (2.0 * j / x) * bessel_j(j, x);
            EXPECT_NEAR(lhs, rhs, 1e-8) << "j=" << j << " x=" << x;
        }
    }
}

TEST(BesselJ, AsymptoticSquareAgrees) {
    for (int j : {0, 2, 5, 8}) {
        const double onset = bessel_asymptotic_onset(j);
        for (double x : {onset + 1.0, onset * 2.0, 900.0}) {
            const double exact = std::pow(bessel_j(j, x), 2);
            EXPECT_NEAR(bessel_j_sq_asymptotic(j, x), exact, 1e-9) << "j=" << j << " x=" << x;
        }
    }
}

TEST(GammaQ, KnownCases) {
    EXPECT_NEAR(gamma_q(1.0, 1.3), std::exp(-1.3), 1e-13);
    EXPECT_EQ(gamma_q(2.5, 0.0), 1.0);
    // Direct comparison against the defining integral.
    const double s = 2.5, x = 1.3;
    const double upper = testutil::trapezoid(
        [&](double t) { return std::pow(t, s - 1.0) * std::exp(-t); }, x, 60.0, 2'000'000);
    EXPECT_NEAR(gamma_q(s, x), upper / std::tgamma(s), 1e-9);
}

namespace {

std::vector<double> laplacian_k3() {
    // Complete graph on three vertices, unit conductances and weights.
    return {2, -1, -1, -1, 2, -1, -1, -1, 2};
}

// Two N-cycles joined by rungs; 3-regular.
std::vector<double> double_cycle(int N) {
    const int n = 2 * N;
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    auto add_edge = [&](int u, int v) {
        a[u * static_cast<std::size_t>(n) + v] -= 1.0;
        a[v * static_cast<std::size_t>(n) + u] -= 1.0;
        a[u * static_cast<std::size_t>(n) + u] += 1.0;
        a[v * static_cast<std::size_t>(n) + v] += 1.0;
    };
    for (int i = 0; i < N; ++i) {
        add_edge(i, (i + 1) % N);
        add_edge(N + i, N + (i + 1) % N);
        add_edge(i, N + i);
    }
    return a;
}

} // namespace

TEST(SymEig, CompleteGraphK3) {
    auto d = sym_eig(laplacian_k3(), 3);
    ASSERT_EQ(d.n, 3);
    EXPECT_NEAR(d.eigenvalues[0], 0.0, 1e-12);
    EXPECT_NEAR(d.eigenvalues[1], 3.0, 1e-12);
    EXPECT_NEAR(d.eigenvalues[2], 3.0, 1e-12);
}

TEST(SymEig, OneByOne) {
    auto d = sym_eig({4.25}, 1);
    EXPECT_DOUBLE_EQ(d.eigenvalues[0], 4.25);
    EXPECT_DOUBLE_EQ(d.vectors[0], 1.0);
}

TEST(SymEig, DoubleCycleSpectrum) {
    const int N = 6;
    auto d = sym_eig(double_cycle(N), 2 * N);
    std::vector<double> expected;
    for (int k = 0; k < N; ++k) {
        expected.push_back(2.0 - 2.0 * std::cos(2.0 * kPi * k / N));
        expected.push_back(4.0 - 2.0 * std::cos(2.0 * kPi * k / N));
    }
    EXPECT_TRUE(testutil::multiset_close(d.eigenvalues, expected, 1e-10));
}

TEST(SymEig, OrthonormalityAndReconstruction) {
    SplitMix64 rng(99);
    const int n = 40;
    std::vector<double> a(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double x = rng.uniform(-1.0, 1.0);
            a[i * static_cast<std::size_t>(n) + j] = a[j * static_cast<std::size_t>(n) + i] = x;
        }
    auto d = sym_eig(a, n);
    double norm_a = 0.0, trace = 0.0, sum_eig = 0.0;
    for (double v : a) norm_a += v * v;
    norm_a = std::sqrt(norm_a);
    for (int i = 0; i < n; ++i) trace += a[i * static_cast<std::size_t>(n) + i];
    for (double ev : d.eigenvalues) sum_eig += ev;
    EXPECT_NEAR(sum_eig, trace, 1e-8 * norm_a);

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double dot = 0.0;
            for (int k = 0; k < n; ++k) dot += d.eigenvector(i)[k] * d.eigenvector(j)[k];
            EXPECT_NEAR(dot, i == j ? 1.0 : 0.0, 1e-10);
        }

    double resid = 0.0;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                s += d.eigenvalues[k] * d.eigenvector(k)[r] * d.eigenvector(k)[c];
            const double diff = s - a[r * static_cast<std::size_t>(n) + c];
            resid += diff * diff;
        }
    EXPECT_LE(std::sqrt(resid), 1e-8 * norm_a);
}

TEST(SymEig, PermutationInvariance) {
    SplitMix64 rng(1234);
    const int n = 12;
    std::vector<double> a(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double x = rng.uniform(-1.0, 1.0);
            a[i * static_cast<std::size_t>(n) + j] = a[j * static_cast<std::size_t>(n) + i] = x;
        }
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    std::vector<double> b(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            b[i * static_cast<std::size_t>(n) + j] =
                a[perm[i] * static_cast<std::size_t>(n) + perm[j]];
    auto da = sym_eig(a, n);
    auto db = sym_eig(b, n);
    EXPECT_TRUE(testutil::multiset_close(da.eigenvalues, db.eigenvalues, da.cluster_tol));
}

TEST(SymEig, Errors) {
    std::vector<double> bad = {1.0, 2.0, 3.0, 4.0};
    EXPECT_THROW(sym_eig(bad, 2), NotSymmetric);
    SymEigOptions opt;
    opt.size_cap = 2;
    std::vector<double> big(9, 0.0);
    EXPECT_THROW(sym_eig(big, 3, opt), TooLarge);
}

TEST(SplitMix, Deterministic) {
    SplitMix64 a(42), b(42), c(43);
    bool all_eq = true, any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next();
        all_eq = all_eq && (va == b.next());
        any_diff = any_diff || (va != c.next());
    }
    EXPECT_TRUE(all_eq);
    EXPECT_TRUE(any_diff);
    SplitMix64 d(7);
    for (int i = 0; i < 1000; ++i) {
        const double u = d.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}
