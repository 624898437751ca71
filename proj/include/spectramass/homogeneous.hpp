#pragma once

// Spectral mass functions for the homogeneous families: Euclidean space,
// the cubic lattice, hyperbolic space, the Heisenberg group and homogeneous
// trees, together with the heat-kernel transform and the spectral-vs-heat
// comparison bound.

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spectramass/errors.hpp"
#include "spectramass/numerics.hpp"
#include "spectramass/rng.hpp"

namespace spectramass {

// ---------------------------------------------------------------------------
// Weyl constant

inline double unit_ball_volume(int n) {
    if (n < 0) throw std::invalid_argument("unit_ball_volume: n >= 0");
    return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

// c_n = (volume of the unit n-ball) / (2 pi)^n; the constant in the Weyl law
// M(lambda) ~ c_n lambda^{n/2}.
inline double weyl_constant(int n) {
    return unit_ball_volume(n) / std::pow(2.0 * M_PI, n);
}

struct WeylConstant {
    int n;
    double c_n;
};

inline WeylConstant make_weyl_constant(int n) { return {n, weyl_constant(n)}; }

// ---------------------------------------------------------------------------
// Euclidean space

inline double euclidean_mass(int n, double lambda) {
    if (n < 1) throw std::invalid_argument("euclidean_mass: n >= 1");
    if (!(lambda >= 0.0)) throw std::invalid_argument("euclidean_mass: lambda >= 0");
    return weyl_constant(n) * std::pow(lambda, 0.5 * n);
}

// ---------------------------------------------------------------------------
// Cubic lattice

struct MassEstimate {
    double value = 0.0;
    double err_est = 0.0;
};

struct LatticeOptions {
    long mc_samples = 400'000;
    std::uint64_t seed = 0;
    Quadrature quad{1e-9, 1e-9, 1L << 20};
};

// Volume of { xi in [-1/2,1/2]^n : sum_i 4 sin^2(pi xi_i) <= lambda }.
// n = 1 is closed form, n = 2 tensorized adaptive quadrature, n in {3, 4}
// seeded midpoint Monte Carlo restricted to the bounding box
// [0, sqrt(lambda)/4]^n (common samples across lambda keep curves monotone).
inline MassEstimate lattice_mass_est(int n, double lambda, const LatticeOptions& opt = {}) {
    if (n < 1) throw std::invalid_argument("lattice_mass: n >= 1");
    if (n > 4) throw DimensionTooLarge("lattice_mass: quadrature cost limits n <= 4");
    if (!(lambda >= 0.0)) throw std::invalid_argument("lattice_mass: lambda >= 0");
    const double top = 4.0 * n;
    if (lambda >= top) return {1.0, 0.0};
    if (lambda == 0.0) return {0.0, 0.0};

    if (n == 1) {
        return {2.0 / M_PI * std::asin(0.5 * std::sqrt(lambda)), 0.0};
    }
    if (n == 2) {
        auto inner = [&](double xi) {
            const double rest = lambda - 4.0 * std::pow(std::sin(M_PI * xi), 2);
            if (rest <= 0.0) return 0.0;
            if (rest >= 4.0) return 1.0;
            return 2.0 / M_PI * std::asin(0.5 * std::sqrt(rest));
        };
        IntegralResult r = integrate_est(inner, 0.0, 0.5, opt.quad);
        return {2.0 * r.value, 2.0 * r.err_est};
    }

    // n in {3, 4}: the region lies inside [0, r]^n per orthant because
    // sin(pi x) >= 2x on [0, 1/2].
    const double r = std::min(0.5, 0.25 * std::sqrt(lambda));
    SplitMix64 rng(opt.seed);
    long hits = 0;
    std::array<double, 4> xi{};
    for (long s = 0; s < opt.mc_samples; ++s) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            xi[i] = r * rng.uniform();
            acc += 4.0 * std::pow(std::sin(M_PI * xi[i]), 2);
        }
        if (acc <= lambda) ++hits;
    }
    const double box = std::pow(2.0 * r, n);
    const double p = static_cast<double>(hits) / static_cast<double>(opt.mc_samples);
    const double se = box * std::sqrt(std::max(p * (1.0 - p), 1e-12) /
                                      static_cast<double>(opt.mc_samples));
    return {box * p, se};
}

inline double lattice_mass(int n, double lambda, const LatticeOptions& opt = {}) {
    return lattice_mass_est(n, lambda, opt).value;
}

// ---------------------------------------------------------------------------
// Hyperbolic space

inline double hyperbolic_spectrum_bottom(int n) {
    return std::pow(0.5 * (n - 1), 2);
}

// Plancherel density at spectral parameter t: polynomial for odd n, the
// t tanh(pi t) form for even n. Integrating it from 0 to
// sqrt(lambda - ((n-1)/2)^2) yields the spectral mass.
inline double hyperbolic_plancherel_density(int n, double t) {
    if (n < 2) throw std::invalid_argument("hyperbolic density: n >= 2");
    double prod = 1.0;
    if (n % 2 == 1) {
        for (int j = 0; j <= (n - 3) / 2; ++j) prod *= t * t + static_cast<double>(j) * j;
    } else {
        for (int j = 0; j <= (n - 4) / 2; ++j) {
            const double h = j + 0.5;
            prod *= t * t + h * h;
        }
        prod *= t * std::tanh(M_PI * t);
    }
    return static_cast<double>(n) * weyl_constant(n) * prod;
}

inline double hyperbolic_mass(int n, double lambda, const Quadrature& q = {1e-12, 1e-11, 1L << 20}) {
    if (n < 2) throw std::invalid_argument("hyperbolic_mass: n >= 2");
    const double bottom = hyperbolic_spectrum_bottom(n);
    if (lambda <= bottom) return 0.0;
    const double T = std::sqrt(lambda - bottom);
    return integrate([n](double t) { return hyperbolic_plancherel_density(n, t); }, 0.0, T, q);
}

// ---------------------------------------------------------------------------
// Heisenberg group

// Constant C(n) with M(lambda) = C(n) lambda^{n+1}. The prefactored series
// has terms ~ k^{-2}; the tail bound comes from AM-GM on the binomial
// factor, Prod_{i<n}(k+i) <= (k + n/2)^{n-1}, and integral comparison.
inline double heisenberg_series_constant(int n, double tol = 1e-10) {
    if (n < 1) throw std::invalid_argument("heisenberg_series_constant: n >= 1");
    const double pref = 2.0 / ((n + 1.0) * std::pow(2.0 * M_PI, n + 1));
    double fact = 1.0;
    for (int i = 2; i <= n - 1; ++i) fact *= i;
    const double tail_coef = pref / (fact * std::pow(2.0, n + 1));
    auto term = [&](std::int64_t k) {
        const double kd = static_cast<double>(k);
        double num = 1.0;
        for (int i = 1; i <= n - 1; ++i) num *= kd + i;
        double den = 1.0;
        const double base = n + 2.0 * kd;
        for (int p = 0; p <= n; ++p) den *= base;
        return pref * num / (fact * den);
    };
    auto tail = [&](std::int64_t k) {
        return tail_coef / (static_cast<double>(k) - 1.0 + 0.5 * n);
    };
    return sum_series(term, tail, tol);
}

namespace detail {

inline double heisenberg_constant_cached(int n) {
    static std::mutex mu;
    static std::map<int, double> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    const double v = heisenberg_series_constant(n);
    cache.emplace(n, v);
    return v;
}

} // namespace detail

inline double heisenberg_mass(int n, double lambda) {
    if (n < 1) throw std::invalid_argument("heisenberg_mass: n >= 1");
    if (!(lambda >= 0.0)) throw std::invalid_argument("heisenberg_mass: lambda >= 0");
    return detail::heisenberg_constant_cached(n) * std::pow(lambda, n + 1);
}

// ---------------------------------------------------------------------------
// Homogeneous trees

inline double tree_spectrum_bottom(int q) { return q + 1.0 - 2.0 * std::sqrt(static_cast<double>(q)); }
inline double tree_spectrum_top(int q) { return q + 1.0 + 2.0 * std::sqrt(static_cast<double>(q)); }

// Plancherel density in the spectral parameter t in [0, pi/log q];
// normalized so the full interval carries total mass one.
inline double tree_plancherel_density(int q, double t) {
    if (q < 2) throw std::invalid_argument("tree density: q >= 2");
    const double lq = std::log(static_cast<double>(q));
    const double s2 = std::pow(std::sin(t * lq), 2);
    return 4.0 * q * (q + 1.0) * lq * s2 / (2.0 * M_PI * ((q - 1.0) * (q - 1.0) + 4.0 * q * s2));
}

inline double tree_mass(int q, double lambda, const Quadrature& quad = {1e-10, 1e-10, 1L << 20}) {
    if (q < 2) throw std::invalid_argument("tree_mass: q >= 2");
    const double bottom = tree_spectrum_bottom(q);
    const double top = tree_spectrum_top(q);
    if (lambda <= bottom) return 0.0;
    const double lq = std::log(static_cast<double>(q));
    double T;
    if (lambda >= top) {
        T = M_PI / lq;
    } else {
        double arg = (q + 1.0 - lambda) / (2.0 * std::sqrt(static_cast<double>(q)));
        arg = std::clamp(arg, -1.0, 1.0);
        T = std::acos(arg) / lq;
    }
    return integrate([q](double t) { return tree_plancherel_density(q, t); }, 0.0, T, quad);
}

// Coefficient c with M(bottom + eps) = c eps^{3/2} + O(eps^{5/2}), obtained
// from the small-t expansion of the density and the arccos band edge.
inline double tree_gap_coefficient(int q) {
    return 2.0 * std::pow(static_cast<double>(q), 0.25) * (q + 1.0) /
           (3.0 * M_PI * (q - 1.0) * (q - 1.0));
}

// ---------------------------------------------------------------------------
// Curves and the heat transform

struct TailModel {
    double coef = 0.0;     // M(lambda) ~ coef * lambda^exponent beyond the grid
    double exponent = 0.0;
};

struct SpectralMassCurve {
    std::vector<double> lambda;
    std::vector<double> mass;
    std::vector<double> err_est;
    std::string space_tag;
    std::optional<TailModel> tail;

    void validate() const {
        if (lambda.size() != mass.size())
            throw std::invalid_argument("SpectralMassCurve: size mismatch");
        for (std::size_t i = 0; i < lambda.size(); ++i) {
            if (mass[i] < 0.0) throw std::invalid_argument("SpectralMassCurve: negative mass");
            if (i > 0) {
                if (!(lambda[i] > lambda[i - 1]))
                    throw std::invalid_argument("SpectralMassCurve: lambda not strictly increasing");
                const double slack = err_at(i) + err_at(i - 1) + 1e-12;
                if (mass[i] < mass[i - 1] - slack)
                    throw std::invalid_argument("SpectralMassCurve: mass decreasing beyond error bars");
            }
        }
    }

    double err_at(std::size_t i) const { return i < err_est.size() ? err_est[i] : 0.0; }
};

// Laplace-type transform H(t) = int_0^inf t e^{-lambda t} M(lambda) dlambda.
// The sampled part is integrated segment-exactly (piecewise linear M), the
// declared power-law tail in closed form through the incomplete gamma.
inline double heat_transform(const SpectralMassCurve& curve, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("heat_transform: t > 0");
    if (!curve.tail) throw MissingTailModel("heat_transform: curve lacks a tail model");
    double h = 0.0;
    const auto& xs = curve.lambda;
    const auto& ms = curve.mass;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double x0 = xs[i], x1 = xs[i + 1];
        const double slope = (ms[i + 1] - ms[i]) / (x1 - x0);
        const double a = ms[i] - slope * x0;
        const double e0 = std::exp(-x0 * t), e1 = std::exp(-x1 * t);
        h += a * (e0 - e1);
        h += slope * ((x0 + 1.0 / t) * e0 - (x1 + 1.0 / t) * e1);
    }
    const double cut = xs.empty() ? 0.0 : xs.back();
    const TailModel& tm = *curve.tail;
    if (tm.coef != 0.0) {
        const double s = tm.exponent + 1.0;
        h += tm.coef * std::pow(t, -tm.exponent) * std::tgamma(s) * gamma_q(s, cut * t);
    }
    return h;
}

// ---------------------------------------------------------------------------
// Space descriptor and dispatch

struct HomogeneousSpace {
    enum class Kind { Euclidean, Lattice, Hyperbolic, Heisenberg, Tree };
    Kind kind = Kind::Euclidean;
    int n = 1; // dimension, all kinds except Tree
    int q = 2; // branching, Tree only

    void validate() const {
        if (kind == Kind::Tree) {
            if (q < 2) throw std::invalid_argument("HomogeneousSpace: tree requires q >= 2");
        } else if (n < 1) {
            throw std::invalid_argument("HomogeneousSpace: dimension >= 1");
        }
        if (kind == Kind::Hyperbolic && n < 2)
            throw std::invalid_argument("HomogeneousSpace: hyperbolic requires n >= 2");
    }

    std::string tag() const {
        switch (kind) {
            case Kind::Euclidean: return "euclidean(n=" + std::to_string(n) + ")";
            case Kind::Lattice: return "lattice(n=" + std::to_string(n) + ")";
            case Kind::Hyperbolic: return "hyperbolic(n=" + std::to_string(n) + ")";
            case Kind::Heisenberg: return "heisenberg(n=" + std::to_string(n) + ")";
            case Kind::Tree: return "tree(q=" + std::to_string(q) + ")";
        }
        return "?";
    }
};

inline MassEstimate homogeneous_mass_est(const HomogeneousSpace& sp, double lambda) {
    sp.validate();
    using K = HomogeneousSpace::Kind;
    switch (sp.kind) {
        case K::Euclidean: return {euclidean_mass(sp.n, lambda), 0.0};
        case K::Lattice: return lattice_mass_est(sp.n, lambda);
        case K::Hyperbolic: return {hyperbolic_mass(sp.n, lambda), 1e-10};
        case K::Heisenberg: return {heisenberg_mass(sp.n, lambda), 1e-10};
        case K::Tree: return {tree_mass(sp.q, lambda), 1e-9};
    }
    return {};
}

inline double homogeneous_mass(const HomogeneousSpace& sp, double lambda) {
    return homogeneous_mass_est(sp, lambda).value;
}

// Tail model used past the end of a sampled grid: exact power laws for the
// unbounded spectra, constant continuation for the bounded ones.
inline TailModel homogeneous_tail(const HomogeneousSpace& sp, double last_lambda, double last_mass) {
    using K = HomogeneousSpace::Kind;
    switch (sp.kind) {
        case K::Euclidean: return {weyl_constant(sp.n), 0.5 * sp.n};
        case K::Hyperbolic: return {weyl_constant(sp.n), 0.5 * sp.n};
        case K::Heisenberg: return {detail::heisenberg_constant_cached(sp.n), sp.n + 1.0};
        case K::Lattice:
        case K::Tree: {
            (void)last_lambda;
            return {last_mass, 0.0};
        }
    }
    return {};
}

inline SpectralMassCurve sample_mass_curve(const HomogeneousSpace& sp, std::span<const double> grid) {
    SpectralMassCurve c;
    c.space_tag = sp.tag();
    c.lambda.reserve(grid.size());
    for (double l : grid) {
        MassEstimate m = homogeneous_mass_est(sp, l);
        c.lambda.push_back(l);
        c.mass.push_back(m.value);
        c.err_est.push_back(m.err_est);
    }
    const double ll = c.lambda.empty() ? 0.0 : c.lambda.back();
    const double lm = c.mass.empty() ? 0.0 : c.mass.back();
    c.tail = homogeneous_tail(sp, ll, lm);
    return c;
}

struct HeatBoundReport {
    double min_slack = 0.0;     // min over the grid of e*H(1/lambda) - M(lambda)
    double max_ratio = 0.0;     // max of M(lambda) / (e*H(1/lambda))
    double worst_lambda = 0.0;
    std::size_t checked = 0;
};

// Verifies M(lambda) <= e * H(1/lambda) pointwise on the grid.
inline HeatBoundReport spectral_vs_heat_bound(const HomogeneousSpace& sp,
                                              std::span<const double> grid) {
    sp.validate();
    using K = HomogeneousSpace::Kind;
    // Internal curve for the heat transform; exact tails make the unbounded
    // cases cheap while bounded spectra get a fine grid up to the top.
    SpectralMassCurve curve;
    double lam_max = 0.0;
    for (double l : grid) lam_max = std::max(lam_max, l);
    switch (sp.kind) {
        case K::Euclidean:
        case K::Heisenberg: {
            std::vector<double> g{0.0};
            curve = sample_mass_curve(sp, g);
            break;
        }
        case K::Lattice:
        case K::Tree: {
            const double top = sp.kind == K::Lattice ? 4.0 * sp.n : tree_spectrum_top(sp.q);
            std::vector<double> g;
            const int npts = 2000;
            for (int i = 0; i <= npts; ++i) g.push_back(top * i / static_cast<double>(npts));
            curve = sample_mass_curve(sp, g);
            break;
        }
        case K::Hyperbolic: {
            const double top = std::max(4.0 * lam_max, 100.0);
            std::vector<double> g;
            const int npts = 2000;
            for (int i = 0; i <= npts; ++i) g.push_back(top * i / static_cast<double>(npts));
            curve = sample_mass_curve(sp, g);
            break;
        }
    }

    HeatBoundReport rep;
    rep.min_slack = std::numeric_limits<double>::infinity();
    for (double lam : grid) {
        if (!(lam > 0.0)) continue;
        const double m = homogeneous_mass(sp, lam);
        const double rhs = M_E * heat_transform(curve, 1.0 / lam);
        const double slack = rhs - m;
        const double ratio = rhs > 0.0 ? m / rhs : (m > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        ++rep.checked;
        if (slack < rep.min_slack) {
            rep.min_slack = slack;
            rep.worst_lambda = lam;
        }
        rep.max_ratio = std::max(rep.max_ratio, ratio);
        if (slack < 0.0)
            throw BoundViolated("spectral_vs_heat_bound: M(lambda) > e*H(1/lambda) at lambda=" +
                                std::to_string(lam));
    }
    return rep;
}

} // namespace spectramass
