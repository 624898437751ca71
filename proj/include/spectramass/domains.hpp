#pragma once

// Spectral mass by spatial averaging on inhomogeneous spaces: the half-line
// with a reflecting endpoint and families of disjoint cubes.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "spectramass/errors.hpp"
#include "spectramass/numerics.hpp"

namespace spectramass {

enum class BoundaryCondition { Dirichlet, Neumann };

inline const char* to_string(BoundaryCondition bc) {
    return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann";
}

// ---------------------------------------------------------------------------
// Half-line

// Diagonal of the spectral projection kernel at x > 0: the full-line value
// sqrt(lambda)/pi plus a reflection term with sign +1 (Neumann) or -1
// (Dirichlet). Written through sinc so lambda = 0 and small arguments are
// exact limits rather than 0/0.
inline double halfline_kernel_diag(double lambda, double x, BoundaryCondition bc) {
    if (!(lambda >= 0.0) || !(x > 0.0))
        throw std::invalid_argument("halfline_kernel_diag: lambda >= 0, x > 0");
    const double root = std::sqrt(lambda);
    const double sign = bc == BoundaryCondition::Neumann ? 1.0 : -1.0;
    return root / M_PI * (1.0 + sign * sinc(2.0 * root * x));
}

// Average of the kernel diagonal over [0, R]. The reflection part is an
// oscillatory sinc integral, handled with a frequency-matched composite rule
// cross-checked at half the step.
inline double halfline_mass(double lambda, double R, BoundaryCondition bc) {
    if (!(lambda >= 0.0) || !(R > 0.0))
        throw std::invalid_argument("halfline_mass: lambda >= 0, R > 0");
    if (lambda == 0.0) return 0.0;
    const double root = std::sqrt(lambda);
    const double sign = bc == BoundaryCondition::Neumann ? 1.0 : -1.0;
    auto refl = [&](double x) { return sinc(2.0 * root * x); };
    // >= 16 intervals per oscillation period.
    const double period = M_PI / root;
    long n = static_cast<long>(std::ceil(R / period * 16.0));
    n = std::max(n, 64L);
    if (n > 80'000'000L) throw NonConvergent("halfline_mass: oscillation count too large");
    const double coarse = integrate_fixed(refl, 0.0, R, n);
    const double fine = integrate_fixed(refl, 0.0, R, 2 * n);
    if (std::fabs(fine - coarse) > 1e-7 * std::max(1.0, std::fabs(fine)))
        throw NonConvergent("halfline_mass: quadrature failed to settle");
    return root / M_PI + sign * fine / R * root / M_PI;
}

// ---------------------------------------------------------------------------
// Disjoint cube families

struct CubeFamily {
    std::vector<double> sides;
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    int n = 1;

    void validate() const {
        if (sides.empty()) throw std::invalid_argument("CubeFamily: needs at least one cube");
        if (n < 1) throw std::invalid_argument("CubeFamily: dimension >= 1");
        for (double s : sides)
            if (!(s > 0.0)) throw std::invalid_argument("CubeFamily: sides must be positive");
    }
};

namespace detail {

// #{ k in Z^m : k_i >= kmin, |k|^2 <= r2 } by direct enumeration with a
// closed-form innermost axis.
inline long long lattice_ball_count(int m, double r2, int kmin) {
    if (r2 < 0.0) return 0;
    if (m == 1) {
        const double r = std::sqrt(r2);
        const long long hi = static_cast<long long>(std::floor(r + 1e-12));
        return hi < kmin ? 0 : hi - kmin + 1;
    }
    long long total = 0;
    const long long hi = static_cast<long long>(std::floor(std::sqrt(r2) + 1e-12));
    for (long long k = kmin; k <= hi; ++k)
        total += lattice_ball_count(m - 1, r2 - static_cast<double>(k) * k, kmin);
    return total;
}

} // namespace detail

// Eigenvalue counting function of the Laplacian on a cube of side s:
// modes (pi/s)^2 |k|^2 with k_i >= 1 (Dirichlet) or k_i >= 0 (Neumann).
inline long long cube_counting(double s, int n, BoundaryCondition bc, double lambda) {
    if (!(s > 0.0) || n < 1 || !(lambda >= 0.0))
        throw std::invalid_argument("cube_counting: s > 0, n >= 1, lambda >= 0");
    const double radius = s * std::sqrt(lambda) / M_PI;
    if (radius > 1e4)
        throw std::invalid_argument("cube_counting: per-axis enumeration cap (1e4) exceeded");
    const int kmin = bc == BoundaryCondition::Dirichlet ? 1 : 0;
    // |k|^2 is an integer; a 1e-7 absolute pad keeps boundary modes counted
    // through the rounding of s^2 lambda / pi^2 without reaching the next one.
    return detail::lattice_ball_count(n, radius * radius + 1e-7, kmin);
}

struct AverageLimits {
    double m_plus = 0.0;
    double m_minus = 0.0;
    std::vector<double> partial;  // partial averages per truncation
    std::size_t window_begin = 0; // limsup/liminf estimated over [window_begin, end)
};

// Running averages sum N_j(lambda) / sum s_j^n over the first N cubes, with
// limsup/liminf estimated over a trailing window (last 20% of truncations).
inline AverageLimits cube_family_mass(const CubeFamily& fam, double lambda,
                                      std::size_t n_truncations = 0) {
    fam.validate();
    std::size_t count = n_truncations == 0 ? fam.sides.size()
                                           : std::min(n_truncations, fam.sides.size());
    AverageLimits out;
    out.partial.reserve(count);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
        num += static_cast<double>(cube_counting(fam.sides[j], fam.n, fam.bc, lambda));
        den += std::pow(fam.sides[j], fam.n);
        out.partial.push_back(num / den);
    }
    out.window_begin = count - std::max<std::size_t>(1, count / 5);
    double lo = out.partial[out.window_begin], hi = lo;
    for (std::size_t j = out.window_begin; j < count; ++j) {
        lo = std::min(lo, out.partial[j]);
        hi = std::max(hi, out.partial[j]);
    }
    out.m_plus = hi;
    out.m_minus = lo;
    return out;
}

// Convenience side-length generators for the family experiments.
inline std::vector<double> cube_sides_equal(std::size_t count, double s) {
    return std::vector<double>(count, s);
}

// s_j = j^p (p = 1/n keeps volumes growing linearly).
inline std::vector<double> cube_sides_power(std::size_t count, double p) {
    std::vector<double> v(count);
    for (std::size_t j = 0; j < count; ++j) v[j] = std::pow(static_cast<double>(j + 1), p);
    return v;
}

// s_j = 1/j, the classic degenerate family.
inline std::vector<double> cube_sides_shrinking(std::size_t count) {
    std::vector<double> v(count);
    for (std::size_t j = 0; j < count; ++j) v[j] = 1.0 / static_cast<double>(j + 1);
    return v;
}

} // namespace spectramass
