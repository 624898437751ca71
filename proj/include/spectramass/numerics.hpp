#pragma once

// Shared numerical kernels: adaptive quadrature, tail-bounded series
// summation, Bessel functions of the first kind, a dense symmetric
// eigensolver and a few scalar special functions. Everything here is a pure
// function of its inputs and safe to call concurrently.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "spectramass/errors.hpp"

namespace spectramass {

// ---------------------------------------------------------------------------
// Quadrature

struct Quadrature {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    long max_subdivisions = 1L << 20;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1)
            throw std::invalid_argument("Quadrature: tolerances must be positive, max_subdivisions >= 1");
    }
};

struct IntegralResult {
    double value = 0.0;
    double err_est = 0.0;
};

namespace detail {

struct SimpsonState {
    long budget;
    double abs_tol;
    double rel_tol;
    double scale_hint; // running |integral| estimate for the relative test
};

template <class Fn>
IntegralResult adaptive_simpson(Fn& f, double a, double fa, double b, double fb,
                                double fm, double whole, int depth, SimpsonState& st) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double h = b - a;
    const double left = h / 12.0 * (fa + 4.0 * flm + fm);
    const double right = h / 12.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    const double tol = std::max(st.abs_tol, st.rel_tol * std::fabs(st.scale_hint));
    // Factor 15 from the usual error cancellation of Simpson bisection.
    if (depth > 0 && std::fabs(delta) <= 15.0 * tol * (h > 0 ? h : 1.0)) {
        return {left + right + delta / 15.0, std::fabs(delta) / 15.0};
    }
    if (depth <= 0 || st.budget <= 0)
        throw NonConvergent("integrate: subdivision budget exhausted");
    st.budget -= 1;
    SimpsonState& s = st;
    IntegralResult l = adaptive_simpson(f, a, fa, m, fm, flm, left, depth - 1, s);
    IntegralResult r = adaptive_simpson(f, m, fm, b, fb, frm, right, depth - 1, s);
    return {l.value + r.value, l.err_est + r.err_est};
}

} // namespace detail

// Adaptive Simpson integration of f over [a, b]. The local acceptance test
// uses tolerance-per-unit-length so the global error is bounded by
// max(abs_tol, rel_tol * |I|) up to the usual fourth-order heuristics.
template <class Fn>
IntegralResult integrate_est(Fn&& f, double a, double b, const Quadrature& q = {}) {
    q.validate();
    if (!(a <= b)) throw std::invalid_argument("integrate: requires a <= b");
    if (a == b) return {0.0, 0.0};
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    detail::SimpsonState st{q.max_subdivisions, q.abs_tol / std::max(1.0, b - a),
                            q.rel_tol / std::max(1.0, b - a), whole};
    IntegralResult r = detail::adaptive_simpson(f, a, fa, b, fb, fm, whole, 64, st);
    return r;
}

template <class Fn>
double integrate(Fn&& f, double a, double b, const Quadrature& q = {}) {
    return integrate_est(std::forward<Fn>(f), a, b, q).value;
}

// Composite Simpson with a fixed step, for long oscillatory ranges where a
// frequency is known in advance. n_intervals is rounded up to even.
template <class Fn>
double integrate_fixed(Fn&& f, double a, double b, long n_intervals) {
    if (!(a <= b)) throw std::invalid_argument("integrate_fixed: requires a <= b");
    if (a == b || n_intervals < 1) return 0.0;
    if (n_intervals % 2) ++n_intervals;
    const double h = (b - a) / static_cast<double>(n_intervals);
    double s_odd = 0.0, s_even = 0.0;
    for (long i = 1; i < n_intervals; i += 2) s_odd += f(a + h * static_cast<double>(i));
    for (long i = 2; i < n_intervals; i += 2) s_even += f(a + h * static_cast<double>(i));
    return h / 3.0 * (f(a) + f(b) + 4.0 * s_odd + 2.0 * s_even);
}

// ---------------------------------------------------------------------------
// Series summation

// Sums term(0) + term(1) + ... until tail_bound(k) <= tol, where tail_bound(k)
// must bound the absolute remainder after the first k terms. Kahan
// compensation keeps the rounding error of long sums below the tolerance.
template <class TermFn, class TailFn>
double sum_series(TermFn&& term, TailFn&& tail_bound, double tol,
                  std::int64_t max_terms = (std::int64_t{1} << 33)) {
    if (!(tol > 0.0)) throw std::invalid_argument("sum_series: tol must be positive");
    double sum = 0.0, comp = 0.0;
    for (std::int64_t k = 0; k < max_terms; ++k) {
        const double y = term(k) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (tail_bound(k + 1) <= tol) return sum;
    }
    throw NonConvergent("sum_series: tail bound did not reach tolerance within the iteration cap");
}

// ---------------------------------------------------------------------------
// Bessel functions of the first kind, integer order

namespace detail {

inline double bessel_j_series(int order, double x) {
    // Ascending series; fine up to x ~ 12 where cancellation costs < 5 digits.
    const double half = 0.5 * x;
    double t;
    if (order < 24) {
        t = 1.0;
        for (int i = 1; i <= order; ++i) t *= half / static_cast<double>(i);
    } else {
        t = std::exp(static_cast<double>(order) * std::log(half) - std::lgamma(order + 1.0));
    }
    double sum = t;
    const double q2 = half * half;
    for (int m = 1; m <= 400; ++m) {
        t *= -q2 / (static_cast<double>(m) * static_cast<double>(m + order));
        sum += t;
        if (std::fabs(t) < 1e-18 * (std::fabs(sum) + 1e-300)) break;
    }
    return sum;
}

inline double bessel_j_miller(int order, double x) {
    // Downward recurrence normalized with J0 + 2*sum J_{2k} = 1.
    const int start = std::max(order, static_cast<int>(x)) + 25 +
                      static_cast<int>(4.0 * std::sqrt(std::max(1.0, x)));
    double fp1 = 0.0, fm = 1e-300; // proxies for J_{start+1}, J_{start}
    double norm = 0.0, result = (order == start) ? fm : 0.0;
    if (start > 0 && start % 2 == 0) norm += fm;
    for (int m = start; m >= 1; --m) {
        const double fm1 = (2.0 * m / x) * fm - fp1;
        fp1 = fm;
        fm = fm1; // fm = J_{m-1} proxy
        if (std::fabs(fm) > 1e250) { // rescale to dodge overflow
            fm *= 1e-250;
            fp1 *= 1e-250;
            norm *= 1e-250;
            result *= 1e-250;
        }
        if (m - 1 == order) result = fm;
        if (m - 1 > 0 && (m - 1) % 2 == 0) norm += fm;
    }
    norm = 2.0 * norm + fm; // fm = J_0 proxy
    return result / norm;
}

} // namespace detail

// J_order(x) for integer order >= 0 and x >= 0.
inline double bessel_j(int order, double x) {
    if (order < 0 || !(x >= 0.0))
        throw std::invalid_argument("bessel_j: requires order >= 0 and x >= 0");
    if (x == 0.0) return order == 0 ? 1.0 : 0.0;
    if (x < 12.0) return detail::bessel_j_series(order, x);
    return detail::bessel_j_miller(order, x);
}

// Hankel-type large-argument evaluation of J_order(x)^2, used by radial
// quadratures that sweep far beyond the oscillatory onset. Accurate to
// ~1e-10 once x >= max(30, order^2 / 2).
inline double bessel_j_sq_asymptotic(int order, double x) {
    const double mu = 4.0 * static_cast<double>(order) * static_cast<double>(order);
    const double ix = 1.0 / (8.0 * x);
    double p = 1.0, q = 0.0, term = 1.0;
    for (int k = 1; k <= 12; ++k) {
        const double f = mu - static_cast<double>(2 * k - 1) * static_cast<double>(2 * k - 1);
        term *= f * ix / static_cast<double>(k);
        if (k % 2 == 1)
            q += (((k - 1) / 2) % 2 == 0) ? term : -term;
        else
            p += ((k / 2) % 2 == 0) ? term : -term;
        if (std::fabs(term) < 1e-16) break;
    }
    const double w = x - (0.5 * order + 0.25) * M_PI;
    const double c = std::cos(w), s = std::sin(w);
    const double a = p * c - q * s;
    return 2.0 / (M_PI * x) * a * a;
}

inline double bessel_asymptotic_onset(int order) {
    return std::max(30.0, 0.5 * static_cast<double>(order) * static_cast<double>(order));
}

// ---------------------------------------------------------------------------
// Scalar helpers

inline double sinc(double x) {
    if (std::fabs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
    }
    return std::sin(x) / x;
}

namespace detail {

inline double gamma_p_series(double s, double x) {
    double ap = s, sum = 1.0 / s, del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16)
            return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
    }
    throw NonConvergent("incomplete gamma series failed");
}

inline double gamma_q_contfrac(double s, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - s, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16)
            return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
    }
    throw NonConvergent("incomplete gamma continued fraction failed");
}

} // namespace detail

// Regularized upper incomplete gamma Q(s, x) = Gamma(s, x) / Gamma(s).
inline double gamma_q(double s, double x) {
    if (!(s > 0.0) || !(x >= 0.0)) throw std::invalid_argument("gamma_q: requires s > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < s + 1.0) return 1.0 - detail::gamma_p_series(s, x);
    return detail::gamma_q_contfrac(s, x);
}

// ---------------------------------------------------------------------------
// Dense symmetric eigensolver (cyclic Jacobi)

struct EigenDecomposition {
    int n = 0;
    std::vector<double> eigenvalues;  // ascending
    std::vector<double> vectors;      // row i holds the eigenvector of eigenvalues[i]
    double cluster_tol = 0.0;

    const double* eigenvector(int i) const { return vectors.data() + static_cast<std::size_t>(i) * n; }

    // Ranges [begin, end) of indices whose eigenvalues agree within cluster_tol.
    std::vector<std::pair<int, int>> clusters() const {
        std::vector<std::pair<int, int>> out;
        int start = 0;
        for (int i = 1; i <= n; ++i) {
            if (i == n || eigenvalues[i] - eigenvalues[i - 1] > cluster_tol) {
                out.emplace_back(start, i);
                start = i;
            }
        }
        return out;
    }

    int count_below(double lambda) const {
        return static_cast<int>(std::upper_bound(eigenvalues.begin(), eigenvalues.end(), lambda) -
                                eigenvalues.begin());
    }
};

struct SymEigOptions {
    int size_cap = 4096;
    double symmetry_tol = 1e-12;
    double cluster_tol_factor = 1e-8;
    int max_sweeps = 64;
};

// Full eigendecomposition of a dense symmetric matrix given as a flat
// row-major n*n array. Cyclic Jacobi with a threshold pass; quadratically
// convergent, and rotations keep the eigenvector basis orthonormal to
// machine precision.
inline EigenDecomposition sym_eig(std::vector<double> a, int n, const SymEigOptions& opt = {}) {
    if (n < 0 || a.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
        throw std::invalid_argument("sym_eig: matrix size mismatch");
    if (n > opt.size_cap) throw TooLarge("sym_eig: dimension exceeds configured cap");
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::fabs(v));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double d = std::fabs(a[i * static_cast<std::size_t>(n) + j] -
                                       a[j * static_cast<std::size_t>(n) + i]);
            if (d > opt.symmetry_tol * std::max(1.0, scale))
                throw NotSymmetric("sym_eig: input matrix is not symmetric");
        }

    EigenDecomposition out;
    out.n = n;
    if (n == 0) return out;

    std::vector<double>& m = a; // work in place; only the upper triangle is kept current
    std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) v[i * static_cast<std::size_t>(n) + i] = 1.0;
    const std::size_t N = static_cast<std::size_t>(n);

    double prev_off = std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += m[p * N + q] * m[p * N + q];
        const double eps = std::numeric_limits<double>::epsilon();
        const double floor_off = eps * eps * scale * scale * static_cast<double>(n) * n;
        if (off <= 1e-300 || off <= floor_off || off >= prev_off) break;
        prev_off = off;
        const double thresh = (sweep < 3) ? 0.2 * off / (static_cast<double>(n) * n) : 0.0;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = m[p * N + q];
                if (apq * apq <= thresh) continue;
                if (std::fabs(apq) < 1e-300) { m[p * N + q] = 0.0; continue; }
                const double app = m[p * N + p], aqq = m[q * N + q];
                const double theta = 0.5 * (aqq - app) / apq;
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);
                m[p * N + p] = app - t * apq;
                m[q * N + q] = aqq + t * apq;
                m[p * N + q] = 0.0;
                for (int i = 0; i < p; ++i) {
                    const double g = m[i * N + p], h = m[i * N + q];
                    m[i * N + p] = g - s * (h + g * tau);
                    m[i * N + q] = h + s * (g - h * tau);
                }
                for (int i = p + 1; i < q; ++i) {
                    const double g = m[p * N + i], h = m[i * N + q];
                    m[p * N + i] = g - s * (h + g * tau);
                    m[i * N + q] = h + s * (g - h * tau);
                }
                for (int i = q + 1; i < n; ++i) {
                    const double g = m[p * N + i], h = m[q * N + i];
                    m[p * N + i] = g - s * (h + g * tau);
                    m[q * N + i] = h + s * (g - h * tau);
                }
                double* vp = &v[p * N];
                double* vq = &v[q * N];
                for (int i = 0; i < n; ++i) {
                    const double g = vp[i], h = vq[i];
                    vp[i] = g - s * (h + g * tau);
                    vq[i] = h + s * (g - h * tau);
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return m[i * N + i] < m[j * N + j]; });

    out.eigenvalues.resize(n);
    out.vectors.resize(N * n);
    double radius = 0.0;
    for (int i = 0; i < n; ++i) {
        out.eigenvalues[i] = m[order[i] * N + order[i]];
        radius = std::max(radius, std::fabs(out.eigenvalues[i]));
        std::copy_n(&v[order[i] * N], n, &out.vectors[i * N]);
    }
    out.cluster_tol = opt.cluster_tol_factor * std::max(radius, 1e-300);
    return out;
}

} // namespace spectramass
