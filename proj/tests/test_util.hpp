#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace testutil {

// Plain trapezoid rule on a uniform grid; used as an independent check on
// the library's adaptive quadrature.
inline double trapezoid(const std::function<double(double)>& f, double a, double b, long n) {
    const double h = (b - a) / static_cast<double>(n);
    double s = 0.5 * (f(a) + f(b));
    for (long i = 1; i < n; ++i) s += f(a + h * static_cast<double>(i));
    return s * h;
}

inline bool multiset_close(std::vector<double> a, std::vector<double> b, double tol) {
    if (a.size() != b.size()) return false;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::fabs(a[i] - b[i]) > tol) return false;
    return true;
}

} // namespace testutil
