#pragma once

#include <cmath>
#include <functional>

// Test-side numerics, kept independent of the library implementations they
// are used to check.
namespace testutil {

inline double simpson(const std::function<double(double)>& f, double a, double b) {
    const double m = 0.5 * (a + b);
    return (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
}

inline double adaptive_simpson_impl(const std::function<double(double)>& f, double a,
                                    double b, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = simpson(f, a, m);
    const double right = simpson(f, m, b);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson_impl(f, a, m, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_impl(f, m, b, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson quadrature of f over [a,b] to absolute tolerance tol.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    if (a == b) return 0.0;
    return adaptive_simpson_impl(f, a, b, simpson(f, a, b), tol, 40);
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

} // namespace testutil
