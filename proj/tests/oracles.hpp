// Test-side oracles: quadrature, finite differences and closed forms used to
// freeze expected values. Independent of the library implementation paths.
#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracles {

// Composite Simpson quadrature on [a, b] with n panels (n even).
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// Second-order central difference of a scalar function of time.
inline double central_diff(const std::function<double(double)>& f, double t, double h) {
    return (f(t + h) - f(t - h)) / (2.0 * h);
}

// Fourth-order central difference.
inline double central_diff4(const std::function<double(double)>& f, double t, double h) {
    return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12.0 * h);
}

// Deterministic uniform samples in [-1, 1].
inline std::vector<double> random_field(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = unit(rng);
    return v;
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

}  // namespace oracles
