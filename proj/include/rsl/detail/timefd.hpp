// Fourth-order finite differences in time on [0, t_max), with one-sided
// stencils near the ends of the domain.
#pragma once

#include <cmath>
#include <limits>

namespace rsl::detail {

template <class F>
double fd4_time(F&& f, double t, double step, double t_max) {
    const bool room_above = !(t_max < std::numeric_limits<double>::infinity()) ||
                            t + 2.0 * step < t_max;
    if (t >= 2.0 * step && room_above) {
        return (-f(t + 2 * step) + 8 * f(t + step) - 8 * f(t - step) + f(t - 2 * step)) /
               (12.0 * step);
    }
    if (t < 2.0 * step) {
        return (-25 * f(t) + 48 * f(t + step) - 36 * f(t + 2 * step) + 16 * f(t + 3 * step) -
                3 * f(t + 4 * step)) /
               (12.0 * step);
    }
    return (25 * f(t) - 48 * f(t - step) + 36 * f(t - 2 * step) - 16 * f(t - 3 * step) +
            3 * f(t - 4 * step)) /
           (12.0 * step);
}

}  // namespace rsl::detail
