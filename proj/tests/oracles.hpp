#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "heatmv/types.hpp"

namespace oracle {

using heatmv::SpaceTimePoint;
using heatmv::SpatialVector;
using heatmv::Time;

inline SpaceTimePoint random_point(std::mt19937_64& rng, std::size_t n, double xmax, double tmax) {
    std::uniform_real_distribution<double> ux(-xmax, xmax), ut(-tmax, tmax);
    SpaceTimePoint p{SpatialVector(n), 0};
    for (std::size_t i = 0; i < n; ++i) p.x[i] = ux(rng);
    p.t = ut(rng);
    return p;
}

/// Simpson's rule on [a, b] with an even number of panels.
template <class F>
double simpson(F&& f, double a, double b, int panels) {
    if (panels % 2) ++panels;
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += (i % 2 ? 4 : 2) * f(a + i * h);
    return s * h / 3;
}

/// Least-squares slope of y against x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (sxy - sx * sy / n) / (sxx - sx * sx / n);
}

/// Observed order from errors at h and h/2.
inline double order(double e_coarse, double e_fine) { return std::log2(e_coarse / e_fine); }

/// Hand-rolled heat mean-value constants for the tsq fixture f = -t - t^2 (n = 1):
/// E[tau] and E[tau^2] under the normalized classical kernel on Omega(.; r).
inline double tsq_residual(double t0, double r) {
    const double a1 = std::pow(3.0, -2.5), a2 = std::pow(5.0, -2.5);
    return -(1 + 2 * t0) * r * a1 + r * r * a2;
}

}  // namespace oracle
