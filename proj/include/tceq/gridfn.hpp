#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

// Small helpers for functions sampled on a uniform time grid.
namespace tceq {

inline double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// I_k = int_0^{t_k} f dt. Trapezoid with the Euler-Maclaurin endpoint
// correction built from the known derivative values; O(h^4) cumulative.
inline std::vector<double> cum_integral(std::span<const double> f,
                                        std::span<const double> fprime, double h) {
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t k = 0; k + 1 < f.size(); ++k) {
        const double seg = 0.5 * h * (f[k] + f[k + 1]) -
                           h * h / 12.0 * (fprime[k + 1] - fprime[k]);
        out[k + 1] = out[k] + seg;
    }
    return out;
}

// I_k = int_{t_k}^{T} f dt, plain composite trapezoid.
inline std::vector<double> backward_cum_trapezoid(std::span<const double> f, double h) {
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t k = f.size() - 1; k-- > 0;) {
        out[k] = out[k + 1] + 0.5 * h * (f[k] + f[k + 1]);
    }
    return out;
}

// Values at cell midpoints t_k + h/2 by 4-point cubic interpolation
// (one-sided stencils at the ends). Requires at least 4 nodes.
inline std::vector<double> cubic_midpoints(std::span<const double> v) {
    const std::size_t n = v.size() - 1;
    std::vector<double> m(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (k == 0) {
            m[k] = (5.0 * v[0] + 15.0 * v[1] - 5.0 * v[2] + v[3]) / 16.0;
        } else if (k == n - 1) {
            m[k] = (5.0 * v[n] + 15.0 * v[n - 1] - 5.0 * v[n - 2] + v[n - 3]) / 16.0;
        } else {
            m[k] = (9.0 * (v[k] + v[k + 1]) - (v[k - 1] + v[k + 2])) / 16.0;
        }
    }
    return m;
}

// Cubic Hermite on one cell; s in [0,1] is the fractional position.
inline double hermite(double y0, double y1, double m0, double m1, double h, double s) {
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * h * m0 +
           (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * h * m1;
}

// Neumaier compensated accumulator; order-deterministic summation.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace tceq
