#pragma once

#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

namespace igstab {

// Pairwise (cascade) summation.  Deterministic reduction order independent of
// any threading, accumulated error O(log n) ulps instead of O(n).
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.subspan(0, half)) + pairwise_sum(xs.subspan(half));
}

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    if (n == 1) { xs[0] = lo; return xs; }
    const double h = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = lo + h * i;
    xs.back() = hi;
    return xs;
}

// Derivative at the middle node of a 3-point stencil, spacing possibly
// nonuniform.  Second order in max(h0, h1).
inline double central_derivative(double x0, double x1, double x2,
                                 double f0, double f1, double f2) {
    const double h0 = x1 - x0, h1 = x2 - x1;
    return (f2 * h0 * h0 - f0 * h1 * h1 - f1 * (h0 * h0 - h1 * h1)) /
           (h0 * h1 * (h0 + h1));
}

// Derivative at the first node of a 3-point one-sided stencil (x0, x1, x2
// monotone).  Second order; reduces to (-3f0 + 4f1 - f2) / (2h) when uniform.
inline double one_sided_derivative(double x0, double x1, double x2,
                                   double f0, double f1, double f2) {
    const double h0 = x1 - x0, h1 = x2 - x1;
    return -f0 * (2.0 * h0 + h1) / (h0 * (h0 + h1)) + f1 * (h0 + h1) / (h0 * h1) -
           f2 * h0 / (h1 * (h0 + h1));
}

// Shortest decimal text that round-trips a double (17 significant digits).
inline std::string format_sig(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Dense row-major matrix, just storage plus indexing.
struct RowMatrix {
    int rows = 0, cols = 0;
    std::vector<double> v;

    RowMatrix() = default;
    RowMatrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, fill) {}

    double& operator()(int i, int j) { return v[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return v[static_cast<std::size_t>(i) * cols + j]; }
};

}  // namespace igstab
