#include <algorithm>
#include <cmath>

#include "leadflux/error.hpp"
#include "leadflux/stl.hpp"

namespace leadflux {

namespace {

// Solves the 3x3 system A z = b by Gaussian elimination with partial pivoting.
bool solve3(double a[3][3], double b[3], double z[3]) {
    int p[3] = {0, 1, 2};
    for (int c = 0; c < 3; ++c) {
        int best = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(a[p[r]][c]) > std::abs(a[p[best]][c])) best = r;
        std::swap(p[c], p[best]);
        double piv = a[p[c]][c];
        if (std::abs(piv) < 1e-300) return false;
        for (int r = c + 1; r < 3; ++r) {
            double f = a[p[r]][c] / piv;
            for (int k = c; k < 3; ++k) a[p[r]][k] -= f * a[p[c]][k];
            b[p[r]] -= f * b[p[c]];
        }
    }
    for (int c = 2; c >= 0; --c) {
        double s = b[p[c]];
        for (int k = c + 1; k < 3; ++k) s -= a[p[c]][k] * z[k];
        z[c] = s / a[p[c]][c];
    }
    return true;
}

// Weighted polynomial fit in t = x - x0, evaluated at t = 0.
double local_fit(std::span<const double> x, std::span<const double> y, std::span<const double> w, std::size_t lo,
                 std::size_t hi, double x0, int degree) {
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, t0 = 0, t1 = 0, t2 = 0;
    for (std::size_t j = lo; j < hi; ++j) {
        double t = x[j] - x0, wj = w[j - lo];
        s0 += wj;
        s1 += wj * t;
        s2 += wj * t * t;
        s3 += wj * t * t * t;
        s4 += wj * t * t * t * t;
        t0 += wj * y[j];
        t1 += wj * t * y[j];
        t2 += wj * t * t * y[j];
    }
    const double ybar = t0 / s0;
    if (degree == 0) return ybar;

    const double tbar = s1 / s0;
    const double sxx = s2 - s0 * tbar * tbar;
    const double spread = std::max(std::abs(x[lo] - x0), std::abs(x[hi - 1] - x0));
    // Too few distinct weighted abscissae for a slope: drop to a local mean.
    if (!(sxx > 1e-10 * s0 * std::max(spread * spread, 1e-300))) return ybar;
    if (degree == 1) {
        const double sxy = t1 - s0 * tbar * ybar;
        return ybar - (sxy / sxx) * tbar;
    }
    double a[3][3] = {{s0, s1, s2}, {s1, s2, s3}, {s2, s3, s4}};
    double b[3] = {t0, t1, t2};
    double z[3] = {0, 0, 0};
    if (!solve3(a, b, z) || !std::isfinite(z[0])) {
        const double sxy = t1 - s0 * tbar * ybar;
        return ybar - (sxy / sxx) * tbar;
    }
    return z[0];
}

} // namespace

std::vector<double> loess_fit(std::span<const double> x, std::span<const double> y, int window, int degree,
                              std::span<const double> weights, std::span<const double> at) {
    const std::size_t n = x.size();
    if (n == 0 || y.size() != n || (!weights.empty() && weights.size() != n))
        throw InvalidConfig("loess: x, y and weights must be non-empty and of equal length");
    if (window < 1) throw InvalidConfig("loess: window must be positive");
    if (degree < 0 || degree > 2) throw InvalidConfig("loess: degree must be 0, 1 or 2");

    const auto q = static_cast<std::size_t>(window);
    const std::size_t m = std::min(q, n);
    const double spacing = n > 1 ? (x[n - 1] - x[0]) / static_cast<double>(n - 1) : 1.0;

    std::vector<double> out(at.size());
    std::vector<double> w(m);
    for (std::size_t i = 0; i < at.size(); ++i) {
        const double x0 = at[i];
        // Grow [lo, hi) to the m nearest abscissae; ties go left.
        std::size_t hi = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), x0) - x.begin());
        std::size_t lo = hi;
        while (hi - lo < m) {
            if (lo == 0) ++hi;
            else if (hi == n) --lo;
            else if (x0 - x[lo - 1] <= x[hi] - x0) --lo;
            else ++hi;
        }
        double h = std::max(x0 - x[lo], x[hi - 1] - x0);
        if (q > n) h += static_cast<double>((q - n) / 2) * spacing;

        double wsum = 0.0;
        for (std::size_t j = lo; j < hi; ++j) {
            double r = std::abs(x[j] - x0);
            double wj;
            if (h <= 0.0) wj = r == 0.0 ? 1.0 : 0.0;
            else if (r < h) {
                double u = r / h;
                double c = 1.0 - u * u * u;
                wj = c * c * c;
            } else wj = 0.0;
            if (!weights.empty()) wj *= weights[j];
            w[j - lo] = wj;
            wsum += wj;
        }
        if (!(wsum > 0.0)) {
            double s = 0.0;
            for (std::size_t j = lo; j < hi; ++j) s += y[j];
            out[i] = s / static_cast<double>(hi - lo);
            continue;
        }
        out[i] = local_fit(x, y, w, lo, hi, x0, degree);
    }
    return out;
}

} // namespace leadflux
