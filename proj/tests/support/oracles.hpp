#pragma once

// Brute-force reference computations used only by tests. Each one takes a different
// route from the library code it checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Total variation as the positive part of a - b, summed after sorting pairs by
// index into a map (no shared code with the half-L1 implementation).
inline double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
    std::map<std::size_t, double> diff;
    for (std::size_t k = 0; k < a.size(); ++k) diff[k] += a[k];
    for (std::size_t k = 0; k < b.size(); ++k) diff[k] -= b[k];
    double pos = 0.0, neg = 0.0;
    for (const auto& [k, v] : diff) (v > 0 ? pos : neg) += std::abs(v);
    return 0.5 * (pos + neg);
}

// Smallest k in 0..max whose empirical CDF reaches p, by counting from scratch for every k.
inline int ecdf_cutoff(const std::vector<int>& xs, double p) {
    const int hi = *std::max_element(xs.begin(), xs.end());
    for (int k = 0; k <= hi; ++k) {
        std::size_t c = std::count_if(xs.begin(), xs.end(), [k](int x) { return x <= k; });
        if (static_cast<double>(c) / static_cast<double>(xs.size()) >= p) return k;
    }
    return hi;
}

// Type-7 quantile written as x[j] + g (x[j+1] - x[j]) with 1-based j = floor(1 + (n-1)p).
inline double quantile7(std::vector<double> x, double p) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    const double pos = 1.0 + (n - 1.0) * p;
    const auto j = static_cast<std::size_t>(std::floor(pos));
    const double g = pos - static_cast<double>(j);
    if (j >= x.size()) return x.back();
    return x[j - 1] + g * (x[j] - x[j - 1]);
}

// Local polynomial value at x0 by an explicit QR solve of the weighted design matrix.
// Neighborhood and tricube weights follow the same definition as the smoother:
// the `window` nearest points (ties to the left), h widened by (window - n) / 2
// spacings when window > n.
inline double loess_point(const std::vector<double>& x, const std::vector<double>& y, int window, int degree,
                          const std::vector<double>& robust, double x0) {
    const std::size_t n = x.size(), q = static_cast<std::size_t>(window), m = std::min(q, n);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(x[a] - x0) < std::abs(x[b] - x0);
    });
    idx.resize(m);
    double h = 0.0;
    for (auto i : idx) h = std::max(h, std::abs(x[i] - x0));
    if (q > n) h += static_cast<double>((q - n) / 2) * (x.back() - x.front()) / static_cast<double>(n - 1);

    Eigen::MatrixXd A(m, degree + 1);
    Eigen::VectorXd rhs(m);
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t i = idx[r];
        const double u = std::abs(x[i] - x0) / h;
        double w = u < 1.0 ? std::pow(1.0 - u * u * u, 3) : 0.0;
        if (!robust.empty()) w *= robust[i];
        const double sw = std::sqrt(w);
        for (int d = 0; d <= degree; ++d) A(static_cast<Eigen::Index>(r), d) = sw * std::pow(x[i] - x0, d);
        rhs(static_cast<Eigen::Index>(r)) = sw * y[i];
    }
    Eigen::VectorXd beta = A.colPivHouseholderQr().solve(rhs);
    return beta(0);
}

// Bisquare robustness weights with h = 6 * median |r|, median taken by nth_element.
inline std::vector<double> bisquare(const std::vector<double>& r) {
    std::vector<double> a(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) a[i] = std::abs(r[i]);
    auto lo = a, hi = a;
    const std::size_t n = a.size();
    std::nth_element(lo.begin(), lo.begin() + static_cast<std::ptrdiff_t>((n - 1) / 2), lo.end());
    std::nth_element(hi.begin(), hi.begin() + static_cast<std::ptrdiff_t>(n / 2), hi.end());
    const double h = 3.0 * (lo[(n - 1) / 2] + hi[n / 2]);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = h > 0 ? a[i] / h : (a[i] == 0 ? 0.0 : 1.0);
        w[i] = u < 1.0 ? std::pow(1.0 - u * u, 2) : 0.0;
    }
    return w;
}

inline double mae(const std::vector<double>& a, const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - f[i]);
    return s / static_cast<double>(a.size());
}

// Seasonal-naive MASE by building the naive forecast vector explicitly.
inline double mase(const std::vector<double>& a, const std::vector<double>& f, const std::vector<double>& ins, int m) {
    std::vector<double> naive, target;
    for (std::size_t t = static_cast<std::size_t>(m); t < ins.size(); ++t) {
        naive.push_back(ins[t - static_cast<std::size_t>(m)]);
        target.push_back(ins[t]);
    }
    return mae(a, f) / mae(target, naive);
}

inline double smape(const std::vector<double>& a, const std::vector<double>& f) {
    double s = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double den = std::abs(a[i]) + std::abs(f[i]);
        if (den == 0.0) continue;
        s += std::abs(f[i] - a[i]) / (den / 2.0);
        ++n;
    }
    return s / n;
}

// Pinball loss as max(tau (a - q), (tau - 1)(a - q)).
inline double pinball(const std::vector<double>& a, const std::vector<double>& q, double tau) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::max(tau * (a[i] - q[i]), (tau - 1.0) * (a[i] - q[i]));
    return s / static_cast<double>(a.size());
}

} // namespace oracle
