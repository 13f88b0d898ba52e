#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "leadflux/csv.hpp"
#include "leadflux/error.hpp"
#include "leadflux/stl.hpp"

namespace leadflux {

namespace {

int next_odd(double v) {
    auto n = static_cast<int>(std::ceil(v));
    return n % 2 == 0 ? n + 1 : n;
}

std::vector<double> moving_average(std::span<const double> x, std::size_t len) {
    std::vector<double> out(x.size() - len + 1);
    double s = std::accumulate(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(len), 0.0);
    out[0] = s / static_cast<double>(len);
    for (std::size_t i = 1; i < out.size(); ++i) {
        s += x[i + len - 1] - x[i - 1];
        out[i] = s / static_cast<double>(len);
    }
    return out;
}

std::vector<double> positions(std::size_t n, double first = 0.0) {
    std::vector<double> p(n);
    std::iota(p.begin(), p.end(), first);
    return p;
}

void validate(const StlParams& p, std::size_t n) {
    auto odd_window = [](int w) { return w >= 3 && w % 2 == 1; };
    if (p.period < 2) throw InvalidConfig("stl: period must be at least 2");
    if (p.seasonal_window && !odd_window(*p.seasonal_window))
        throw InvalidConfig("stl: seasonal window must be odd and at least 3");
    if (!odd_window(p.trend_window) || !odd_window(p.lowpass_window))
        throw InvalidConfig("stl: trend and lowpass windows must be odd and at least 3");
    for (int d : {p.seasonal_degree, p.trend_degree, p.lowpass_degree})
        if (d < 0 || d > 2) throw InvalidConfig("stl: loess degrees must be 0, 1 or 2");
    if (p.inner_iterations < 1 || p.outer_iterations < 0) throw InvalidConfig("stl: bad iteration counts");
    if (n < 2 * static_cast<std::size_t>(p.period))
        throw SeriesTooShort("stl: series of length " + std::to_string(n) + " is shorter than two periods");
}

// One pass of the inner loop: updates seasonal and trend in place.
void inner_pass(std::span<const double> y, const StlParams& p, int seasonal_window, std::span<const double> rw,
                std::vector<double>& seasonal, std::vector<double>& trend) {
    const std::size_t n = y.size();
    const auto np = static_cast<std::size_t>(p.period);

    // Cycle-subseries smoothing of the detrended series, extended one cycle each side.
    std::vector<double> cycle(n + 2 * np, 0.0);
    for (std::size_t j = 0; j < np; ++j) {
        std::vector<double> sub, subw;
        for (std::size_t t = j; t < n; t += np) {
            sub.push_back(y[t] - trend[t]);
            if (!rw.empty()) subw.push_back(rw[t]);
        }
        const std::size_t k = sub.size();
        auto px = positions(k, 1.0);
        auto at = positions(k + 2, 0.0);
        auto fit = loess_fit(px, sub, seasonal_window, p.seasonal_degree, subw, at);
        for (std::size_t i = 0; i < k + 2; ++i) cycle[j + i * np] = fit[i];
    }

    // Low-pass filter of the cycle-subseries: MA(np), MA(np), MA(3), then loess.
    auto lp = moving_average(moving_average(moving_average(cycle, np), np), 3);
    auto px = positions(n, 1.0);
    auto low = loess_smooth(px, lp, p.lowpass_window, p.lowpass_degree);

    for (std::size_t t = 0; t < n; ++t) seasonal[t] = cycle[np + t] - low[t];

    std::vector<double> deseason(n);
    for (std::size_t t = 0; t < n; ++t) deseason[t] = y[t] - seasonal[t];
    trend = loess_smooth(px, deseason, p.trend_window, p.trend_degree, rw);
}

} // namespace

StlParams StlParams::defaults(int period, std::size_t n, bool robust, std::optional<int> seasonal_window) {
    StlParams p;
    p.period = period;
    p.seasonal_window = seasonal_window;
    p.seasonal_degree = 0;
    const double sw = seasonal_window ? static_cast<double>(*seasonal_window) : 10.0 * static_cast<double>(n) + 1.0;
    p.trend_window = next_odd(1.5 * period / (1.0 - 1.5 / sw));
    p.lowpass_window = next_odd(period);
    p.robust = robust;
    p.inner_iterations = robust ? 1 : 2;
    p.outer_iterations = robust ? 15 : 0;
    return p;
}

std::vector<double> bisquare_weights(std::span<const double> residuals) {
    std::vector<double> abs_r(residuals.size());
    std::transform(residuals.begin(), residuals.end(), abs_r.begin(), [](double r) { return std::abs(r); });
    std::vector<double> sorted = abs_r;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    const double h = 6.0 * median;
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (h <= 0.0) {
            w[i] = abs_r[i] == 0.0 ? 1.0 : 0.0;
            continue;
        }
        double u = abs_r[i] / h;
        w[i] = u < 1.0 ? (1.0 - u * u) * (1.0 - u * u) : 0.0;
    }
    return w;
}

StlResult stl_decompose(std::span<const double> series, const StlParams& params) {
    const std::size_t n = series.size();
    for (double v : series)
        if (!std::isfinite(v)) throw NonFiniteInput("stl: series contains a non-finite value");
    validate(params, n);

    const int seasonal_window = params.seasonal_window.value_or(static_cast<int>(10 * n + 1));
    StlResult r;
    r.params = params;
    r.trend.assign(n, 0.0);
    r.seasonal.assign(n, 0.0);
    std::vector<double> rw;

    const int outer = params.robust ? params.outer_iterations : 0;
    std::vector<double> resid(n);
    for (int k = 0;; ++k) {
        for (int i = 0; i < params.inner_iterations; ++i) inner_pass(series, params, seasonal_window, rw, r.seasonal, r.trend);
        if (k >= outer) break;
        for (std::size_t t = 0; t < n; ++t) resid[t] = series[t] - r.trend[t] - r.seasonal[t];
        rw = bisquare_weights(resid);
    }

    if (params.periodic()) {
        const auto np = static_cast<std::size_t>(params.period);
        for (std::size_t j = 0; j < np; ++j) {
            double s = 0.0;
            std::size_t c = 0;
            for (std::size_t t = j; t < n; t += np, ++c) s += r.seasonal[t];
            for (std::size_t t = j; t < n; t += np) r.seasonal[t] = s / static_cast<double>(c);
        }
    }
    r.remainder.resize(n);
    for (std::size_t t = 0; t < n; ++t) r.remainder[t] = series[t] - r.trend[t] - r.seasonal[t];
    r.robustness_weights = params.robust ? bisquare_weights(r.remainder) : std::vector<double>(n, 1.0);
    return r;
}

void write_stl_csv(std::ostream& out, const GroupKey& key, std::span<const YearMonth> months,
                   std::span<const double> observed, const StlResult& fit, bool header,
                   std::span<const std::string> group_cols) {
    if (header) {
        std::vector<std::string> h(group_cols.begin(), group_cols.end());
        for (const char* c : {"month", "observed", "trend", "seasonal", "remainder", "weight"}) h.emplace_back(c);
        csv::write_row(out, h);
    }
    for (std::size_t t = 0; t < observed.size(); ++t) {
        std::vector<std::string> row(key.begin(), key.end());
        row.push_back(months[t].str());
        row.push_back(csv::shortest(observed[t]));
        row.push_back(csv::shortest(fit.trend[t]));
        row.push_back(csv::shortest(fit.seasonal[t]));
        row.push_back(csv::shortest(fit.remainder[t]));
        row.push_back(csv::shortest(fit.robustness_weights[t]));
        csv::write_row(out, row);
    }
}

} // namespace leadflux
