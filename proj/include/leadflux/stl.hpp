#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "leadflux/calendar.hpp"

namespace leadflux {

// Locally weighted polynomial regression.
//
// For each evaluation point x0 the neighborhood is the `window` nearest abscissae
// (it shifts rather than shrinks at the edges); h is the distance to the farthest of
// them, widened by (window - n) / 2 spacings when window exceeds n. Neighbors get
// tricube weights (1 - (|x - x0| / h)^3)^3, multiplied by the optional robustness
// weights, and a weighted polynomial of `degree` (0, 1 or 2) is evaluated at x0.
// When every combined weight in a neighborhood is zero, the plain mean of the
// neighborhood's y values is returned instead. `x` must be sorted ascending.
std::vector<double> loess_fit(std::span<const double> x, std::span<const double> y, int window, int degree,
                              std::span<const double> weights, std::span<const double> at);

inline std::vector<double> loess_smooth(std::span<const double> x, std::span<const double> y, int window,
                                        int degree, std::span<const double> weights = {}) {
    return loess_fit(x, y, window, degree, weights, x);
}

struct StlParams {
    int period = 12;
    std::optional<int> seasonal_window; // empty means "periodic"
    int seasonal_degree = 0;
    int trend_window = 0;
    int trend_degree = 1;
    int lowpass_window = 0;
    int lowpass_degree = 1;
    int inner_iterations = 2;
    int outer_iterations = 0;
    bool robust = false;

    bool periodic() const { return !seasonal_window.has_value(); }

    // Conventional defaults: trend window is the next odd integer at or above
    // 1.5 * period / (1 - 1.5 / seasonal_window), lowpass window the next odd integer at
    // or above period; robust fits use 1 inner and 15 outer passes, otherwise 2 and 0.
    static StlParams defaults(int period, std::size_t n, bool robust = false,
                              std::optional<int> seasonal_window = std::nullopt);
};

struct StlResult {
    std::vector<double> trend;
    std::vector<double> seasonal;
    std::vector<double> remainder;
    std::vector<double> robustness_weights;
    StlParams params;
};

// Seasonal-trend decomposition by loess with inner (fitting) and outer (robustness)
// loops. In periodic mode the seasonal component is replaced by its cycle-subseries
// means. The remainder is always observed - trend - seasonal.
StlResult stl_decompose(std::span<const double> series, const StlParams& params);

// Bisquare weights from residuals: (1 - (r / 6 MAD')^2)^2, where MAD' is the median
// absolute residual; zero beyond.
std::vector<double> bisquare_weights(std::span<const double> residuals);

// CSV: <group cols>, month, observed, trend, seasonal, remainder, weight.
void write_stl_csv(std::ostream& out, const GroupKey& key, std::span<const YearMonth> months,
                   std::span<const double> observed, const StlResult& fit, bool header,
                   std::span<const std::string> group_cols);

} // namespace leadflux
