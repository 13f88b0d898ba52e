#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "leadflux/calendar.hpp"

namespace leadflux::svg {

// All charts share one layout: a 720 x 420 canvas with the plot area inset 64 px on the
// left, 24 on the right, 48 at the top (title) and 56 at the bottom (tick labels and the
// x-axis caption). Coordinates are printed with two decimals so output is byte-stable.

struct LineSeries {
    std::string label;
    std::vector<YearMonth> months;
    std::vector<double> values;
};

// Multi-series monthly line chart with ticks at quarter starts (Jan, Apr, Jul, Oct).
void line_chart_monthly(std::ostream& out, const std::string& title, const std::string& y_label,
                        const std::vector<LineSeries>& series);

// Right-continuous step function y[k] on k = 0..n-1.
void step_chart(std::ostream& out, const std::string& title, const std::string& x_label, const std::string& y_label,
                const std::vector<double>& y);

// One bar per category.
void bar_chart(std::ostream& out, const std::string& title, const std::string& x_label, const std::string& y_label,
               const std::vector<std::string>& categories, const std::vector<double>& values);

} // namespace leadflux::svg
