#include "leadflux/svg.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace leadflux::svg {

namespace {

constexpr double kWidth = 720, kHeight = 420;
constexpr double kLeft = 64, kRight = 24, kTop = 48, kBottom = 56;
constexpr double kPlotW = kWidth - kLeft - kRight, kPlotH = kHeight - kTop - kBottom;

const char* const kPalette[] = {"#1b6ca8", "#d1495b", "#2e933c", "#edae49", "#6c4f8c", "#00798c"};

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

// Rounds the axis top up to a 1/2/5 multiple and returns (top, tick step).
std::pair<double, double> nice_axis(double max_value) {
    if (!(max_value > 0.0)) return {1.0, 0.25};
    const double raw = max_value / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    return {std::ceil(max_value / step - 1e-9) * step, step};
}

struct Frame {
    std::ostream& out;
    double y_top;

    double py(double v) const { return kTop + kPlotH * (1.0 - v / y_top); }

    void open(const std::string& title, const std::string& x_label, const std::string& y_label, double y_step) {
        out << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{:.0f}" height="{:.0f}" viewBox="0 0 {:.0f} {:.0f}" font-family="sans-serif" font-size="11">)",
                           kWidth, kHeight, kWidth, kHeight)
            << '\n';
        out << fmt::format(R"(<rect x="0" y="0" width="{:.0f}" height="{:.0f}" fill="white"/>)", kWidth, kHeight) << '\n';
        out << fmt::format(R"(<text x="{:.2f}" y="24" text-anchor="middle" font-size="14">{}</text>)", kWidth / 2, esc(title))
            << '\n';
        for (double v = 0.0; v <= y_top + 1e-9; v += y_step) {
            out << fmt::format(R"(<line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="#e0e0e0"/>)", kLeft, py(v),
                               kLeft + kPlotW, py(v))
                << '\n';
            out << fmt::format(R"(<text x="{:.2f}" y="{:.2f}" text-anchor="end">{}</text>)", kLeft - 6, py(v) + 4,
                               fmt::format("{:.4g}", v))
                << '\n';
        }
        out << fmt::format(R"(<line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="black"/>)", kLeft, kTop + kPlotH,
                           kLeft + kPlotW, kTop + kPlotH)
            << '\n';
        out << fmt::format(R"(<line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="black"/>)", kLeft, kTop, kLeft,
                           kTop + kPlotH)
            << '\n';
        out << fmt::format(R"(<text x="{:.2f}" y="{:.2f}" text-anchor="middle">{}</text>)", kLeft + kPlotW / 2,
                           kHeight - 12, esc(x_label))
            << '\n';
        out << fmt::format(R"svg(<text x="16" y="{:.2f}" text-anchor="middle" transform="rotate(-90 16 {:.2f})">{}</text>)svg",
                           kTop + kPlotH / 2, kTop + kPlotH / 2, esc(y_label))
            << '\n';
    }

    void x_tick(double x, const std::string& label) {
        out << fmt::format(R"(<line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="black"/>)", x, kTop + kPlotH, x,
                           kTop + kPlotH + 4)
            << '\n';
        out << fmt::format(R"(<text x="{:.2f}" y="{:.2f}" text-anchor="middle">{}</text>)", x, kTop + kPlotH + 16, esc(label))
            << '\n';
    }

    void close() { out << "</svg>\n"; }
};

} // namespace

void line_chart_monthly(std::ostream& out, const std::string& title, const std::string& y_label,
                        const std::vector<LineSeries>& series) {
    int lo = 0, hi = 0;
    bool any = false;
    double vmax = 0.0;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.months.size(); ++i) {
            lo = any ? std::min(lo, s.months[i].index()) : s.months[i].index();
            hi = any ? std::max(hi, s.months[i].index()) : s.months[i].index();
            any = true;
            vmax = std::max(vmax, s.values[i]);
        }
    auto [top, step] = nice_axis(vmax);
    Frame f{out, top};
    f.open(title, "Arrival month", y_label, step);
    const double span = std::max(1, hi - lo);
    auto px = [&](int idx) { return kLeft + kPlotW * (idx - lo) / span; };
    if (any)
        for (int idx = lo; idx <= hi; ++idx) {
            auto ym = YearMonth::from_index(idx);
            if ((ym.month - 1) % 3 == 0) f.x_tick(px(idx), ym.str());
        }
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % std::size(kPalette)];
        std::string pts;
        for (std::size_t i = 0; i < series[s].months.size(); ++i) {
            // Break the polyline at gaps rather than bridging missing months.
            if (i && series[s].months[i].index() != series[s].months[i - 1].index() + 1) {
                out << fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>)", color, pts) << '\n';
                pts.clear();
            }
            if (!pts.empty()) pts += ' ';
            pts += fmt::format("{:.2f},{:.2f}", px(series[s].months[i].index()), f.py(series[s].values[i]));
        }
        if (!pts.empty())
            out << fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>)", color, pts) << '\n';
        const double ly = kTop + 12 + 14 * static_cast<double>(s);
        out << fmt::format(R"(<line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="{}" stroke-width="2"/>)",
                           kLeft + kPlotW - 90, ly - 4, kLeft + kPlotW - 74, ly - 4, color)
            << '\n';
        out << fmt::format(R"(<text x="{:.2f}" y="{:.2f}">{}</text>)", kLeft + kPlotW - 70, ly, esc(series[s].label)) << '\n';
    }
    f.close();
}

void step_chart(std::ostream& out, const std::string& title, const std::string& x_label, const std::string& y_label,
                const std::vector<double>& y) {
    Frame f{out, 1.0};
    f.open(title, x_label, y_label, 0.2);
    const double n = static_cast<double>(std::max<std::size_t>(y.size(), 1));
    auto px = [&](double k) { return kLeft + kPlotW * k / n; };
    const auto tick = std::max<std::size_t>(1, y.size() / 10);
    for (std::size_t k = 0; k < y.size(); k += tick) f.x_tick(px(static_cast<double>(k)), std::to_string(k));
    std::string pts;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double v = std::clamp(y[k], 0.0, 1.0);
        if (!pts.empty()) pts += ' ';
        pts += fmt::format("{:.2f},{:.2f} {:.2f},{:.2f}", px(static_cast<double>(k)), f.py(v), px(static_cast<double>(k + 1)),
                           f.py(v));
    }
    out << fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>)", kPalette[0], pts) << '\n';
    f.close();
}

void bar_chart(std::ostream& out, const std::string& title, const std::string& x_label, const std::string& y_label,
               const std::vector<std::string>& categories, const std::vector<double>& values) {
    double vmax = 0.0;
    for (double v : values) vmax = std::max(vmax, v);
    auto [top, step] = nice_axis(vmax);
    Frame f{out, top};
    f.open(title, x_label, y_label, step);
    const double n = static_cast<double>(std::max<std::size_t>(values.size(), 1));
    const double slot = kPlotW / n;
    const auto tick = std::max<std::size_t>(1, values.size() / 10);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double x = kLeft + slot * static_cast<double>(i);
        out << fmt::format(R"(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="{}"/>)", x + slot * 0.1,
                           f.py(values[i]), slot * 0.8, kTop + kPlotH - f.py(values[i]), kPalette[0])
            << '\n';
        if (i % tick == 0 || i + 1 == values.size()) f.x_tick(x + slot / 2, categories[i]);
    }
    f.close();
}

} // namespace leadflux::svg
