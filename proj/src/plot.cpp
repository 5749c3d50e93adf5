#include "allocbench/plot.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "allocbench/csv_io.hpp"

namespace allocbench {
namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 60, kRight = 150, kTop = 40, kBottom = 50;

const char* setting_color(Setting s) {
    switch (s) {
        case Setting::baseline: return "#1f77b4";
        case Setting::limited: return "#2ca02c";
        case Setting::shifted: return "#d62728";
    }
    return "#000000";
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

struct Axes {
    double x_min, x_max;

    double px(double f) const { return kLeft + (f - x_min) / (x_max - x_min) * (kWidth - kLeft - kRight); }
    static double py(double f1) {
        return kTop + (1.0 - std::clamp(f1, 0.0, 1.0)) * (kHeight - kTop - kBottom);
    }
};

}  // namespace

std::string render_f1_plot(std::span<const AggregateRow> rows, Scenario scenario) {
    if (scenario == Scenario::uc) throw std::invalid_argument("plot: scenario must be TOPK or CE");
    std::map<Setting, std::vector<AggregateRow>> lines;
    std::map<Setting, double> uc_mean;
    for (const auto& r : rows) {
        if (r.scenario == scenario) lines[r.setting].push_back(r);
        if (r.scenario == Scenario::uc) uc_mean[r.setting] = r.f1_mean;
    }
    if (lines.empty()) throw std::invalid_argument("plot: no " + to_string(scenario) + " rows to plot");

    double x_min = 1.0, x_max = 0.0;
    for (auto& [setting, pts] : lines) {
        std::sort(pts.begin(), pts.end(),
                  [](const AggregateRow& a, const AggregateRow& b) { return a.budget_fraction < b.budget_fraction; });
        x_min = std::min(x_min, pts.front().budget_fraction);
        x_max = std::max(x_max, pts.back().budget_fraction);
    }
    if (x_max - x_min < 1e-9) {
        x_min -= 0.05;
        x_max += 0.05;
    }
    const Axes ax{x_min, x_max};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
        << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    svg << "<text x=\"" << num(kWidth / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">F1 agreement, "
        << to_string(scenario) << "</text>\n";

    const double x0 = ax.px(x_min), x1 = ax.px(x_max), y0 = Axes::py(0.0), y1 = Axes::py(1.0);
    svg << "<g stroke=\"#000000\" fill=\"none\">\n";
    svg << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y0) << "\"/>\n";
    svg << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(y1) << "\"/>\n";
    svg << "</g>\n";
    for (int i = 0; i <= 5; ++i) {
        const double v = i / 5.0, y = Axes::py(v);
        svg << "<line x1=\"" << num(x0 - 4) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(y)
            << "\" stroke=\"#000000\"/>\n";
        svg << "<text x=\"" << num(x0 - 8) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << num(v)
            << "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
        const double v = x_min + (x_max - x_min) * i / 4.0, x = ax.px(v);
        svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x) << "\" y2=\"" << num(y0 + 4)
            << "\" stroke=\"#000000\"/>\n";
        svg << "<text x=\"" << num(x) << "\" y=\"" << num(y0 + 18) << "\" text-anchor=\"middle\">" << num(v)
            << "</text>\n";
    }
    svg << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 8)
        << "\" text-anchor=\"middle\">budget fraction</text>\n";
    svg << "<text x=\"16\" y=\"" << num((y0 + y1) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << num((y0 + y1) / 2) << ")\">F1</text>\n";

    int legend_row = 0;
    for (const auto& [setting, pts] : lines) {
        const char* color = setting_color(setting);
        svg << "<g class=\"" << to_string(setting) << "\">\n";
        svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
        for (const auto& p : pts) svg << num(ax.px(p.budget_fraction)) << ',' << num(Axes::py(p.f1_mean + p.f1_sd)) << ' ';
        for (auto it = pts.rbegin(); it != pts.rend(); ++it)
            svg << num(ax.px(it->budget_fraction)) << ',' << num(Axes::py(it->f1_mean - it->f1_sd)) << ' ';
        svg << "\"/>\n";
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i)
            svg << (i ? " " : "") << num(ax.px(pts[i].budget_fraction)) << ',' << num(Axes::py(pts[i].f1_mean));
        svg << "\"/>\n";
        if (auto it = uc_mean.find(setting); it != uc_mean.end()) {
            const double y = Axes::py(it->second);
            svg << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y)
                << "\" stroke=\"" << color << "\" stroke-dasharray=\"6 4\"/>\n";
        }
        const double ly = kTop + 10 + 20 * legend_row++;
        svg << "<line x1=\"" << num(kWidth - kRight + 15) << "\" y1=\"" << num(ly) << "\" x2=\""
            << num(kWidth - kRight + 40) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << num(kWidth - kRight + 46) << "\" y=\"" << num(ly + 4) << "\">" << to_string(setting)
            << "</text>\n";
        svg << "</g>\n";
    }
    if (!uc_mean.empty())
        svg << "<text x=\"" << num(kWidth - kRight + 15) << "\" y=\"" << num(kTop + 10 + 20 * legend_row + 4)
            << "\">dashed: UC</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

void emit_plot(const std::filesystem::path& aggregate_csv, Scenario scenario, const std::filesystem::path& svg_path) {
    std::ifstream in(aggregate_csv);
    if (!in) throw std::runtime_error("cannot open " + aggregate_csv.string());
    const auto rows = parse_aggregate_csv(in);
    if (rows.empty()) throw std::invalid_argument("plot: " + aggregate_csv.string() + " has no data rows");
    write_file_atomic(svg_path, render_f1_plot(rows, scenario));
}

}  // namespace allocbench
