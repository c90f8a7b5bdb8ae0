#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "latwave/errors.hpp"

namespace latwave {

/// Bare-bones SVG line chart, one polyline per named series.
/// Non-finite samples are skipped (the polyline is split).
class SvgChart {
public:
    SvgChart(std::string title, std::string xlabel, std::string ylabel)
        : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

    void add_series(std::string name, std::vector<double> x, std::vector<double> y) {
        series_.push_back({std::move(name), std::move(x), std::move(y)});
    }

    void write(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw Error("cannot open SVG for writing: " + path);
        const double W = 900, H = 540, ml = 70, mr = 170, mt = 45, mb = 55;
        double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
        double ymin = xmin, ymax = -xmin;
        for (const auto& s : series_)
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                xmin = std::min(xmin, s.x[i]); xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, s.y[i]); ymax = std::max(ymax, s.y[i]);
            }
        if (!(xmax > xmin)) { xmin -= 1; xmax += 1; }
        if (!(ymax > ymin)) { ymin -= 1; ymax += 1; }
        auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
        auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
            << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
            << title_ << "</text>\n"
            << "<text x=\"" << (ml + (W - ml - mr) / 2) << "\" y=\"" << H - 12
            << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel_ << "</text>\n"
            << "<text x=\"18\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-size=\"13\" "
            << "transform=\"rotate(-90 18 " << H / 2 << ")\">" << ylabel_ << "</text>\n"
            << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr
            << "\" height=\"" << H - mt - mb << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int k = 0; k <= 4; ++k) {
            double xv = xmin + k * (xmax - xmin) / 4, yv = ymin + k * (ymax - ymin) / 4;
            out << "<text x=\"" << px(xv) << "\" y=\"" << H - mb + 18
                << "\" text-anchor=\"middle\" font-size=\"11\">" << format(xv) << "</text>\n"
                << "<text x=\"" << ml - 6 << "\" y=\"" << py(yv) + 4
                << "\" text-anchor=\"end\" font-size=\"11\">" << format(yv) << "</text>\n";
        }
        static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                       "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
        for (std::size_t si = 0; si < series_.size(); ++si) {
            const auto& s = series_[si];
            const char* col = colors[si % 8];
            out << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
            }
            out << "\"/>\n"
                << "<text x=\"" << W - mr + 10 << "\" y=\"" << mt + 16 + 18 * si
                << "\" font-size=\"12\" fill=\"" << col << "\">" << s.name << "</text>\n";
        }
        out << "</svg>\n";
    }

private:
    struct Series {
        std::string name;
        std::vector<double> x, y;
    };
    static std::string format(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4g", v);
        return buf;
    }
    std::string title_, xlabel_, ylabel_;
    std::vector<Series> series_;
};

}  // namespace latwave
