#pragma once

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "latwave/errors.hpp"

namespace latwave {

/// Formats a double with 17 significant digits (round-trip exact).
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// Minimal CSV emitter: UTF-8, comma separator, one header row.
class CsvWriter {
public:
    CsvWriter(const std::string& path, std::initializer_list<std::string> header) : out_(path) {
        if (!out_) throw Error("cannot open CSV for writing: " + path);
        bool first = true;
        for (const auto& h : header) {
            if (!first) out_ << ',';
            out_ << h;
            first = false;
        }
        out_ << '\n';
    }

    void row(std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            if (!first) out_ << ',';
            out_ << fmt17(v);
            first = false;
        }
        out_ << '\n';
    }

    void row_mixed(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

}  // namespace latwave
