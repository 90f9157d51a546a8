#pragma once

#include "geodec/core.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace geodec {

inline constexpr const char* kSeriesHeader = "t,beta_tot_re,beta_tot_im,beta_dyn_re,beta_dyn_im,beta_re,beta_im,stderr";

/// Decimal with 12 significant digits; negative zero prints as 0.
inline std::string format_number(double v) {
    if (v == 0.0) v = 0.0;  // drop the sign of negative zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void header(const std::vector<std::string>& columns) { row_strings(columns); }

    void row(const std::vector<double>& values) {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values) cells.push_back(format_number(v));
        row_strings(cells);
    }

    void row_strings(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

private:
    std::ostream& out_;
};

inline std::vector<std::string> split_header(std::string_view header) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = header.find(',', start);
        out.emplace_back(header.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) return out;
        start = comma + 1;
    }
}

/// Opens `path` for binary writing (so line endings stay LF) and hands the
/// stream to `fill`.
template <typename Fill>
void write_file(const std::string& path, Fill&& fill) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    fill(out);
    out.flush();
    if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace geodec
