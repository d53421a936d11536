#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace permot::io {

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

// CSV convention: '.' decimal, ',' separator, header row mandatory.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
Csv read_csv(const std::string& path);

uint64_t fnv1a64_file(const std::string& path);

// Two-column whitespace data file plus a minimal SVG rendering.
struct Series {
    std::string name;
    std::vector<double> x, y;
};
void emit_plot_data(const std::string& out_dir, const Series& series,
                    const std::string& x_label, const std::string& y_label);

}  // namespace permot::io
