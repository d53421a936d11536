#include "permot/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "permot/common.hpp"

namespace permot::io {

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw invalid_input("cannot open for writing: " + path);
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    char buf[40];
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            out << (i ? "," : "") << buf;
        }
        out << "\n";
    }
}

Csv read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open: " + path);
    Csv csv;
    std::string line;
    if (!std::getline(in, line)) throw invalid_input("empty csv: " + path);
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) csv.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        csv.rows.push_back(std::move(row));
    }
    return csv;
}

uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw invalid_input("cannot open: " + path);
    uint64_t hash = 14695981039346656037ULL;
    char c;
    while (in.get(c)) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 1099511628211ULL;
    }
    return hash;
}

void emit_plot_data(const std::string& out_dir, const Series& series,
                    const std::string& x_label, const std::string& y_label) {
    if (series.x.empty() || series.x.size() != series.y.size())
        throw invalid_input("emit_plot_data: empty or ragged series");
    std::string base = out_dir + "/" + series.name;
    {
        std::ofstream dat(base + ".dat");
        if (!dat) throw invalid_input("cannot open for writing: " + base + ".dat");
        char buf[96];
        for (size_t i = 0; i < series.x.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g %.17g\n", series.x[i], series.y[i]);
            dat << buf;
        }
    }
    double x_lo = series.x[0], x_hi = series.x[0], y_lo = series.y[0], y_hi = series.y[0];
    for (size_t i = 0; i < series.x.size(); ++i) {
        x_lo = std::min(x_lo, series.x[i]);
        x_hi = std::max(x_hi, series.x[i]);
        y_lo = std::min(y_lo, series.y[i]);
        y_hi = std::max(y_hi, series.y[i]);
    }
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    if (y_hi == y_lo) y_hi = y_lo + 1.0;
    const double width = 640, height = 420, margin = 56;
    auto px = [&](double x) { return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin); };
    auto py = [&](double y) {
        return height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin);
    };
    std::ofstream svg(base + ".svg");
    if (!svg) throw invalid_input("cannot open for writing: " + base + ".svg");
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<line x1='" << margin << "' y1='" << height - margin << "' x2='" << width - margin
        << "' y2='" << height - margin << "' stroke='black'/>\n";
    svg << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin << "' y2='"
        << height - margin << "' stroke='black'/>\n";
    svg << "<text x='" << width / 2 << "' y='" << height - 12
        << "' text-anchor='middle' font-size='13'>" << x_label << "</text>\n";
    svg << "<text x='16' y='" << height / 2 << "' text-anchor='middle' font-size='13' "
        << "transform='rotate(-90 16 " << height / 2 << ")'>" << y_label << "</text>\n";
    svg << "<polyline fill='none' stroke='steelblue' stroke-width='1.5' points='";
    for (size_t i = 0; i < series.x.size(); ++i)
        svg << px(series.x[i]) << "," << py(series.y[i]) << " ";
    svg << "'/>\n";
    for (size_t i = 0; i < series.x.size(); ++i)
        svg << "<circle cx='" << px(series.x[i]) << "' cy='" << py(series.y[i])
            << "' r='2.4' fill='darkorange'/>\n";
    svg << "</svg>\n";
}

}  // namespace permot::io
