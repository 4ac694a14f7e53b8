#include "wmf/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "wmf/errors.hpp"

namespace wmf {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // tolerate CRLF and surrounding blanks
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
            cell.pop_back();
        std::size_t b = 0;
        while (b < cell.size() && cell[b] == ' ') ++b;
        cells.push_back(cell.substr(b));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& cell, int row, const std::string& col) {
    double v = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end)
        throw ParseError("csv: cannot parse cell '" + cell + "' at row " +
                         std::to_string(row) + ", column '" + col + "'");
    if (!std::isfinite(v))
        throw NonFiniteValue("csv: non-finite value at row " + std::to_string(row) +
                             ", column '" + col + "'");
    return v;
}

} // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

LoadedCsv load_csv(const std::string& path, const std::string& response) {
    std::ifstream in(path);
    if (!in) throw ParseError("csv: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line.empty())
        throw EmptyFile("csv: '" + path + "' is empty");
    const std::vector<std::string> header = split_line(line);
    if (header.empty()) throw EmptyFile("csv: '" + path + "' has no columns");

    int ycol = -1;
    if (!response.empty()) {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == response) ycol = static_cast<int>(j);
        if (ycol < 0)
            throw ParseError("csv: response column '" + response + "' not in '" +
                             path + "'");
    } else {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == "y") ycol = static_cast<int>(j);
        if (ycol < 0) ycol = static_cast<int>(header.size()) - 1;
    }

    std::vector<std::vector<double>> rows;
    int datarow = 0;  // 1-based over data rows, header excluded
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++datarow;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size())
            throw ParseError("csv: row " + std::to_string(datarow) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(header.size()));
        std::vector<double> vals(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j)
            vals[j] = parse_cell(cells[j], datarow, header[j]);
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw EmptyFile("csv: '" + path + "' has no data rows");

    LoadedCsv out;
    const int n = static_cast<int>(rows.size());
    const int p = static_cast<int>(header.size()) - 1;
    out.data.X.resize(n, p);
    out.data.y.resize(n);
    out.response = header[ycol];
    for (std::size_t j = 0; j < header.size(); ++j)
        if (static_cast<int>(j) != ycol) out.data.names.push_back(header[j]);
    for (int i = 0; i < n; ++i) {
        int c = 0;
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (static_cast<int>(j) == ycol)
                out.data.y[i] = rows[i][j];
            else
                out.data.X(i, c++) = rows[i][j];
        }
    }
    out.binary = true;
    for (int i = 0; i < n; ++i)
        if (out.data.y[i] != 0.0 && out.data.y[i] != 1.0) out.binary = false;
    return out;
}

void save_csv(const std::string& path, const Dataset& data,
              const std::string& response_name) {
    std::ofstream out(path);
    if (!out) throw InputError("csv: cannot write '" + path + "'");
    for (int j = 0; j < data.p(); ++j) {
        if (j) out << ',';
        if (static_cast<std::size_t>(j) < data.names.size())
            out << data.names[j];
        else
            out << 'x' << (j + 1);
    }
    out << (data.p() > 0 ? "," : "") << response_name << '\n';
    for (int i = 0; i < data.n(); ++i) {
        for (int j = 0; j < data.p(); ++j) out << format_double(data.X(i, j)) << ',';
        out << format_double(data.y[i]) << '\n';
    }
}

} // namespace wmf
