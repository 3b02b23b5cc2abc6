#ifndef FEDGP_CSV_HPP
#define FEDGP_CSV_HPP

#include <fedgp/gp.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

namespace fedgp {

/// Full-precision number formatting for CSV output (17 significant digits).
inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw InputError("CSV row " + std::to_string(row) + ", column " + std::to_string(col + 1)
                         + ": cannot parse '" + cell + "' as a number");
    if (!std::isfinite(value))
        throw InputError("CSV row " + std::to_string(row) + ", column " + std::to_string(col + 1)
                         + ": non-finite value rejected");
    return value;
}

}  // namespace detail

/// Loads a dataset from a CSV file with header `x1,...,xd,y` in file order.
inline Dataset load_csv_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open CSV file: " + path);

    std::string line;
    if (!std::getline(in, line))
        throw InputError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = detail::split_csv_line(line);
    if (header.size() < 2 || header.back() != "y")
        throw InputError(path + ": header must be x1,...,xd,y");
    const std::size_t d = header.size() - 1;
    for (std::size_t j = 0; j < d; ++j)
        if (header[j] != "x" + std::to_string(j + 1))
            throw InputError(path + ": header column " + std::to_string(j + 1)
                             + " must be x" + std::to_string(j + 1));

    std::vector<std::vector<double>> rows;
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size())
            throw InputError(path + ": row " + std::to_string(row_no) + " has "
                             + std::to_string(cells.size()) + " cells, expected "
                             + std::to_string(header.size()));
        std::vector<double> parsed(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c)
            parsed[c] = detail::parse_cell(cells[c], row_no, c);
        rows.push_back(std::move(parsed));
    }
    if (rows.empty())
        throw InputError(path + ": no data rows");

    Dataset out;
    out.inputs.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    out.outputs.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j)
            out.inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        out.outputs(static_cast<Eigen::Index>(i)) = rows[i][d];
    }
    return out;
}

/// Minimal row-oriented CSV writer; cells are pre-formatted strings.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw InputError("cannot open for writing: " + path);
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    void flush() { out_.flush(); }

private:
    std::ofstream out_;
};

}  // namespace fedgp

#endif  // FEDGP_CSV_HPP
