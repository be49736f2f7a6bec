#include "seedopt/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace seedopt {

namespace fs = std::filesystem;

namespace {

std::string join_line(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    return out;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns, std::vector<std::string> units)
    : columns_(std::move(columns)), units_(std::move(units)) {
    if (columns_.empty() || columns_.size() != units_.size()) {
        throw std::invalid_argument("csv: one unit per column is required");
    }
}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size()) throw std::invalid_argument("csv: row width does not match the header");
    rows_.push_back(std::move(cells));
}

void CsvTable::add_row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_number(v));
    add_row(std::move(cells));
}

std::string CsvTable::str() const {
    std::string out = "# units," + join_line(units_) + "\n" + join_line(columns_) + "\n";
    for (const auto& r : rows_) out += join_line(r) + "\n";
    return out;
}

void write_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::size_t CsvData::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    throw std::runtime_error("csv: no column '" + name + "'");
}

double CsvData::number(std::size_t row, const std::string& name) const {
    return std::stod(rows.at(row).at(column(name)));
}

CsvData read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    CsvData data;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# units,", 0) != 0) {
        throw std::runtime_error(path.string() + ": first line must be the units header");
    }
    data.units = split_line(line.substr(8));
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": missing column header");
    data.columns = split_line(line);
    if (data.columns.size() != data.units.size()) {
        throw std::runtime_error(path.string() + ": units and columns differ in width");
    }
    std::size_t n = 2;
    while (std::getline(in, line)) {
        ++n;
        auto cells = split_line(line);
        if (cells.size() != data.columns.size()) {
            throw std::runtime_error(path.string() + ":" + std::to_string(n) + ": wrong number of cells");
        }
        data.rows.push_back(std::move(cells));
    }
    return data;
}

}  // namespace seedopt
