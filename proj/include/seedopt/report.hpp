#pragma once

// CSV and JSON artifact writers. Every CSV starts with a `# units,...` line,
// followed by the column names and the data rows. Files are written to a
// temporary sibling and renamed into place.

#include <filesystem>
#include <string>
#include <vector>

namespace seedopt {

/// Twelve significant digits (%.12g); "nan", "inf" or "-inf" for non-finite values.
std::string format_number(double v);

class CsvTable {
public:
    CsvTable(std::vector<std::string> columns, std::vector<std::string> units);

    void add_row(std::vector<std::string> cells);
    void add_row(const std::vector<double>& values);

    std::size_t rows() const { return rows_.size(); }
    std::string str() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::string> units_;
    std::vector<std::vector<std::string>> rows_;
};

/// Write through a temporary file in the same directory, then rename. Parent directories are created.
void write_atomic(const std::filesystem::path& path, const std::string& content);

inline void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    write_atomic(path, table.str());
}

struct CsvData {
    std::vector<std::string> units;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;  ///< throws if absent
    double number(std::size_t row, const std::string& name) const;
};

/// Parse a file written by write_csv; throws std::runtime_error on a schema violation.
CsvData read_csv(const std::filesystem::path& path);

}  // namespace seedopt
