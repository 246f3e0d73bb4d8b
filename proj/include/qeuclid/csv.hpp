#pragma once

#include <qeuclid/errors.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

namespace qeuclid {

/// Shortest decimal that reads back to the same double, independent of the
/// C locale.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

/// Rows of mixed text and numeric cells, preceded by an optional comment
/// header (typically Config::echo()).
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    class Row {
    public:
        Row& operator<<(double v) {
            cells_.push_back(format_number(v));
            return *this;
        }
        Row& operator<<(long long v) {
            cells_.push_back(std::to_string(v));
            return *this;
        }
        Row& operator<<(int v) { return *this << static_cast<long long>(v); }
        Row& operator<<(std::size_t v) { return *this << static_cast<long long>(v); }
        Row& operator<<(const std::string& v) {
            cells_.push_back(v);
            return *this;
        }
        Row& operator<<(const char* v) { return *this << std::string(v); }

    private:
        friend class CsvTable;
        std::vector<std::string> cells_;
    };

    void add(const Row& r) {
        if (r.cells_.size() != columns_.size()) throw ShapeError("CSV row width does not match the header");
        rows_.push_back(r.cells_);
    }

    std::string str(const std::string& header = {}) const {
        std::string s = header;
        s += join(columns_);
        for (const auto& r : rows_) s += join(r);
        return s;
    }

    void write(const std::string& path, const std::string& header = {}) const {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw DomainError("cannot open '" + path + "' for writing");
        os << str(header);
        if (!os) throw DomainError("failed writing '" + path + "'");
    }

private:
    static std::string join(const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) s += ',';
            s += cells[i];
        }
        return s + '\n';
    }

    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace qeuclid
