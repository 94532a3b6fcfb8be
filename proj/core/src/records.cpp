#include "wcp/records.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "wcp/errors.hpp"

namespace wcp {

void Table::add_row(std::vector<Value> row) {
    if (row.size() != columns_.size())
        throw SchemaError("row arity does not match the column list");
    if (!rows_.empty()) {
        for (std::size_t i = 0; i < row.size(); ++i)
            if (row[i].index() != rows_.front()[i].index())
                throw SchemaError("mixed value types in column '" + columns_[i] + "'");
    }
    rows_.push_back(std::move(row));
}

std::string format_value(const Value& v) {
    if (std::holds_alternative<std::int64_t>(v))
        return std::to_string(std::get<std::int64_t>(v));
    if (std::holds_alternative<double>(v)) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(v));
        return buf;
    }
    return std::get<std::string>(v);
}

namespace {

// RFC 4180 quoting for cells that carry separators or quotes
std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string quoted = "\"";
    for (const char ch : cell) {
        if (ch == '"') quoted += '"';
        quoted += ch;
    }
    quoted += '"';
    return quoted;
}

}  // namespace

void write_table(const Table& table, OutputFormat format, std::ostream& out) {
    if (format == OutputFormat::Csv) {
        for (const auto& c : table.comments()) out << "# " << c << "\n";
        const auto& cols = table.columns();
        for (std::size_t i = 0; i < cols.size(); ++i)
            out << (i ? "," : "") << csv_escape(cols[i]);
        out << "\n";
        for (const auto& row : table.rows()) {
            for (std::size_t i = 0; i < row.size(); ++i)
                out << (i ? "," : "") << csv_escape(format_value(row[i]));
            out << "\n";
        }
    } else {
        for (const auto& row : table.rows()) {
            out << "{";
            for (std::size_t i = 0; i < row.size(); ++i) {
                out << (i ? "," : "") << "\"" << table.columns()[i] << "\":";
                if (std::holds_alternative<std::string>(row[i])) {
                    out << "\"" << std::get<std::string>(row[i]) << "\"";
                } else if (std::holds_alternative<double>(row[i]) &&
                           !std::isfinite(std::get<double>(row[i]))) {
                    out << "null";  // JSON has no literal for inf/nan
                } else {
                    out << format_value(row[i]);
                }
            }
            out << "}\n";
        }
    }
}

void emit(const Table& table, OutputFormat format, const std::string& path) {
    if (path.empty() || path == "-") {
        write_table(table, format, std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    write_table(table, format, out);
    if (!out) throw IoError("write failed: " + path);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"' && cur.empty()) {
            quoted = true;
        } else if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    cells.push_back(cur);
    return cells;
}

Value parse_cell(const std::string& cell) {
    if (cell.empty()) return cell;
    char* end = nullptr;
    errno = 0;
    const long long as_int = std::strtoll(cell.c_str(), &end, 10);
    if (errno == 0 && end == cell.c_str() + cell.size())
        return static_cast<std::int64_t>(as_int);
    end = nullptr;
    const double as_double = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() + cell.size()) return as_double;
    return cell;
}

}  // namespace

Table parse_csv(std::istream& in) {
    std::string line;
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    bool have_header = false;
    std::vector<std::vector<Value>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::size_t start = 1;
            while (start < line.size() && line[start] == ' ') ++start;
            comments.push_back(line.substr(start));
            continue;
        }
        if (!have_header) {
            columns = split_csv_line(line);
            have_header = true;
            continue;
        }
        const auto cells = split_csv_line(line);
        if (cells.size() != columns.size()) throw SchemaError("ragged CSV row");
        std::vector<Value> row;
        row.reserve(cells.size());
        for (const auto& cell : cells) row.push_back(parse_cell(cell));
        rows.push_back(std::move(row));
    }
    if (!have_header) throw SchemaError("CSV input has no header row");
    Table t(columns);
    for (auto& c : comments) t.comments().push_back(std::move(c));
    for (auto& r : rows) t.add_row(std::move(r));
    return t;
}

Table parse_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open input file: " + path);
    return parse_csv(in);
}

}  // namespace wcp
