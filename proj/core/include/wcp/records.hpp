#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace wcp {

using Value = std::variant<std::int64_t, double, std::string>;

// A rectangular record set with fixed, ordered columns plus '#' header
// comment lines. Floats render with 17 significant digits so that a parsed
// file reproduces the original doubles bit for bit.
class Table {
  public:
    Table() = default;
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<Value>>& rows() const { return rows_; }
    std::vector<std::string>& comments() { return comments_; }
    const std::vector<std::string>& comments() const { return comments_; }

    void add_comment(std::string key, std::string value) {
        comments_.push_back(std::move(key) + "=" + std::move(value));
    }
    // enforces arity and per-column type consistency
    void add_row(std::vector<Value> row);

    bool empty() const { return rows_.empty(); }
    std::size_t size() const { return rows_.size(); }

  private:
    std::vector<std::string> columns_;
    std::vector<std::string> comments_;
    std::vector<std::vector<Value>> rows_;
};

std::string format_value(const Value& v);

enum class OutputFormat { Csv, JsonLines };

void write_table(const Table& table, OutputFormat format, std::ostream& out);
// writes to a file; "-" (or empty) means stdout
void emit(const Table& table, OutputFormat format, const std::string& path);

// Reads back a CSV produced by write_table. Column types are inferred from
// the cell syntax (integer, float, string); round-trips emit output exactly.
Table parse_csv(std::istream& in);
Table parse_csv_file(const std::string& path);

}  // namespace wcp
