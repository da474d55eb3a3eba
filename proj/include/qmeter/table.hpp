// table.hpp: deterministic CSV / JSON tables for the command-line front end.
//
// Numbers use the shortest decimal string that parses back to the same double
// (std::to_chars), so identical inputs give byte-identical files.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qmeter {

enum class OutputFormat { csv, json };

OutputFormat parse_output_format(const std::string& name);

// Empty cells encode missing values (CSV: empty field, JSON: null).
using Cell = std::variant<std::monostate, double, std::uint64_t, std::string>;

struct Table {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string format_number(double value);

// Line 1: "# key=value ..." metadata comment, line 2: column headers, then rows.
void write_csv(std::ostream& out, const Table& table);

// {"metadata": {...}, "columns": [...], "rows": [[...], ...]}
void write_json(std::ostream& out, const Table& table);

void write_table(std::ostream& out, const Table& table, OutputFormat format);

}  // namespace qmeter
