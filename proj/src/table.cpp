#include "qmeter/table.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "qmeter/errors.hpp"

namespace qmeter {

OutputFormat parse_output_format(const std::string& name) {
    if (name == "csv") {
        return OutputFormat::csv;
    }
    if (name == "json") {
        return OutputFormat::json;
    }
    throw InvalidArgument("unknown output format '" + name + "' (expected csv or json)");
}

std::string format_number(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    if (value == 0.0) {
        value = 0.0;  // drop the sign of -0
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_cell(const Cell& cell) {
    struct {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(double v) const { return format_number(v); }
        std::string operator()(std::uint64_t v) const { return std::to_string(v); }
        std::string operator()(const std::string& s) const { return s; }
    } visitor;
    return std::visit(visitor, cell);
}

std::string json_cell(const Cell& cell) {
    struct {
        std::string operator()(std::monostate) const { return "null"; }
        std::string operator()(double v) const {
            return std::isfinite(v) ? format_number(v) : nlohmann::json(format_number(v)).dump();
        }
        std::string operator()(std::uint64_t v) const { return std::to_string(v); }
        std::string operator()(const std::string& s) const { return nlohmann::json(s).dump(); }
    } visitor;
    return std::visit(visitor, cell);
}

}  // namespace

void write_csv(std::ostream& out, const Table& table) {
    out << '#';
    for (const auto& [key, value] : table.metadata) {
        out << ' ' << key << '=' << value;
    }
    out << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? "," : "") << table.columns[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << csv_cell(row[i]);
        }
        out << '\n';
    }
}

void write_json(std::ostream& out, const Table& table) {
    out << "{\n  \"metadata\": {";
    for (std::size_t i = 0; i < table.metadata.size(); ++i) {
        out << (i ? ", " : "") << nlohmann::json(table.metadata[i].first).dump() << ": "
            << nlohmann::json(table.metadata[i].second).dump();
    }
    out << "},\n  \"columns\": [";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? ", " : "") << nlohmann::json(table.columns[i]).dump();
    }
    out << "],\n  \"rows\": [";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out << (r ? ",\n    [" : "\n    [");
        for (std::size_t i = 0; i < table.rows[r].size(); ++i) {
            out << (i ? ", " : "") << json_cell(table.rows[r][i]);
        }
        out << ']';
    }
    out << (table.rows.empty() ? "]\n}\n" : "\n  ]\n}\n");
}

void write_table(std::ostream& out, const Table& table, OutputFormat format) {
    if (format == OutputFormat::json) {
        write_json(out, table);
    } else {
        write_csv(out, table);
    }
}

}  // namespace qmeter
