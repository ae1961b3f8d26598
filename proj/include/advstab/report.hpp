#pragma once

#include <json.hpp>

#include <string>
#include <variant>
#include <vector>

namespace advstab {

enum class Format { Csv, Json };

/// Parses "csv" or "json".
Format parse_format(const std::string& s);
const char* format_extension(Format f);

/// Shortest round-trip text of a double ("nan", "inf", "-inf" for non-finite).
std::string format_number(double v);

/// Output document of one command: ordered scalar metadata plus an optional
/// column table.
///
/// CSV: the table with a header row; without a table, one row of the scalar
/// metadata. JSON: {"schema": 1, "command": ..., <meta>, "data": {col: [...]}}.
class Report {
public:
    using Cell = std::variant<double, std::string>;

    explicit Report(std::string command);

    nlohmann::ordered_json& meta() { return meta_; }
    const nlohmann::ordered_json& meta() const { return meta_; }

    void add_column(const std::string& name, const std::vector<double>& values);
    void add_column(const std::string& name, const std::vector<std::string>& values);

    std::size_t rows() const;
    std::string render(Format f) const;

private:
    std::string command_;
    nlohmann::ordered_json meta_ = nlohmann::ordered_json::object();
    std::vector<std::string> names_;
    std::vector<std::vector<Cell>> columns_;
};

}  // namespace advstab
