#include <advstab/error.hpp>
#include <advstab/report.hpp>

#include <charconv>
#include <cmath>
#include <sstream>

namespace advstab {

namespace {

using ojson = nlohmann::ordered_json;

ojson to_json(const Report::Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        if (!std::isfinite(*d)) return nullptr;
        return *d;
    }
    return std::get<std::string>(c);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string scalar_text(const ojson& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return format_number(v.get<double>());
    if (v.is_null()) return "nan";
    return v.dump();
}

}  // namespace

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    throw InputError("cli", "unknown format '" + s + "' (expected csv or json)");
}

const char* format_extension(Format f) { return f == Format::Csv ? "csv" : "json"; }

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

Report::Report(std::string command) : command_(std::move(command)) {}

void Report::add_column(const std::string& name, const std::vector<double>& values) {
    names_.push_back(name);
    columns_.emplace_back(values.begin(), values.end());
}

void Report::add_column(const std::string& name, const std::vector<std::string>& values) {
    names_.push_back(name);
    columns_.emplace_back(values.begin(), values.end());
}

std::size_t Report::rows() const { return columns_.empty() ? 0 : columns_.front().size(); }

std::string Report::render(Format f) const {
    for (const auto& c : columns_) {
        if (c.size() != rows()) throw Error("report", "columns of unequal length");
    }
    if (f == Format::Json) {
        ojson doc = ojson::object();
        doc["schema"] = 1;
        doc["command"] = command_;
        for (const auto& [k, v] : meta_.items()) doc[k] = v;
        if (!columns_.empty()) {
            ojson data = ojson::object();
            for (std::size_t j = 0; j < names_.size(); ++j) {
                ojson arr = ojson::array();
                for (const auto& c : columns_[j]) arr.push_back(to_json(c));
                data[names_[j]] = std::move(arr);
            }
            doc["data"] = std::move(data);
        }
        return doc.dump(2) + "\n";
    }
    std::ostringstream os;
    if (columns_.empty()) {
        std::string sep;
        for (const auto& [k, v] : meta_.items()) {
            if (v.is_structured()) continue;
            os << sep << csv_field(k);
            sep = ",";
        }
        os << '\n';
        sep.clear();
        for (const auto& [k, v] : meta_.items()) {
            if (v.is_structured()) continue;
            os << sep << csv_field(scalar_text(v));
            sep = ",";
        }
        os << '\n';
        return os.str();
    }
    for (std::size_t j = 0; j < names_.size(); ++j) os << (j ? "," : "") << csv_field(names_[j]);
    os << '\n';
    for (std::size_t i = 0; i < rows(); ++i) {
        for (std::size_t j = 0; j < columns_.size(); ++j) {
            if (j) os << ',';
            const auto& c = columns_[j][i];
            if (const auto* d = std::get_if<double>(&c)) {
                os << format_number(*d);
            } else {
                os << csv_field(std::get<std::string>(c));
            }
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace advstab
