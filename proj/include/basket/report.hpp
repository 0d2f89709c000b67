#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "basket/errors.hpp"

namespace basket {

// One line of a comparison report. Column order is fixed:
// config, method, price, stderr, iv, rel_err.
struct ComparisonRow {
    std::string config_id;
    std::string method;
    std::optional<double> price;
    std::optional<double> std_error;
    std::optional<double> implied_vol;
    std::optional<double> rel_err;  // |price - mc| / mc against the engine MC
};

enum class ReportFormat { Csv, Markdown };

namespace detail {

inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

inline std::string format_opt(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string{};
}

// RFC 4180: quote fields containing comma, quote or newline; double quotes.
inline std::string csv_field(const std::string& raw) {
    if (raw.find_first_of(",\"\n\r") == std::string::npos) return raw;
    std::string out = "\"";
    for (const char ch : raw) {
        if (ch == '"') out += "\"\"";
        else out += ch;
    }
    out += "\"";
    return out;
}

}  // namespace detail

inline std::string emit_csv(const std::vector<ComparisonRow>& rows) {
    std::string out = "config,method,price,stderr,iv,rel_err\r\n";
    for (const auto& r : rows) {
        out += detail::csv_field(r.config_id);
        out += ',';
        out += detail::csv_field(r.method);
        out += ',';
        out += detail::format_opt(r.price);
        out += ',';
        out += detail::format_opt(r.std_error);
        out += ',';
        out += detail::format_opt(r.implied_vol);
        out += ',';
        out += detail::format_opt(r.rel_err);
        out += "\r\n";
    }
    return out;
}

inline std::string emit_markdown(const std::vector<ComparisonRow>& rows) {
    std::string out = "| config | method | price | stderr | iv | rel_err |\n";
    out += "|---|---|---|---|---|---|\n";
    for (const auto& r : rows) {
        out += "| " + r.config_id + " | " + r.method + " | " + detail::format_opt(r.price) +
               " | " + detail::format_opt(r.std_error) + " | " +
               detail::format_opt(r.implied_vol) + " | " + detail::format_opt(r.rel_err) +
               " |\n";
    }
    return out;
}

inline std::string emit_report(const std::vector<ComparisonRow>& rows, ReportFormat format) {
    return format == ReportFormat::Csv ? emit_csv(rows) : emit_markdown(rows);
}

// Parses text produced by emit_csv back into rows (round-trip checks).
inline std::vector<ComparisonRow> parse_csv_report(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n' || ch == '\r') {
            if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            fields.push_back(std::move(field));
            field.clear();
            records.push_back(std::move(fields));
            fields.clear();
        } else {
            field += ch;
        }
    }
    if (!field.empty() || !fields.empty()) {
        fields.push_back(std::move(field));
        records.push_back(std::move(fields));
    }

    std::vector<ComparisonRow> rows;
    const auto opt = [](const std::string& s) -> std::optional<double> {
        if (s.empty()) return std::nullopt;
        return std::stod(s);
    };
    for (std::size_t r = 1; r < records.size(); ++r) {  // skip header
        const auto& rec = records[r];
        if (rec.size() != 6) throw NumericalError("malformed CSV report row");
        rows.push_back({rec[0], rec[1], opt(rec[2]), opt(rec[3]), opt(rec[4]), opt(rec[5])});
    }
    return rows;
}

}  // namespace basket
