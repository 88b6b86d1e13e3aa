#include "skycast/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "skycast/errors.hpp"

namespace skycast {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string s) {
    const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    return s;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

bool is_nan_token(const std::string& s) {
    if (s.empty()) return true;
    std::string low = s;
    std::transform(low.begin(), low.end(), low.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return low == "nan";
}

double parse_value(const std::string& field, const std::string& src, std::size_t line,
                   const char* column) {
    if (is_nan_token(field)) return kNaN;
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0' || std::isinf(v)) {
        throw ParseError(src, line, std::string("bad ") + column + " value '" + field + "'");
    }
    return v;
}

}  // namespace

IngestResult ingest_csv(std::istream& in, const CsvSchema& schema,
                        const std::string& src) {
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError(src + ": empty file, header row is mandatory");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_fields(line);
    const std::size_t expected_cols = schema.has_clearsky ? 3u : 2u;
    if (header.size() != expected_cols || header[0] != "timestamp" || header[1] != "ghi" ||
        (schema.has_clearsky && header[2] != "clearsky")) {
        throw SchemaError(src + ": header does not match declared schema (expected 'timestamp,ghi" +
                          std::string(schema.has_clearsky ? ",clearsky" : "") + "')");
    }

    IngestResult result;
    if (schema.has_clearsky) result.clearsky.emplace();

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;

        const auto fields = split_fields(line);
        if (fields.size() != expected_cols) {
            throw ParseError(src, lineno, "expected " + std::to_string(expected_cols) +
                                              " fields, got " + std::to_string(fields.size()));
        }

        Timestamp ts;
        try {
            ts = parse_iso8601(fields[0]);
        } catch (const DataError& e) {
            throw ParseError(src, lineno, e.what());
        }
        if (!result.ghi.timestamps.empty()) {
            const Timestamp prev = result.ghi.timestamps.back();
            if (ts <= prev) {
                throw ParseError(src, lineno, "timestamps must be strictly increasing");
            }
            if (ts - prev != kHourStep) {
                throw ParseError(src, lineno,
                                 "timestamp gap; encode missing hours as empty ghi values");
            }
        }

        const double g = parse_value(fields[1], src, lineno, "ghi");
        if (!std::isnan(g) && g < 0.0) {
            throw ParseError(src, lineno, "negative ghi value");
        }

        result.ghi.timestamps.push_back(ts);
        result.ghi.values.push_back(g);

        if (schema.has_clearsky) {
            const double c = parse_value(fields[2], src, lineno, "clearsky");
            if (std::isnan(c)) {
                throw ParseError(src, lineno, "clearsky column must not be missing");
            }
            if (c < 0.0) throw ParseError(src, lineno, "negative clearsky value");
            result.clearsky->timestamps.push_back(ts);
            result.clearsky->values.push_back(c);
        }
        ++result.rows;
    }

    result.ghi.validate();
    return result;
}

IngestResult ingest_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open input file '" + path + "'");
    }
    return ingest_csv(in, schema, path);
}

void write_series_csv(std::ostream& out, const IrradianceSeries& ghi,
                      const ClearSkySeries* clearsky) {
    out << "timestamp,ghi";
    if (clearsky) out << ",clearsky";
    out << "\n";
    char buf[64];
    for (std::size_t i = 0; i < ghi.size(); ++i) {
        out << format_iso8601(ghi.timestamps[i]) << ",";
        if (!std::isnan(ghi.values[i])) {
            std::snprintf(buf, sizeof(buf), "%.10g", ghi.values[i]);
            out << buf;
        }
        if (clearsky) {
            std::snprintf(buf, sizeof(buf), "%.10g", clearsky->values[i]);
            out << "," << buf;
        }
        out << "\n";
    }
}

void write_series_csv(const std::string& path, const IrradianceSeries& ghi,
                      const ClearSkySeries* clearsky) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open output file '" + path + "'");
    write_series_csv(out, ghi, clearsky);
}

}  // namespace skycast
