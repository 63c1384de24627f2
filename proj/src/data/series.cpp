#include "hnl/data/series.hpp"

#include "hnl/core/error.hpp"
#include "hnl/metrics/downsample.hpp"
#include "hnl/metrics/metrics.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

namespace hnl::data {
namespace {

// Howard Hinnant's civil-date algorithms
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y += m <= 2;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

int parse_int(const std::string& s, std::size_t pos, std::size_t len) {
    int v = 0;
    const char* first = s.data() + pos;
    const auto r = std::from_chars(first, first + len, v);
    if (r.ec != std::errc() || r.ptr != first + len) {
        throw ValidationError("malformed timestamp '" + s + "'");
    }
    return v;
}

std::optional<double> parse_cell(const std::string& cell, std::size_t line_no, const std::string& column) {
    if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan") return std::nullopt;
    double v = 0.0;
    const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (r.ec != std::errc() || r.ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw ValidationError("line " + std::to_string(line_no) + ": cannot parse '" + cell +
                              "' in column '" + column + "'");
    }
    return v;
}

// fills runs of missing cells by linear interpolation; returns the count filled
std::size_t fill_gaps(std::vector<std::optional<double>>& col, std::size_t max_gap,
                      MissingPolicy policy, const std::string& column) {
    std::size_t filled = 0;
    std::size_t i = 0;
    while (i < col.size()) {
        if (col[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < col.size() && !col[j]) ++j;
        const std::size_t run = j - i;
        if (policy == MissingPolicy::error) {
            throw ValidationError("missing value in column '" + column + "' at data row " +
                                  std::to_string(i + 1));
        }
        if (i == 0 || j == col.size()) {
            throw ValidationError("missing value at the edge of column '" + column +
                                  "' cannot be interpolated (data row " + std::to_string(i + 1) + ")");
        }
        if (run > max_gap) {
            throw ValidationError("gap of " + std::to_string(run) + " consecutive missing values in column '" +
                                  column + "' starting at data row " + std::to_string(i + 1) +
                                  " exceeds the limit of " + std::to_string(max_gap));
        }
        const double a = *col[i - 1];
        const double b = *col[j];
        for (std::size_t k = i; k < j; ++k) {
            const double w = static_cast<double>(k - i + 1) / static_cast<double>(run + 1);
            col[k] = a + (b - a) * w;
        }
        filled += run;
        i = j;
    }
    return filled;
}

}  // namespace

std::int64_t parse_iso8601(const std::string& raw) {
    const std::string s = trim(raw);
    // YYYY-MM-DDTHH:MM:SS
    if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' ||
        s[16] != ':') {
        throw ValidationError("malformed timestamp '" + s + "'");
    }
    const std::string tail = s.substr(19);
    if (!(tail.empty() || tail == "Z" || tail == "+00:00")) {
        throw ValidationError("timestamp '" + s + "' is not UTC");
    }
    const int y = parse_int(s, 0, 4);
    const int mo = parse_int(s, 5, 2);
    const int d = parse_int(s, 8, 2);
    const int h = parse_int(s, 11, 2);
    const int mi = parse_int(s, 14, 2);
    const int se = parse_int(s, 17, 2);
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || se > 59) {
        throw ValidationError("timestamp '" + s + "' out of range");
    }
    const std::int64_t days = days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d));
    return days * 86400 + h * 3600 + mi * 60 + se;
}

std::string format_iso8601(std::int64_t t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    std::int64_t y = 0;
    unsigned m = 0;
    unsigned d = 0;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02d:%02d:%02dZ", static_cast<long long>(y), m, d,
                  static_cast<int>(rem / 3600), static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
    return buf;
}

RawSeries read_csv(std::istream& in, const CsvSchema& schema) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = split_csv_line(line);
            break;
        }
    }
    if (header.empty()) throw ValidationError("CSV has no header row");
    int ts_col = -1;
    int val_col = -1;
    std::vector<std::size_t> exog_cols;
    RawSeries out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == schema.timestamp_column) {
            ts_col = static_cast<int>(c);
        } else if (header[c] == schema.value_column) {
            val_col = static_cast<int>(c);
        } else {
            exog_cols.push_back(c);
            out.exog_names.push_back(header[c]);
        }
    }
    if (ts_col < 0) throw ValidationError("CSV header lacks column '" + schema.timestamp_column + "'");
    if (val_col < 0) throw ValidationError("CSV header lacks column '" + schema.value_column + "'");

    std::vector<std::optional<double>> values;
    std::vector<std::vector<std::optional<double>>> exog(exog_cols.size());
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " cells, found " +
                                  std::to_string(cells.size()));
        }
        try {
            out.timestamps.push_back(parse_iso8601(cells[static_cast<std::size_t>(ts_col)]));
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
        }
        values.push_back(parse_cell(cells[static_cast<std::size_t>(val_col)], line_no, schema.value_column));
        for (std::size_t e = 0; e < exog_cols.size(); ++e) {
            exog[e].push_back(parse_cell(cells[exog_cols[e]], line_no, out.exog_names[e]));
        }
    }
    if (out.timestamps.empty()) throw ValidationError("CSV has no data rows");

    if (out.timestamps.size() >= 2) {
        std::vector<std::size_t> bad;
        const std::int64_t step = out.timestamps[1] - out.timestamps[0];
        for (std::size_t i = 1; i < out.timestamps.size(); ++i) {
            const std::int64_t d = out.timestamps[i] - out.timestamps[i - 1];
            if (d == 0) {
                throw ValidationError("duplicated timestamp " + format_iso8601(out.timestamps[i]) +
                                      " at data row " + std::to_string(i + 1));
            }
            if (d != step || d < 0) bad.push_back(i + 1);
        }
        if (step <= 0 || !bad.empty()) {
            std::string rows;
            for (std::size_t k = 0; k < bad.size() && k < 5; ++k) rows += (k ? ", " : "") + std::to_string(bad[k]);
            throw ValidationError("non-uniform timestamp spacing at data rows " + rows);
        }
        out.resolution = 3600.0 / static_cast<double>(step);
    }

    out.interpolated = fill_gaps(values, schema.max_gap, schema.missing, schema.value_column);
    for (std::size_t e = 0; e < exog.size(); ++e) {
        out.interpolated += fill_gaps(exog[e], schema.max_gap, schema.missing, out.exog_names[e]);
    }
    out.values.reserve(values.size());
    for (const auto& v : values) out.values.push_back(*v);
    out.exog = Matrix(out.values.size(), exog.size());
    for (std::size_t e = 0; e < exog.size(); ++e) {
        for (std::size_t i = 0; i < out.values.size(); ++i) out.exog(i, e) = *exog[e][i];
    }
    return out;
}

RawSeries load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open CSV file '" + path + "'");
    return read_csv(in, schema);
}

void write_csv(std::ostream& out, const RawSeries& s, const std::string& value_name) {
    out << "timestamp," << value_name;
    for (const auto& n : s.exog_names) out << "," << n;
    out << "\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << format_iso8601(s.timestamps[i]) << "," << metrics::format_double(s.values[i]);
        for (std::size_t e = 0; e < s.exog_count(); ++e) out << "," << metrics::format_double(s.exog(i, e));
        out << "\n";
    }
}

RawSeries resample(const RawSeries& s, double target_resolution) {
    const std::size_t r = metrics::block_ratio(s.resolution, target_resolution);
    RawSeries out;
    out.resolution = s.resolution / static_cast<double>(r);
    out.values = metrics::block_mean(s.values, r);
    out.exog_names = s.exog_names;
    out.interpolated = s.interpolated;
    // each block is stamped with the end of its last sample
    for (std::size_t b = 0; b < out.values.size(); ++b) out.timestamps.push_back(s.timestamps[(b + 1) * r - 1]);
    out.exog = Matrix(out.values.size(), s.exog_count());
    std::vector<double> col(s.size());
    for (std::size_t e = 0; e < s.exog_count(); ++e) {
        for (std::size_t i = 0; i < s.size(); ++i) col[i] = s.exog(i, e);
        const auto m = metrics::block_mean(col, r);
        for (std::size_t b = 0; b < m.size(); ++b) out.exog(b, e) = m[b];
    }
    return out;
}

}  // namespace hnl::data
