#include "genrisk/panel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace genrisk {

ReturnPanel compute_returns(const RatePanel& panel, ReturnMode mode) {
    const Eigen::Index t = panel.rows();
    if (t < 2) throw TooShort("compute_returns: need at least 2 dates");
    ReturnPanel out;
    out.tenors = panel.tenors;
    out.mode = mode;
    out.dates.assign(panel.dates.begin() + 1, panel.dates.end());
    if (mode == ReturnMode::absolute) {
        out.values = panel.values.bottomRows(t - 1) - panel.values.topRows(t - 1);
    } else {
        if ((panel.values.array() <= 0.0).any())
            throw NonPositiveLevel("compute_returns: log mode requires positive levels");
        const Mat logs = panel.values.array().log();
        out.values = logs.bottomRows(t - 1) - logs.topRows(t - 1);
    }
    return out;
}

ReturnPanel h_day_returns(const ReturnPanel& returns, int h) {
    if (h < 1) throw Error("h_day_returns: h must be >= 1");
    const Eigen::Index t = returns.rows();
    if (t < h) throw TooShort("h_day_returns: series shorter than h");
    ReturnPanel out;
    out.tenors = returns.tenors;
    out.mode = returns.mode;
    const Eigen::Index n = t - h + 1;
    out.values = Mat::Zero(n, returns.cols());
    for (int k = 0; k < h; ++k) out.values += returns.values.middleRows(k, n);
    out.dates.assign(returns.dates.begin() + (h - 1), returns.dates.end());
    return out;
}

RatePanel accumulate_returns(const ReturnPanel& returns, const RowVec& base_levels,
                             Date base_date) {
    if (base_levels.size() != returns.cols())
        throw DimensionMismatch("accumulate_returns: base dimension mismatch");
    RatePanel out;
    out.tenors = returns.tenors;
    out.values.resize(returns.rows() + 1, returns.cols());
    out.values.row(0) = base_levels;
    for (Eigen::Index i = 0; i < returns.rows(); ++i)
        out.values.row(i + 1) = out.values.row(i) + returns.values.row(i);
    out.dates.reserve(returns.rows() + 1);
    out.dates.push_back(base_date);
    out.dates.insert(out.dates.end(), returns.dates.begin(), returns.dates.end());
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trimmed(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool is_missing(const std::string& s) {
    return s.empty() || s == "." || s == "NA" || s == "NaN" || s == "nan";
}

}  // namespace

RatePanel read_panel_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw CsvError("empty csv");
    auto header = split_csv_line(line);
    if (header.size() < 2) throw CsvError("csv needs a date column and at least one tenor");
    std::string first = trimmed(header[0]);
    std::transform(first.begin(), first.end(), first.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (first != "date") throw CsvError("first csv column must be 'date'");

    RatePanel panel;
    for (std::size_t j = 1; j < header.size(); ++j) panel.tenors.push_back(trimmed(header[j]));
    const std::size_t d = panel.tenors.size();

    std::vector<Date> dates;
    std::vector<std::vector<double>> rows;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trimmed(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != d + 1)
            throw CsvError("line " + std::to_string(lineno) + ": expected " +
                           std::to_string(d + 1) + " fields, got " + std::to_string(fields.size()));
        const Date date = parse_iso(trimmed(fields[0]));
        if (!dates.empty()) {
            if (date == dates.back())
                throw CsvError("line " + std::to_string(lineno) + ": duplicate date");
            if (date < dates.back())
                throw CsvError("line " + std::to_string(lineno) + ": dates not sorted");
        }
        std::vector<double> row(d, nan);
        for (std::size_t j = 0; j < d; ++j) {
            const std::string cell = trimmed(fields[j + 1]);
            if (!is_missing(cell)) {
                try {
                    std::size_t pos = 0;
                    row[j] = std::stod(cell, &pos);
                    if (pos != cell.size()) throw std::invalid_argument(cell);
                } catch (const std::exception&) {
                    throw CsvError("line " + std::to_string(lineno) + ": bad number '" + cell + "'");
                }
            }
        }
        dates.push_back(date);
        rows.push_back(std::move(row));
    }
    if (dates.empty()) throw CsvError("csv has no data rows");

    // Drop leading rows until every column has been seen, then forward-fill.
    std::size_t start = 0;
    {
        std::vector<bool> seen(d, false);
        std::size_t complete = rows.size();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (std::size_t j = 0; j < d; ++j)
                if (!std::isnan(rows[i][j])) seen[j] = true;
            if (std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
                complete = i;
                break;
            }
        }
        if (complete == rows.size()) throw CsvError("csv column never observed");
        start = complete;
        // Walk back: the first kept row must itself be fully observed after fill,
        // so locate the first row at or after `complete` with no missing cells
        // once forward-fill from `complete` is applied.  Forward-fill needs a
        // value per column at the first kept row, which `complete` guarantees
        // only if that row has all cells; otherwise fill from earlier rows.
        std::vector<double> carry(d, nan);
        for (std::size_t i = 0; i <= complete; ++i)
            for (std::size_t j = 0; j < d; ++j)
                if (!std::isnan(rows[i][j])) carry[j] = rows[i][j];
        rows[complete] = carry;
    }

    const std::size_t t = rows.size() - start;
    panel.values.resize(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(d));
    panel.dates.assign(dates.begin() + start, dates.end());
    std::vector<double> carry = rows[start];
    for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double v = rows[start + i][j];
            if (!std::isnan(v)) carry[j] = v;
            panel.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = carry[j];
        }
    }
    return panel;
}

RatePanel read_panel_csv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw CsvError("cannot open " + path);
    return read_panel_csv(f);
}

void write_panel_csv(const RatePanel& panel, std::ostream& out) {
    out << "date";
    for (const auto& t : panel.tenors) out << ',' << t;
    out << '\n';
    out.precision(12);
    for (Eigen::Index i = 0; i < panel.rows(); ++i) {
        out << format_iso(panel.dates[i]);
        for (Eigen::Index j = 0; j < panel.cols(); ++j) out << ',' << panel.values(i, j);
        out << '\n';
    }
}

void write_panel_csv_file(const RatePanel& panel, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw CsvError("cannot open " + path + " for writing");
    write_panel_csv(panel, f);
}

std::vector<double> tenor_years(const std::vector<std::string>& tenors) {
    std::vector<double> out;
    out.reserve(tenors.size());
    for (const auto& raw : tenors) {
        std::string s = trimmed(raw);
        if (s.rfind("DGS", 0) == 0 || s.rfind("dgs", 0) == 0) s = s.substr(3);
        if (s.empty()) throw Error("unparsable tenor '" + raw + "'");
        std::size_t pos = 0;
        double num = 0.0;
        try {
            num = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw Error("unparsable tenor '" + raw + "'");
        }
        std::string unit = s.substr(pos);
        std::transform(unit.begin(), unit.end(), unit.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (unit == "m" || unit == "mo")
            out.push_back(num / 12.0);
        else if (unit.empty() || unit == "y" || unit == "yr")
            out.push_back(num);
        else
            throw Error("unparsable tenor '" + raw + "'");
    }
    return out;
}

}  // namespace genrisk
