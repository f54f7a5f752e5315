#include "loadcast/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "loadcast/error.hpp"

namespace loadcast {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

/// Non-blank lines; a UTF-8 BOM and CR line endings are tolerated.
std::vector<std::string_view> split_lines(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = trim(text.substr(pos, nl - pos));
        if (!line.empty()) lines.push_back(line);
        pos = nl + 1;
    }
    return lines;
}

double parse_cell(std::string_view cell, std::size_t row, std::string_view column) {
    if (cell.empty()) {
        throw ParseError(ParseError::Kind::MissingCell, row,
                         "missing value in column '" + std::string(column) + "'");
    }
    if (cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ParseError(ParseError::Kind::Unparsable, row,
                         "cannot parse '" + std::string(cell) + "' in column '" + std::string(column) + "'");
    }
    if (!std::isfinite(value)) {
        throw ParseError(ParseError::Kind::NonFinite, row,
                         "non-finite value in column '" + std::string(column) + "'");
    }
    return value;
}

MonthKey parse_row_key(std::string_view cell, std::size_t row) {
    try {
        return MonthKey::parse(cell);
    } catch (const ValidationError& e) {
        throw ParseError(ParseError::Kind::Format, row, e.what());
    }
}

void check_successor(const MonthKey& previous, const MonthKey& current, std::size_t row) {
    if (current == previous) {
        throw ParseError(ParseError::Kind::Duplicate, row, "duplicate month " + current.str());
    }
    if (current != previous.next()) {
        throw ParseError(ParseError::Kind::Gap, row,
                         "expected month " + previous.next().str() + ", found " + current.str());
    }
}

}  // namespace

// ---------------------------------------------------------------- MonthKey

MonthKey MonthKey::from_ordinal(long ordinal) {
    long year = ordinal / 12;
    long month0 = ordinal % 12;
    if (month0 < 0) {
        month0 += 12;
        --year;
    }
    return MonthKey{static_cast<int>(year), static_cast<int>(month0) + 1};
}

MonthKey MonthKey::parse(std::string_view text) {
    const auto bad = [&] { return ValidationError("month '" + std::string(text) + "' is not YYYY-MM"); };
    if (text.size() != 7 || text[4] != '-') throw bad();
    int year = 0;
    int month = 0;
    auto r1 = std::from_chars(text.data(), text.data() + 4, year);
    auto r2 = std::from_chars(text.data() + 5, text.data() + 7, month);
    if (r1.ec != std::errc() || r1.ptr != text.data() + 4 || r2.ec != std::errc() ||
        r2.ptr != text.data() + 7 || text[0] == '-' || text[5] == '-') {
        throw bad();
    }
    if (month < 1 || month > 12) throw bad();
    return MonthKey{year, month};
}

std::string MonthKey::str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
}

// ----------------------------------------------------------- MonthlySeries

MonthlySeries::MonthlySeries(MonthKey start, std::vector<double> values)
    : start_(start), values_(std::move(values)) {
    if (values_.empty()) throw ValidationError("series must contain at least one month");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw ValidationError("non-finite load at " + key(i).str());
        }
    }
}

std::optional<std::size_t> MonthlySeries::index_of(MonthKey k) const {
    const long offset = start_.until(k);
    if (offset < 0 || offset >= static_cast<long>(values_.size())) return std::nullopt;
    return static_cast<std::size_t>(offset);
}

MonthlySeries MonthlySeries::slice(std::size_t offset, std::size_t count) const {
    if (offset + count > values_.size() || count == 0) {
        throw ValidationError("series slice out of range");
    }
    return MonthlySeries(key(offset), std::vector<double>(values_.begin() + static_cast<long>(offset),
                                                          values_.begin() + static_cast<long>(offset + count)));
}

// ---------------------------------------------------------------- ExogTable

ExogTable::ExogTable(MonthKey start, std::vector<double> temp_mean_c, std::vector<double> holiday_days,
                     std::vector<std::pair<std::string, std::vector<double>>> optional_columns)
    : start_(start), rows_(temp_mean_c.size()) {
    if (rows_ == 0) throw ValidationError("exogenous table must contain at least one month");
    if (holiday_days.size() != rows_) throw ValidationError("holiday_days length mismatch");

    std::vector<double> month_index(rows_);
    for (std::size_t i = 0; i < rows_; ++i) month_index[i] = start_.plus(static_cast<long>(i)).month;

    names_ = {std::string(kTemp), std::string(kHoliday), std::string(kMonthIndex)};
    columns_.push_back(std::move(temp_mean_c));
    columns_.push_back(std::move(holiday_days));
    columns_.push_back(std::move(month_index));
    for (auto& [name, values] : optional_columns) {
        if (values.size() != rows_) throw ValidationError("column '" + name + "' length mismatch");
        if (has_column(name)) throw ValidationError("duplicate column '" + name + "'");
        names_.push_back(name);
        columns_.push_back(std::move(values));
    }
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        for (std::size_t i = 0; i < rows_; ++i) {
            if (!std::isfinite(columns_[c][i])) {
                throw ValidationError("non-finite " + names_[c] + " at " + start_.plus(static_cast<long>(i)).str());
            }
        }
    }
    for (std::size_t i = 0; i < rows_; ++i) {
        if (columns_[1][i] < 0.0) {
            throw ValidationError("negative holiday_days at " + start_.plus(static_cast<long>(i)).str());
        }
    }
}

bool ExogTable::has_column(std::string_view name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::size_t ExogTable::column_index(std::string_view name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw ValidationError("unknown exogenous column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - names_.begin());
}

std::span<const double> ExogTable::column(std::string_view name) const { return columns_[column_index(name)]; }

bool ExogTable::covers(MonthKey key) const {
    const long offset = start_.until(key);
    return offset >= 0 && offset < static_cast<long>(rows_);
}

double ExogTable::value(MonthKey key, std::string_view name) const {
    if (!covers(key)) throw ValidationError("exogenous table does not cover " + key.str());
    return columns_[column_index(name)][static_cast<std::size_t>(start_.until(key))];
}

ExogTable ExogTable::slice(MonthKey from, std::size_t count) const {
    if (count == 0 || !covers(from) || !covers(from.plus(static_cast<long>(count) - 1))) {
        throw ValidationError("exogenous slice out of range");
    }
    const auto offset = static_cast<long>(start_.until(from));
    auto cut = [&](std::size_t c) {
        return std::vector<double>(columns_[c].begin() + offset, columns_[c].begin() + offset + static_cast<long>(count));
    };
    std::vector<std::pair<std::string, std::vector<double>>> optional;
    for (std::size_t c = 3; c < columns_.size(); ++c) optional.emplace_back(names_[c], cut(c));
    return ExogTable(from, cut(0), cut(1), std::move(optional));
}

// ------------------------------------------------------------ FeatureMatrix

std::optional<std::size_t> FeatureMatrix::column_index(std::string_view name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names.begin());
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::size_t> columns) const {
    FeatureMatrix out;
    out.keys = keys;
    out.target = target;
    out.data.resize(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        out.names.push_back(names.at(columns[j]));
        out.data.col(static_cast<Eigen::Index>(j)) = data.col(static_cast<Eigen::Index>(columns[j]));
    }
    return out;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> row_ids) const {
    FeatureMatrix out;
    out.names = names;
    out.data.resize(static_cast<Eigen::Index>(row_ids.size()), data.cols());
    if (target) out.target = Eigen::VectorXd(static_cast<Eigen::Index>(row_ids.size()));
    for (std::size_t i = 0; i < row_ids.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(row_ids[i]);
        out.keys.push_back(keys.at(row_ids[i]));
        out.data.row(static_cast<Eigen::Index>(i)) = data.row(r);
        if (target) (*out.target)(static_cast<Eigen::Index>(i)) = (*target)(r);
    }
    return out;
}

// ------------------------------------------------------------------ CSV I/O

MonthlySeries parse_series(std::string_view csv_text) {
    const auto lines = split_lines(csv_text);
    if (lines.empty()) throw ParseError(ParseError::Kind::Header, 0, "empty file");
    const auto header = split_fields(lines[0]);
    if (header.size() != 2 || header[0] != "month" || header[1] != "load") {
        throw ParseError(ParseError::Kind::Header, 0, "header must be 'month,load'");
    }
    if (lines.size() < 2) throw ParseError(ParseError::Kind::Header, 0, "no data rows");

    std::optional<MonthKey> start;
    MonthKey previous;
    std::vector<double> values;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto fields = split_fields(lines[r]);
        if (fields.size() != 2) {
            throw ParseError(ParseError::Kind::Format, r, "expected 2 fields, found " + std::to_string(fields.size()));
        }
        const MonthKey key = parse_row_key(fields[0], r);
        if (start) {
            check_successor(previous, key, r);
        } else {
            start = key;
        }
        previous = key;
        values.push_back(parse_cell(fields[1], r, "load"));
    }
    return MonthlySeries(*start, std::move(values));
}

std::string serialize_series(const MonthlySeries& series) {
    std::string out = "month,load\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += series.key(i).str();
        out += ',';
        out += format_double(series[i]);
        out += '\n';
    }
    return out;
}

ExogTable parse_exog(std::string_view csv_text) {
    const auto lines = split_lines(csv_text);
    if (lines.empty()) throw ParseError(ParseError::Kind::Header, 0, "empty file");
    const auto header = split_fields(lines[0]);
    if (header.size() < 3 || header[0] != "month" || header[1] != ExogTable::kTemp ||
        header[2] != ExogTable::kHoliday) {
        throw ParseError(ParseError::Kind::Header, 0, "header must start with 'month,temp_mean_c,holiday_days'");
    }
    for (std::size_t c = 3; c < header.size(); ++c) {
        if (header[c].empty() || header[c] == ExogTable::kMonthIndex) {
            throw ParseError(ParseError::Kind::Header, 0, "invalid extra column name '" + std::string(header[c]) + "'");
        }
    }
    if (lines.size() < 2) throw ParseError(ParseError::Kind::Header, 0, "no data rows");

    std::optional<MonthKey> start;
    MonthKey previous;
    std::vector<std::vector<double>> columns(header.size() - 1);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto fields = split_fields(lines[r]);
        if (fields.size() != header.size()) {
            const std::size_t missing = std::min(fields.size(), header.size() - 1);
            throw ParseError(ParseError::Kind::MissingCell, r,
                             "expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(fields.size()) + " (column '" + std::string(header[missing]) + "')");
        }
        const MonthKey key = parse_row_key(fields[0], r);
        if (start) {
            check_successor(previous, key, r);
        } else {
            start = key;
        }
        previous = key;
        for (std::size_t c = 1; c < fields.size(); ++c) {
            const double v = parse_cell(fields[c], r, header[c]);
            if (c == 2 && v < 0.0) {
                throw ParseError(ParseError::Kind::Constraint, r, "holiday_days must be >= 0");
            }
            columns[c - 1].push_back(v);
        }
    }
    std::vector<std::pair<std::string, std::vector<double>>> optional;
    for (std::size_t c = 3; c < header.size(); ++c) {
        optional.emplace_back(std::string(header[c]), std::move(columns[c - 1]));
    }
    return ExogTable(*start, std::move(columns[0]), std::move(columns[1]), std::move(optional));
}

std::string serialize_exog(const ExogTable& exog) {
    std::vector<std::string_view> names;
    for (const auto& n : exog.names()) {
        if (n != ExogTable::kMonthIndex) names.push_back(n);
    }
    std::string out = "month";
    for (auto n : names) {
        out += ',';
        out += n;
    }
    out += '\n';
    for (std::size_t i = 0; i < exog.size(); ++i) {
        const MonthKey key = exog.start().plus(static_cast<long>(i));
        out += key.str();
        for (auto n : names) {
            out += ',';
            out += format_double(exog.column(n)[i]);
        }
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------- alignment

FeatureMatrix exog_features(const ExogTable& exog, std::span<const MonthKey> keys,
                            std::span<const std::string> columns) {
    std::string missing;
    for (const auto& k : keys) {
        if (!exog.covers(k)) missing += (missing.empty() ? "" : ", ") + k.str();
    }
    if (!missing.empty()) throw ValidationError("exogenous table missing months: " + missing);

    FeatureMatrix fm;
    fm.keys.assign(keys.begin(), keys.end());
    fm.names.assign(columns.begin(), columns.end());
    fm.data.resize(static_cast<Eigen::Index>(keys.size()), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        const auto col = exog.column(columns[j]);
        for (std::size_t i = 0; i < keys.size(); ++i) {
            fm.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                col[static_cast<std::size_t>(exog.start().until(keys[i]))];
        }
    }
    return fm;
}

FeatureMatrix align(const MonthlySeries& series, const ExogTable& exog, std::span<const double> lag12_source) {
    if (lag12_source.size() != series.size()) {
        throw ValidationError("lag-12 source length " + std::to_string(lag12_source.size()) +
                              " does not match series length " + std::to_string(series.size()));
    }
    std::vector<MonthKey> all_keys;
    for (std::size_t i = 0; i < series.size(); ++i) all_keys.push_back(series.key(i));
    // Coverage is checked over the whole series, even months without lag support.
    (void)exog_features(exog, all_keys, {});

    const std::size_t n = series.size() > 12 ? series.size() - 12 : 0;
    std::vector<MonthKey> keys(all_keys.begin() + static_cast<long>(series.size() - n), all_keys.end());
    FeatureMatrix base = exog_features(exog, keys, exog.names());

    FeatureMatrix fm;
    fm.keys = std::move(keys);
    fm.names = base.names;
    fm.names.emplace_back("lag12");
    fm.data.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(fm.names.size()));
    Eigen::VectorXd target(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        fm.data.row(r).head(base.data.cols()) = base.data.row(r);
        fm.data(r, base.data.cols()) = lag12_source[i];
        target(r) = series[i + 12];
    }
    fm.target = std::move(target);
    return fm;
}

SeriesSplit train_test_split(const MonthlySeries& series, std::size_t horizon) {
    if (horizon < 1) throw ValidationError("horizon must be >= 1");
    if (series.size() <= horizon) {
        throw ValidationError("series length " + std::to_string(series.size()) + " must exceed horizon " +
                              std::to_string(horizon));
    }
    const std::size_t n_train = series.size() - horizon;
    return SeriesSplit{series.slice(0, n_train), series.slice(n_train, horizon)};
}

// ---------------------------------------------------------------------- misc

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed for '" + path + "'");
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

}  // namespace loadcast
