#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace loadcast {

struct MonthKey {
    int year = 2000;
    int month = 1;  // 1..12

    auto operator<=>(const MonthKey&) const = default;

    static MonthKey from_ordinal(long ordinal);
    /// Parses `YYYY-MM`; throws ValidationError on any other shape.
    static MonthKey parse(std::string_view text);

    /// Months since year 0, January. Successor is ordinal() + 1.
    long ordinal() const { return static_cast<long>(year) * 12 + (month - 1); }
    MonthKey next() const { return plus(1); }
    MonthKey plus(long months) const { return from_ordinal(ordinal() + months); }
    /// Signed month distance `other - *this`.
    long until(const MonthKey& other) const { return other.ordinal() - ordinal(); }
    std::string str() const;
};

/// Consecutive monthly observations anchored at `start`.
class MonthlySeries {
public:
    MonthlySeries(MonthKey start, std::vector<double> values);

    MonthKey start() const { return start_; }
    MonthKey last() const { return start_.plus(static_cast<long>(values_.size()) - 1); }
    MonthKey key(std::size_t i) const { return start_.plus(static_cast<long>(i)); }
    std::size_t size() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::optional<std::size_t> index_of(MonthKey key) const;

    MonthlySeries slice(std::size_t offset, std::size_t count) const;

private:
    MonthKey start_;
    std::vector<double> values_;
};

/// Exogenous drivers, one row per consecutive month.
///
/// Column order is fixed: temp_mean_c, holiday_days, month_index, then any optional columns
/// (econ_index and extras) in the order they were supplied. month_index is always derived
/// from the row key.
class ExogTable {
public:
    static constexpr std::string_view kTemp = "temp_mean_c";
    static constexpr std::string_view kHoliday = "holiday_days";
    static constexpr std::string_view kMonthIndex = "month_index";
    static constexpr std::string_view kEcon = "econ_index";

    ExogTable(MonthKey start, std::vector<double> temp_mean_c, std::vector<double> holiday_days,
              std::vector<std::pair<std::string, std::vector<double>>> optional_columns = {});

    MonthKey start() const { return start_; }
    MonthKey last() const { return start_.plus(static_cast<long>(rows_) - 1); }
    std::size_t size() const { return rows_; }
    const std::vector<std::string>& names() const { return names_; }
    bool has_column(std::string_view name) const;
    std::span<const double> column(std::string_view name) const;
    bool covers(MonthKey key) const;
    double value(MonthKey key, std::string_view name) const;

    ExogTable slice(MonthKey from, std::size_t count) const;

private:
    std::size_t column_index(std::string_view name) const;

    MonthKey start_;
    std::size_t rows_ = 0;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
};

/// Dense design matrix with one row per month.
struct FeatureMatrix {
    std::vector<MonthKey> keys;
    std::vector<std::string> names;
    Eigen::MatrixXd data;
    std::optional<Eigen::VectorXd> target;

    std::size_t rows() const { return keys.size(); }
    std::size_t cols() const { return names.size(); }
    bool empty() const { return keys.empty(); }
    std::optional<std::size_t> column_index(std::string_view name) const;
    FeatureMatrix select_columns(std::span<const std::size_t> columns) const;
    FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
};

MonthlySeries parse_series(std::string_view csv_text);
std::string serialize_series(const MonthlySeries& series);

ExogTable parse_exog(std::string_view csv_text);
std::string serialize_exog(const ExogTable& exog);

/// Exogenous columns for the series months that have a lag-12 value, plus `lag12`.
/// `lag12_source` is aligned with `series`; the target is the series over the kept rows.
FeatureMatrix align(const MonthlySeries& series, const ExogTable& exog,
                    std::span<const double> lag12_source);

/// Selected exogenous columns for arbitrary months. Throws listing every uncovered month.
FeatureMatrix exog_features(const ExogTable& exog, std::span<const MonthKey> keys,
                            std::span<const std::string> columns);

struct SeriesSplit {
    MonthlySeries train;
    MonthlySeries test;
};

SeriesSplit train_test_split(const MonthlySeries& series, std::size_t horizon = 12);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace loadcast
