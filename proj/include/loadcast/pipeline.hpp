#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "loadcast/arima.hpp"
#include "loadcast/gbt.hpp"
#include "loadcast/series.hpp"
#include "loadcast/svr.hpp"

namespace loadcast::pipeline {

/// Trend, seasonal and irregular forecasts over a common horizon.
struct ComponentForecast {
    std::vector<double> trend;
    std::vector<double> seasonal;
    std::vector<double> irregular;

    std::size_t size() const { return trend.size(); }
    /// Elementwise T * S * I.
    std::vector<double> aggregate() const;
};

struct ForecastReport {
    std::string model;
    std::uint64_t seed = 0;
    std::vector<MonthKey> months;
    std::vector<double> actual;  // empty when the horizon is not observed
    std::vector<double> predicted;
    std::optional<ComponentForecast> components;
    std::optional<double> mape;
    std::optional<double> mae;
    std::map<std::string, std::string> config;
    std::map<std::string, double> diagnostics;

    /// Throws ValidationError when lengths disagree, the aggregate differs from the component
    /// product, or the stored metrics cannot be recomputed from the stored vectors.
    void check_consistency() const;
};

enum class KpcaMode { Off, Replace, Augment };

/// Optional kernel-PCA reduction of the weather/calendar block fed to the component GBTs.
struct KpcaOptions {
    KpcaMode mode = KpcaMode::Off;
    /// RBF width on standardized columns; unset means 1 / column count.
    std::optional<double> gamma;
    double variance_fraction = 0.95;
};

struct XasxgConfig {
    arima::ArimaSpec arima{};
    svr::SvrParams svr{};
    bool svr_grid_search = false;
    gbt::GbtParams gbt{};
    /// Exogenous columns feeding the trend correction. Columns absent from the table are
    /// skipped, so econ_index is used only when present.
    std::vector<std::string> trend_features{"econ_index", "month_index", "temp_mean_c"};
    KpcaOptions kpca{};
    /// Folds for the GBT cross-validation diagnostics; below 2 disables them.
    std::size_t cv_folds = 10;
    std::uint64_t seed = 42;

    void validate() const;
    std::map<std::string, std::string> echo() const;
};

/// ARIMA on the trend plus an SVR fitted to its in-sample residuals:
///   T_hat = ARIMA h-step forecast + SVR(features_test).
/// Residual rows inside the ARIMA burn-in (the first d + max(p, q) months) are left out of
/// the SVR fit because they only reflect zero pre-sample values.
struct TrendForecast {
    std::vector<double> arima;
    std::vector<double> correction;
    std::vector<double> total;
    arima::ArimaModel model;
    svr::SvrParams svr_params;  // after the optional grid search
    std::size_t svr_rows = 0;   // 0 when there was nothing to correct with
};

/// With a non-empty `grid`, the SVR parameters are chosen by k-fold CV over it (k =
/// `grid_folds`, capped at the row count) instead of taken from `svr_params`.
TrendForecast forecast_trend(std::span<const double> trend_train, const Eigen::MatrixXd& features_train,
                             const Eigen::MatrixXd& features_test, std::size_t h, const arima::ArimaSpec& spec,
                             const svr::SvrParams& svr_params, const arima::FitOptions& fit_options = {},
                             std::span<const svr::SvrParams> grid = {}, std::size_t grid_folds = 10);

/// GBT on {lag-12 seasonal, temp_mean_c, holiday_days, month_index}. A test month's lag-12
/// value is taken from the latest training month of the same calendar month.
std::vector<double> forecast_seasonal(const MonthlySeries& seasonal_train, const ExogTable& exog,
                                      std::span<const MonthKey> test_months, const gbt::GbtParams& params,
                                      const KpcaOptions& kpca = {});

/// GBT on {temp_mean_c, holiday_days, month_index}.
std::vector<double> forecast_irregular(const MonthlySeries& irregular_train, const ExogTable& exog,
                                       std::span<const MonthKey> test_months, const gbt::GbtParams& params,
                                       const KpcaOptions& kpca = {});

/// Holds out the last h months, decomposes the rest, forecasts each component and multiplies.
ForecastReport forecast_xasxg(const MonthlySeries& series, const ExogTable& exog, std::size_t h,
                              const XasxgConfig& config = {});

enum class AblationVariant { TrendArimaOnly = 1, SeasonalHistorical = 2, IrregularHistoricalMean = 3 };

std::string_view variant_name(AblationVariant variant);
AblationVariant variant_from_number(int number);

ForecastReport run_ablation(const MonthlySeries& series, const ExogTable& exog, std::size_t h,
                            AblationVariant variant, const XasxgConfig& config = {});

/// The wanted trend columns that `exog` actually has, in the wanted order.
std::vector<std::string> resolve_trend_features(const ExogTable& exog, std::span<const std::string> wanted);

/// Attaches MAPE/MAE against `actual` (when non-empty).
void attach_metrics(ForecastReport& report);

}  // namespace loadcast::pipeline
