#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "loadcast/pipeline.hpp"

namespace loadcast::pipeline {

inline constexpr std::array<std::string_view, 5> kBaselineNames{"seasonal_naive", "ets", "mlr", "arima",
                                                                  "x12_arima"};

/// Multiplicative-season Holt-Winters with an additive trend.
struct HoltWinters {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double level = 0.0;
    double slope = 0.0;
    /// Seasonal factors by calendar month, mean 1.
    std::array<double, 12> seasonal{};
    MonthKey last;
    double sse = 0.0;

    std::vector<double> forecast(std::size_t h) const;
};

/// Smoothing weights fitted by the simplex on in-sample one-step SSE. Needs 24 months.
HoltWinters fit_holt_winters(const MonthlySeries& series);

/// Least squares on exogenous columns, an intercept and 11 month dummies (January is the
/// reference), solved through ridge-1e-8 normal equations with the intercept unpenalized.
struct LinearModel {
    std::vector<std::string> names;  // "intercept", exog columns, "month_2".."month_12"
    Eigen::VectorXd coefficients;
    double coefficient(std::string_view name) const;
    std::vector<double> predict(const ExogTable& exog, std::span<const MonthKey> months) const;
};

/// Uses every exogenous column except month_index (the dummies encode it).
LinearModel fit_mlr(const MonthlySeries& series, const ExogTable& exog);

ForecastReport run_baseline(std::string_view name, const MonthlySeries& series, const ExogTable& exog,
                            std::size_t h, const XasxgConfig& config = {});

}  // namespace loadcast::pipeline
