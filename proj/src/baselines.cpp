#include "loadcast/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "loadcast/decomp.hpp"
#include "loadcast/error.hpp"
#include "loadcast/nelder_mead.hpp"

namespace loadcast::pipeline {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

std::size_t slot(MonthKey k) { return static_cast<std::size_t>(k.month - 1); }

/// Runs the smoothing recursions over the whole series from the first-two-years start.
HoltWinters smooth(const MonthlySeries& y, double alpha, double beta, double gamma) {
    HoltWinters hw;
    hw.alpha = alpha;
    hw.beta = beta;
    hw.gamma = gamma;
    double first = 0.0, second = 0.0;
    for (std::size_t i = 0; i < 12; ++i) {
        first += y[i];
        second += y[i + 12];
    }
    first /= 12.0;
    second /= 12.0;
    hw.level = first;
    hw.slope = (second - first) / 12.0;
    for (std::size_t i = 0; i < 12; ++i) hw.seasonal[slot(y.key(i))] = y[i] / first;

    for (std::size_t t = 0; t < y.size(); ++t) {
        double& s = hw.seasonal[slot(y.key(t))];
        const double predicted = (hw.level + hw.slope) * s;
        const double e = y[t] - predicted;
        hw.sse += e * e;
        const double previous = hw.level;
        hw.level = alpha * y[t] / s + (1.0 - alpha) * (hw.level + hw.slope);
        hw.slope = beta * (hw.level - previous) + (1.0 - beta) * hw.slope;
        s = gamma * y[t] / hw.level + (1.0 - gamma) * s;
    }
    hw.last = y.last();
    return hw;
}

std::vector<double> lag12_forecast(const MonthlySeries& train, std::size_t h) {
    std::vector<double> out;
    for (std::size_t k = 1; k <= h; ++k) {
        long back = static_cast<long>(train.size() - 1 + k) - 12;
        while (back >= static_cast<long>(train.size())) back -= 12;
        out.push_back(train[static_cast<std::size_t>(back)]);
    }
    return out;
}

std::vector<MonthKey> horizon_months(const MonthlySeries& train, std::size_t h) {
    std::vector<MonthKey> out;
    for (std::size_t k = 1; k <= h; ++k) out.push_back(train.last().plus(static_cast<long>(k)));
    return out;
}

}  // namespace

std::vector<double> HoltWinters::forecast(std::size_t h) const {
    std::vector<double> out;
    for (std::size_t k = 1; k <= h; ++k) {
        const MonthKey m = last.plus(static_cast<long>(k));
        out.push_back((level + static_cast<double>(k) * slope) * seasonal[slot(m)]);
    }
    return out;
}

HoltWinters fit_holt_winters(const MonthlySeries& series) {
    if (series.size() < 24) throw ValidationError("Holt-Winters needs at least 24 months");
    for (double v : series.values()) {
        if (!(v > 0.0)) throw ValidationError("Holt-Winters needs strictly positive values");
    }
    const auto objective = [&](std::span<const double> x) {
        const double sse = smooth(series, logistic(x[0]), logistic(x[1]), logistic(x[2])).sse;
        return std::isfinite(sse) ? sse : std::numeric_limits<double>::infinity();
    };
    const auto result = optim::nelder_mead(objective, {logit(0.3), logit(0.1), logit(0.1)});
    HoltWinters hw = smooth(series, logistic(result.x[0]), logistic(result.x[1]), logistic(result.x[2]));
    if (!std::isfinite(hw.level) || !std::isfinite(hw.slope)) throw NumericError("Holt-Winters states diverged");

    // Express the seasonal state as mean-1 indices; the level and slope absorb the scale.
    const double mean = std::accumulate(hw.seasonal.begin(), hw.seasonal.end(), 0.0) / 12.0;
    if (!(mean > 0.0)) throw NumericError("Holt-Winters seasonal states are not positive");
    for (double& s : hw.seasonal) s /= mean;
    hw.level *= mean;
    hw.slope *= mean;
    return hw;
}

double LinearModel::coefficient(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return coefficients(static_cast<Eigen::Index>(i));
    }
    throw ValidationError("linear model has no term '" + std::string(name) + "'");
}

namespace {

std::vector<std::string> mlr_columns(const ExogTable& exog) {
    std::vector<std::string> out;
    for (const auto& n : exog.names()) {
        if (n != ExogTable::kMonthIndex) out.push_back(n);
    }
    return out;
}

Eigen::MatrixXd mlr_design(const ExogTable& exog, std::span<const MonthKey> months,
                           std::span<const std::string> columns) {
    const FeatureMatrix f = exog_features(exog, months, columns);
    const auto n = static_cast<Eigen::Index>(months.size());
    const auto c = static_cast<Eigen::Index>(columns.size());
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, 1 + c + 11);
    X.col(0).setOnes();
    X.middleCols(1, c) = f.data;
    for (Eigen::Index i = 0; i < n; ++i) {
        const int m = months[static_cast<std::size_t>(i)].month;
        if (m > 1) X(i, 1 + c + (m - 2)) = 1.0;
    }
    return X;
}

}  // namespace

std::vector<double> LinearModel::predict(const ExogTable& exog, std::span<const MonthKey> months) const {
    const std::vector<std::string> columns(names.begin() + 1, names.end() - 11);
    const Eigen::VectorXd y = mlr_design(exog, months, columns) * coefficients;
    return {y.data(), y.data() + y.size()};
}

LinearModel fit_mlr(const MonthlySeries& series, const ExogTable& exog) {
    LinearModel model;
    const auto columns = mlr_columns(exog);
    std::vector<MonthKey> months;
    for (std::size_t i = 0; i < series.size(); ++i) months.push_back(series.key(i));
    const Eigen::MatrixXd X = mlr_design(exog, months, columns);
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(series.values().data(), X.rows());

    Eigen::MatrixXd A = X.transpose() * X;
    for (Eigen::Index j = 1; j < A.cols(); ++j) A(j, j) += 1e-8;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success) throw NumericError("normal equations could not be factorized");
    model.coefficients = ldlt.solve(X.transpose() * y);
    if (!model.coefficients.allFinite()) throw NumericError("linear regression produced non-finite coefficients");

    model.names.push_back("intercept");
    model.names.insert(model.names.end(), columns.begin(), columns.end());
    for (int m = 2; m <= 12; ++m) model.names.push_back("month_" + std::to_string(m));
    return model;
}

ForecastReport run_baseline(std::string_view name, const MonthlySeries& series, const ExogTable& exog,
                            std::size_t h, const XasxgConfig& config) {
    if (std::find(kBaselineNames.begin(), kBaselineNames.end(), name) == kBaselineNames.end()) {
        throw ValidationError("unknown baseline '" + std::string(name) +
                              "' (expected seasonal_naive, ets, mlr, arima or x12_arima)");
    }
    if (h == 0) throw ValidationError("horizon must be >= 1");
    config.validate();
    if (series.size() < 36 + h) {
        throw ValidationError("series length " + std::to_string(series.size()) + " is below 36 + horizon (" +
                              std::to_string(36 + h) + ")");
    }
    const auto split = train_test_split(series, h);
    const auto& train = split.train;
    const auto months = horizon_months(train, h);

    ForecastReport report;
    report.model = std::string(name);
    report.seed = config.seed;
    report.months = months;
    report.actual = split.test.values();
    report.config = config.echo();

    arima::FitOptions fit_options;
    fit_options.seed = config.seed;

    if (name == "seasonal_naive") {
        report.predicted = lag12_forecast(train, h);
    } else if (name == "ets") {
        const auto hw = fit_holt_winters(train);
        report.predicted = hw.forecast(h);
        report.diagnostics["alpha"] = hw.alpha;
        report.diagnostics["beta"] = hw.beta;
        report.diagnostics["gamma"] = hw.gamma;
        report.diagnostics["sse"] = hw.sse;
    } else if (name == "mlr") {
        // Exogenous coverage of the training months is checked by the fit.
        report.predicted = fit_mlr(train, exog).predict(exog, months);
    } else if (name == "arima") {
        const auto model = arima::fit(train.values(), config.arima, fit_options);
        report.predicted = arima::forecast(model, h);
        report.diagnostics["arima_css"] = model.css;
    } else {
        const auto comps = decomp::decompose(train);
        const auto adjusted = decomp::seasonally_adjust(train, comps);
        const auto model = arima::fit(adjusted, config.arima, fit_options);
        ComponentForecast cf;
        cf.trend = arima::forecast(model, h);
        for (const auto& m : months) cf.seasonal.push_back(comps.index_for(m));
        cf.irregular.assign(h, 1.0);
        report.predicted = cf.aggregate();
        report.components = std::move(cf);
        report.diagnostics["arima_css"] = model.css;
    }
    attach_metrics(report);
    return report;
}

}  // namespace loadcast::pipeline
