#include "loadcast/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "loadcast/crossval.hpp"
#include "loadcast/decomp.hpp"
#include "loadcast/error.hpp"
#include "loadcast/featsel.hpp"
#include "loadcast/kpca.hpp"
#include "loadcast/metrics.hpp"

namespace loadcast::pipeline {

namespace {

const std::vector<std::string> kCalendarBlock{std::string(ExogTable::kTemp), std::string(ExogTable::kHoliday),
                                              std::string(ExogTable::kMonthIndex)};

std::string join(std::span<const std::string> parts) {
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : ",") + p;
    return out;
}

std::vector<MonthKey> keys_of(const MonthlySeries& series) {
    std::vector<MonthKey> keys;
    for (std::size_t i = 0; i < series.size(); ++i) keys.push_back(series.key(i));
    return keys;
}

/// Weather/calendar block, optionally passed through kernel PCA fitted on the training rows.
class CalendarBlock {
public:
    CalendarBlock(const Eigen::MatrixXd& train_raw, const KpcaOptions& options) : options_(options) {
        if (options_.mode == KpcaMode::Off) return;
        scaler_ = featsel::ColumnScaler::fit(train_raw);
        const double gamma = options_.gamma.value_or(1.0 / static_cast<double>(train_raw.cols()));
        model_ = featsel::kpca_fit(scaler_.apply(train_raw), gamma, options_.variance_fraction);
    }

    Eigen::MatrixXd apply(const Eigen::MatrixXd& raw) const {
        if (options_.mode == KpcaMode::Off) return raw;
        const Eigen::MatrixXd scores = featsel::kpca_transform(model_, scaler_.apply(raw)).scores;
        if (options_.mode == KpcaMode::Replace) return scores;
        Eigen::MatrixXd out(raw.rows(), raw.cols() + scores.cols());
        out << raw, scores;
        return out;
    }

    std::size_t retained() const { return options_.mode == KpcaMode::Off ? 0 : model_.retained; }

private:
    KpcaOptions options_;
    featsel::ColumnScaler scaler_;
    featsel::KpcaModel model_;
};

struct Design {
    Eigen::MatrixXd X_train;
    Eigen::VectorXd y_train;
    Eigen::MatrixXd X_test;
    std::size_t kpca_retained = 0;
};

void require_history(const MonthlySeries& train, std::string_view what) {
    if (train.size() < 24) {
        throw ValidationError(std::string(what) + " forecast needs at least 24 months of history, got " +
                              std::to_string(train.size()));
    }
}

void require_after(const MonthlySeries& train, std::span<const MonthKey> test_months) {
    if (test_months.empty()) throw ValidationError("no test months to forecast");
    for (const auto& k : test_months) {
        if (!(train.last() < k)) throw ValidationError("test month " + k.str() + " is not after the training data");
    }
}

/// Latest training value of the same calendar month at least 12 months back.
double lag12_value(const MonthlySeries& train, MonthKey month) {
    long back = train.start().until(month) - 12;
    const long last = static_cast<long>(train.size()) - 1;
    while (back > last) back -= 12;
    return train[static_cast<std::size_t>(back)];
}

Design seasonal_design(const MonthlySeries& seasonal_train, const ExogTable& exog,
                       std::span<const MonthKey> test_months, const KpcaOptions& kpca) {
    require_history(seasonal_train, "seasonal");
    require_after(seasonal_train, test_months);
    const auto keys = keys_of(seasonal_train);
    const std::span<const MonthKey> rows(keys.begin() + 12, keys.end());

    const Eigen::MatrixXd raw_train = exog_features(exog, rows, kCalendarBlock).data;
    const CalendarBlock block(raw_train, kpca);
    const Eigen::MatrixXd train_block = block.apply(raw_train);
    const Eigen::MatrixXd test_block = block.apply(exog_features(exog, test_months, kCalendarBlock).data);

    Design d;
    d.kpca_retained = block.retained();
    const auto n = static_cast<Eigen::Index>(rows.size());
    d.X_train.resize(n, 1 + train_block.cols());
    d.y_train.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto src = static_cast<std::size_t>(i) + 12;
        d.X_train(i, 0) = seasonal_train[src - 12];
        d.y_train(i) = seasonal_train[src];
    }
    d.X_train.rightCols(train_block.cols()) = train_block;

    const auto m = static_cast<Eigen::Index>(test_months.size());
    d.X_test.resize(m, 1 + test_block.cols());
    for (Eigen::Index i = 0; i < m; ++i) {
        d.X_test(i, 0) = lag12_value(seasonal_train, test_months[static_cast<std::size_t>(i)]);
    }
    d.X_test.rightCols(test_block.cols()) = test_block;
    return d;
}

Design irregular_design(const MonthlySeries& irregular_train, const ExogTable& exog,
                        std::span<const MonthKey> test_months, const KpcaOptions& kpca) {
    require_history(irregular_train, "irregular");
    require_after(irregular_train, test_months);
    const auto keys = keys_of(irregular_train);
    const Eigen::MatrixXd raw_train = exog_features(exog, keys, kCalendarBlock).data;
    const CalendarBlock block(raw_train, kpca);

    Design d;
    d.kpca_retained = block.retained();
    d.X_train = block.apply(raw_train);
    d.y_train = Eigen::Map<const Eigen::VectorXd>(irregular_train.values().data(),
                                                  static_cast<Eigen::Index>(irregular_train.size()));
    d.X_test = block.apply(exog_features(exog, test_months, kCalendarBlock).data);
    return d;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

double gbt_cv_rmse(const Design& d, const gbt::GbtParams& params, std::size_t folds, std::uint64_t seed) {
    return evalstat::cross_val_rmse(
        d.X_train, d.y_train, folds, seed,
        [&](const Eigen::MatrixXd& X, const Eigen::VectorXd& y) { return gbt::fit(X, y, params); },
        [](const gbt::GbtModel& m, const Eigen::MatrixXd& X) { return m.predict(X); });
}

std::string kpca_mode_name(KpcaMode mode) {
    switch (mode) {
        case KpcaMode::Off: return "off";
        case KpcaMode::Replace: return "replace";
        case KpcaMode::Augment: return "augment";
    }
    return "off";
}

ForecastReport run_components(const MonthlySeries& series, const ExogTable& exog, std::size_t h,
                              const XasxgConfig& config, std::optional<AblationVariant> variant) {
    if (h == 0) throw ValidationError("horizon must be >= 1");
    config.validate();
    if (series.size() < 36 + h) {
        throw ValidationError("series length " + std::to_string(series.size()) + " is below 36 + horizon (" +
                              std::to_string(36 + h) + ")");
    }
    const auto split = train_test_split(series, h);
    const auto& train = split.train;
    const auto test_months = keys_of(split.test);
    const auto train_months = keys_of(train);

    const auto comps = decomp::decompose(train);

    ForecastReport report;
    report.model = variant ? std::string(variant_name(*variant)) : "XASXG";
    report.seed = config.seed;
    report.months = test_months;
    report.actual = split.test.values();
    report.config = config.echo();

    gbt::GbtParams gbt_params = config.gbt;
    gbt_params.seed = config.seed;
    arima::FitOptions fit_options;
    fit_options.seed = config.seed;

    ComponentForecast cf;

    // Trend: ARIMA plus SVR residual correction.
    const auto columns = resolve_trend_features(exog, config.trend_features);
    const Eigen::MatrixXd f_train = exog_features(exog, train_months, columns).data;
    const Eigen::MatrixXd f_test = exog_features(exog, test_months, columns).data;
    const std::vector<svr::SvrParams> grid =
        config.svr_grid_search ? svr::default_grid(std::max<std::size_t>(1, columns.size()))
                               : std::vector<svr::SvrParams>{};
    const auto trend = forecast_trend(comps.trend, f_train, f_test, h, config.arima, config.svr, fit_options, grid,
                                      std::max<std::size_t>(2, config.cv_folds));
    const bool arima_only = variant == AblationVariant::TrendArimaOnly;
    cf.trend = arima_only ? trend.arima : trend.total;
    report.diagnostics["arima_css"] = trend.model.css;
    report.diagnostics["arima_sigma2"] = trend.model.sigma2;
    report.diagnostics["svr_rows"] = static_cast<double>(trend.svr_rows);

    // Seasonal.
    const MonthlySeries seasonal_train(train.start(), comps.seasonal);
    if (variant == AblationVariant::SeasonalHistorical) {
        for (const auto& k : test_months) cf.seasonal.push_back(lag12_value(seasonal_train, k));
    } else {
        const auto d = seasonal_design(seasonal_train, exog, test_months, config.kpca);
        const auto model = gbt::fit(d.X_train, d.y_train, gbt_params);
        cf.seasonal = to_vector(model.predict(d.X_test));
        if (config.cv_folds >= 2 && static_cast<std::size_t>(d.y_train.size()) >= config.cv_folds) {
            report.diagnostics["gbt_cv_rmse_seasonal"] = gbt_cv_rmse(d, gbt_params, config.cv_folds, config.seed);
        }
        if (d.kpca_retained > 0) report.diagnostics["kpca_retained_seasonal"] = static_cast<double>(d.kpca_retained);
    }

    // Irregular.
    const MonthlySeries irregular_train(train.start(), comps.irregular);
    if (variant == AblationVariant::IrregularHistoricalMean) {
        const auto& ir = comps.irregular;
        const double mean = std::accumulate(ir.begin(), ir.end(), 0.0) / static_cast<double>(ir.size());
        cf.irregular.assign(h, mean);
    } else {
        const auto d = irregular_design(irregular_train, exog, test_months, config.kpca);
        const auto model = gbt::fit(d.X_train, d.y_train, gbt_params);
        cf.irregular = to_vector(model.predict(d.X_test));
        if (config.cv_folds >= 2 && static_cast<std::size_t>(d.y_train.size()) >= config.cv_folds) {
            report.diagnostics["gbt_cv_rmse_irregular"] = gbt_cv_rmse(d, gbt_params, config.cv_folds, config.seed);
        }
        if (d.kpca_retained > 0) report.diagnostics["kpca_retained_irregular"] = static_cast<double>(d.kpca_retained);
    }

    report.predicted = cf.aggregate();
    report.components = std::move(cf);
    attach_metrics(report);
    return report;
}

}  // namespace

std::vector<double> ComponentForecast::aggregate() const {
    if (seasonal.size() != trend.size() || irregular.size() != trend.size()) {
        throw ValidationError("component forecasts have different horizons");
    }
    std::vector<double> out(trend.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = trend[i] * seasonal[i] * irregular[i];
    return out;
}

void ForecastReport::check_consistency() const {
    if (predicted.size() != months.size()) throw ValidationError("report: predicted length does not match months");
    if (!actual.empty() && actual.size() != months.size()) {
        throw ValidationError("report: actual length does not match months");
    }
    if (components) {
        if (components->size() != months.size()) throw ValidationError("report: component length does not match months");
        const auto product = components->aggregate();
        for (std::size_t i = 0; i < product.size(); ++i) {
            if (std::abs(product[i] - predicted[i]) > 1e-12 * std::max(1.0, std::abs(predicted[i]))) {
                throw ValidationError("report: predicted value for " + months[i].str() +
                                      " is not the product of its components");
            }
        }
    }
    const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
    if (actual.empty()) {
        if (mape || mae) throw ValidationError("report: metrics present without actual values");
        return;
    }
    if (!mape || !mae) throw ValidationError("report: actual values present without metrics");
    if (!close(*mape, evalstat::mape(actual, predicted))) throw ValidationError("report: stored MAPE does not match");
    if (!close(*mae, evalstat::mae(actual, predicted))) throw ValidationError("report: stored MAE does not match");
}

void XasxgConfig::validate() const {
    arima.validate();
    svr.validate();
    gbt.validate();
    if (!(kpca.variance_fraction > 0.0 && kpca.variance_fraction <= 1.0)) {
        throw ValidationError("KPCA variance fraction must be in (0, 1]");
    }
    if (kpca.gamma && !(*kpca.gamma > 0.0)) throw ValidationError("KPCA gamma must be > 0");
}

std::map<std::string, std::string> XasxgConfig::echo() const {
    std::map<std::string, std::string> out;
    out["arima"] = std::to_string(arima.p) + "," + std::to_string(arima.d) + "," + std::to_string(arima.q);
    out["svr_c"] = format_double(svr.C);
    out["svr_epsilon"] = format_double(svr.epsilon);
    out["svr_gamma"] = svr.gamma ? format_double(*svr.gamma) : "auto";
    out["grid_search"] = svr_grid_search ? "true" : "false";
    out["gbt_learning_rate"] = format_double(gbt.learning_rate);
    out["gbt_trees"] = std::to_string(gbt.trees);
    out["gbt_max_depth"] = std::to_string(gbt.max_depth);
    out["gbt_lambda"] = format_double(gbt.lambda);
    out["gbt_subsample"] = format_double(gbt.subsample);
    out["trend_features"] = join(trend_features);
    out["kpca"] = kpca_mode_name(kpca.mode);
    if (kpca.mode != KpcaMode::Off) {
        out["kpca_gamma"] = kpca.gamma ? format_double(*kpca.gamma) : "auto";
        out["kpca_variance_fraction"] = format_double(kpca.variance_fraction);
    }
    out["cv_folds"] = std::to_string(cv_folds);
    out["seed"] = std::to_string(seed);
    return out;
}

std::vector<std::string> resolve_trend_features(const ExogTable& exog, std::span<const std::string> wanted) {
    std::vector<std::string> out;
    for (const auto& name : wanted) {
        if (exog.has_column(name) && std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    }
    return out;
}

TrendForecast forecast_trend(std::span<const double> trend_train, const Eigen::MatrixXd& features_train,
                             const Eigen::MatrixXd& features_test, std::size_t h, const arima::ArimaSpec& spec,
                             const svr::SvrParams& svr_params, const arima::FitOptions& fit_options,
                             std::span<const svr::SvrParams> grid, std::size_t grid_folds) {
    if (h == 0) throw ValidationError("horizon must be >= 1");
    if (static_cast<std::size_t>(features_train.rows()) != trend_train.size()) {
        throw ValidationError("trend features have " + std::to_string(features_train.rows()) + " rows for " +
                              std::to_string(trend_train.size()) + " trend values");
    }
    if (static_cast<std::size_t>(features_test.rows()) != h) {
        throw ValidationError("test features have " + std::to_string(features_test.rows()) +
                              " rows for horizon " + std::to_string(h));
    }
    if (features_test.cols() != features_train.cols()) throw ValidationError("train/test feature columns differ");

    TrendForecast out;
    out.model = arima::fit(trend_train, spec, fit_options);
    out.arima = arima::forecast(out.model, h);
    out.correction.assign(h, 0.0);
    out.svr_params = svr_params;

    const auto fitted = out.model.fitted();
    const auto burn_in = static_cast<std::size_t>(spec.d + std::max(spec.p, spec.q));
    if (features_train.cols() > 0 && trend_train.size() >= burn_in + 2) {
        const auto rows = static_cast<Eigen::Index>(trend_train.size() - burn_in);
        const Eigen::MatrixXd X = features_train.bottomRows(rows);
        Eigen::VectorXd r(rows);
        for (Eigen::Index i = 0; i < rows; ++i) {
            const auto t = burn_in + static_cast<std::size_t>(i);
            r(i) = trend_train[t] - fitted[t];
        }
        if (!grid.empty()) {
            const auto k = std::min<std::size_t>(grid_folds, static_cast<std::size_t>(rows));
            out.svr_params = svr::grid_search(X, r, grid, k, fit_options.seed).best;
        }
        const auto model = svr::fit(X, r, out.svr_params);
        const Eigen::VectorXd corr = model.predict(features_test);
        for (std::size_t i = 0; i < h; ++i) out.correction[i] = corr(static_cast<Eigen::Index>(i));
        out.svr_rows = static_cast<std::size_t>(rows);
    }
    out.total.resize(h);
    for (std::size_t i = 0; i < h; ++i) out.total[i] = out.arima[i] + out.correction[i];
    return out;
}

std::vector<double> forecast_seasonal(const MonthlySeries& seasonal_train, const ExogTable& exog,
                                      std::span<const MonthKey> test_months, const gbt::GbtParams& params,
                                      const KpcaOptions& kpca) {
    const auto d = seasonal_design(seasonal_train, exog, test_months, kpca);
    return to_vector(gbt::fit(d.X_train, d.y_train, params).predict(d.X_test));
}

std::vector<double> forecast_irregular(const MonthlySeries& irregular_train, const ExogTable& exog,
                                       std::span<const MonthKey> test_months, const gbt::GbtParams& params,
                                       const KpcaOptions& kpca) {
    const auto d = irregular_design(irregular_train, exog, test_months, kpca);
    return to_vector(gbt::fit(d.X_train, d.y_train, params).predict(d.X_test));
}

ForecastReport forecast_xasxg(const MonthlySeries& series, const ExogTable& exog, std::size_t h,
                              const XasxgConfig& config) {
    return run_components(series, exog, h, config, std::nullopt);
}

std::string_view variant_name(AblationVariant variant) {
    switch (variant) {
        case AblationVariant::TrendArimaOnly: return "TrendArimaOnly";
        case AblationVariant::SeasonalHistorical: return "SeasonalHistorical";
        case AblationVariant::IrregularHistoricalMean: return "IrregularHistoricalMean";
    }
    throw ValidationError("unknown ablation variant");
}

AblationVariant variant_from_number(int number) {
    if (number < 1 || number > 3) throw ValidationError("ablation variant must be 1, 2 or 3, got " + std::to_string(number));
    return static_cast<AblationVariant>(number);
}

ForecastReport run_ablation(const MonthlySeries& series, const ExogTable& exog, std::size_t h,
                            AblationVariant variant, const XasxgConfig& config) {
    return run_components(series, exog, h, config, variant);
}

void attach_metrics(ForecastReport& report) {
    if (report.actual.empty()) {
        report.mape.reset();
        report.mae.reset();
        return;
    }
    report.mape = evalstat::mape(report.actual, report.predicted);
    report.mae = evalstat::mae(report.actual, report.predicted);
}

}  // namespace loadcast::pipeline
