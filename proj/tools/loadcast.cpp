// loadcast: monthly load decomposition, forecasting and model comparison.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "loadcast/baselines.hpp"
#include "loadcast/decomp.hpp"
#include "loadcast/error.hpp"
#include "loadcast/featsel.hpp"
#include "loadcast/fixtures.hpp"
#include "loadcast/kpca.hpp"
#include "loadcast/paper_check.hpp"
#include "loadcast/pipeline.hpp"
#include "loadcast/report.hpp"
#include "loadcast/stats.hpp"
#include "loadcast/synth.hpp"

namespace {

using namespace loadcast;
using nlohmann::json;

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        write_text_file(path, text);
    }
}

std::uint64_t resolve_seed(std::uint64_t flag) {
    const char* env = std::getenv("LOADCAST_SEED");
    if (!env || !*env) return flag;
    try {
        std::size_t used = 0;
        const auto v = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument("trailing text");
        return v;
    } catch (const std::exception&) {
        throw ValidationError(std::string("LOADCAST_SEED is not an unsigned integer: '") + env + "'");
    }
}

arima::ArimaSpec parse_order(const std::string& text) {
    arima::ArimaSpec spec;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> spec.p >> c1 >> spec.d >> c2 >> spec.q) || c1 != ',' || c2 != ',' || !in.eof()) {
        throw ValidationError("ARIMA order must look like p,d,q, got '" + text + "'");
    }
    spec.validate();
    return spec;
}

/// Flags shared by every subcommand that runs the forecasting pipeline.
struct PipelineFlags {
    std::string series_path;
    std::string exog_path;
    std::size_t horizon = 12;
    std::string order = "2,2,1";
    double gbt_lr = 0.02;
    int gbt_trees = 1000;
    int gbt_depth = 3;
    double gbt_lambda = 1.0;
    double gbt_subsample = 1.0;
    double svr_c = 10.0;
    double svr_eps = 0.01;
    std::optional<double> svr_gamma;
    bool grid_search = false;
    std::string kpca = "off";
    std::optional<double> kpca_gamma;
    double kpca_fraction = 0.95;
    std::vector<std::string> trend_features{"econ_index", "month_index", "temp_mean_c"};
    std::size_t cv_folds = 10;
    std::uint64_t seed = 42;
    std::string output;
    std::string plot;

    void attach(CLI::App* app) {
        app->add_option("series", series_path, "Monthly load CSV (month,load)")->required();
        app->add_option("exog", exog_path, "Exogenous CSV covering the series and horizon")->required();
        app->add_option("--horizon", horizon, "Held-out months at the end of the series");
        app->add_option("--arima", order, "ARIMA order p,d,q");
        app->add_option("--gbt-lr", gbt_lr, "Boosting learning rate");
        app->add_option("--gbt-trees", gbt_trees, "Boosting rounds");
        app->add_option("--gbt-depth", gbt_depth, "Maximum tree depth");
        app->add_option("--gbt-lambda", gbt_lambda, "L2 penalty on leaf weights");
        app->add_option("--gbt-subsample", gbt_subsample, "Row fraction per tree");
        app->add_option("--svr-c", svr_c, "SVR box constraint");
        app->add_option("--svr-eps", svr_eps, "SVR tube half-width (standardized target)");
        app->add_option("--svr-gamma", svr_gamma, "SVR RBF width (default 1/columns)");
        app->add_flag("--grid-search", grid_search, "Choose SVR parameters by cross-validation");
        app->add_option("--kpca", kpca, "Kernel PCA on the calendar block")
            ->check(CLI::IsMember({"off", "replace", "augment"}));
        app->add_option("--kpca-gamma", kpca_gamma, "KPCA RBF width (default 1/columns)");
        app->add_option("--kpca-fraction", kpca_fraction, "KPCA retained variance fraction");
        app->add_option("--trend-features", trend_features, "Exogenous columns for the trend SVR")->delimiter(',');
        app->add_option("--cv-folds", cv_folds, "Folds for GBT cross-validation diagnostics (0 disables)");
        app->add_option("--seed", seed, "Random seed (LOADCAST_SEED overrides)");
        app->add_option("-o,--output", output, "Output path (default stdout)");
        app->add_option("--plot", plot, "Also write a long-format month,series,value CSV");
    }

    pipeline::XasxgConfig config() const {
        pipeline::XasxgConfig c;
        c.arima = parse_order(order);
        c.gbt.learning_rate = gbt_lr;
        c.gbt.trees = gbt_trees;
        c.gbt.max_depth = gbt_depth;
        c.gbt.lambda = gbt_lambda;
        c.gbt.subsample = gbt_subsample;
        c.svr.C = svr_c;
        c.svr.epsilon = svr_eps;
        c.svr.gamma = svr_gamma;
        c.svr_grid_search = grid_search;
        c.kpca.mode = kpca == "replace"   ? pipeline::KpcaMode::Replace
                      : kpca == "augment" ? pipeline::KpcaMode::Augment
                                          : pipeline::KpcaMode::Off;
        c.kpca.gamma = kpca_gamma;
        c.kpca.variance_fraction = kpca_fraction;
        c.trend_features = trend_features;
        c.cv_folds = cv_folds;
        c.seed = resolve_seed(seed);
        c.validate();
        return c;
    }

    MonthlySeries series() const { return parse_series(read_text_file(series_path)); }
    ExogTable exog() const { return parse_exog(read_text_file(exog_path)); }
};

std::string components_csv(const MonthlySeries& series, const ComponentSet& c) {
    std::string out = "month,actual,trend,seasonal,irregular\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += series.key(i).str() + "," + format_double(series[i]) + "," + format_double(c.trend[i]) + "," +
               format_double(c.seasonal[i]) + "," + format_double(c.irregular[i]) + "\n";
    }
    return out;
}

std::string report_csv(const pipeline::ForecastReport& r) {
    std::string out = "month,actual,predicted,trend,seasonal,irregular\n";
    for (std::size_t i = 0; i < r.months.size(); ++i) {
        out += r.months[i].str() + "," + (r.actual.empty() ? "" : format_double(r.actual[i])) + "," +
               format_double(r.predicted[i]);
        if (r.components) {
            out += "," + format_double(r.components->trend[i]) + "," + format_double(r.components->seasonal[i]) +
                   "," + format_double(r.components->irregular[i]);
        } else {
            out += ",,,";
        }
        out += "\n";
    }
    return out;
}

void write_report(const pipeline::ForecastReport& report, const PipelineFlags& flags, const std::string& format) {
    emit(flags.output, format == "csv" ? report_csv(report) : report_to_json(report));
    if (!flags.plot.empty()) write_text_file(flags.plot, report_plot_csv(report));
}

pipeline::ForecastReport run_model(const std::string& model, const MonthlySeries& series, const ExogTable& exog,
                                   std::size_t h, const pipeline::XasxgConfig& config) {
    if (model == "xasxg") return pipeline::forecast_xasxg(series, exog, h, config);
    return pipeline::run_baseline(model, series, exog, h, config);
}

int run(int argc, char** argv) {
    CLI::App app{"Monthly electricity load decomposition and forecasting"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "loadcast 1.0.0");

    // decompose
    std::string dec_series, dec_output, dec_method = "mean", dec_format = "csv";
    auto* dec = app.add_subcommand("decompose", "Split a series into trend, seasonal and irregular components");
    dec->add_option("series", dec_series, "Monthly load CSV")->required();
    dec->add_option("--method", dec_method, "Seasonal index estimator")->check(CLI::IsMember({"mean", "median"}));
    dec->add_option("--format", dec_format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    dec->add_option("-o,--output", dec_output, "Output path (default stdout)");

    // features
    std::string feat_series, feat_exog, feat_output, feat_kpca = "off";
    double feat_rmin = 0.3, feat_kpca_fraction = 0.95;
    std::optional<double> feat_kpca_gamma;
    std::size_t feat_ktop = 8;
    auto* feat = app.add_subcommand("features", "Score and select exogenous features against the load");
    feat->add_option("series", feat_series, "Monthly load CSV")->required();
    feat->add_option("exog", feat_exog, "Exogenous CSV")->required();
    feat->add_option("--r-min", feat_rmin, "Minimum |Pearson r| to keep a column");
    feat->add_option("--k-top", feat_ktop, "Columns kept after the correlation filter");
    feat->add_option("--kpca", feat_kpca, "Report the kernel PCA spectrum")->check(CLI::IsMember({"off", "on"}));
    feat->add_option("--kpca-gamma", feat_kpca_gamma, "KPCA RBF width (default 1/columns)");
    feat->add_option("--kpca-fraction", feat_kpca_fraction, "KPCA retained variance fraction");
    feat->add_option("-o,--output", feat_output, "Output path (default stdout)");

    // forecast
    PipelineFlags fc_flags;
    std::string fc_model = "xasxg", fc_format = "json";
    auto* fc = app.add_subcommand("forecast", "Forecast the held-out months and score them");
    fc_flags.attach(fc);
    fc->add_option("--model", fc_model, "xasxg or a baseline")
        ->check(CLI::IsMember({"xasxg", "seasonal_naive", "ets", "mlr", "arima", "x12_arima"}));
    fc->add_option("--format", fc_format, "Output format")->check(CLI::IsMember({"json", "csv"}));

    // ablate
    PipelineFlags ab_flags;
    int ab_variant = 1;
    std::string ab_format = "json";
    auto* ab = app.add_subcommand("ablate", "Run XASXG with one component model replaced");
    ab_flags.attach(ab);
    ab->add_option("--variant", ab_variant, "1 trend ARIMA only, 2 historical seasonal, 3 mean irregular")
        ->required()
        ->check(CLI::Range(1, 3));
    ab->add_option("--format", ab_format, "Output format")->check(CLI::IsMember({"json", "csv"}));

    // backtest
    PipelineFlags bt_flags;
    std::size_t bt_trials = 30;
    std::string bt_model = "xasxg";
    auto* bt = app.add_subcommand("backtest", "Repeat a forecast over consecutive seeds and summarize");
    bt_flags.attach(bt);
    bt->add_option("--trials", bt_trials, "Number of seeded trials")->check(CLI::PositiveNumber);
    bt->add_option("--model", bt_model, "xasxg or a baseline")
        ->check(CLI::IsMember({"xasxg", "seasonal_naive", "ets", "mlr", "arima", "x12_arima"}));

    // compare
    std::string cmp_matrix, cmp_reference, cmp_output, cmp_format = "json", cmp_sided = "one";
    auto* cmp = app.add_subcommand("compare", "Win/loss, Friedman ranks and Wilcoxon tests for an error matrix");
    cmp->add_option("matrix", cmp_matrix, "CSV with a month column and one column per model")->required();
    cmp->add_option("--reference", cmp_reference, "Reference model column")->required();
    cmp->add_option("--sided", cmp_sided, "Wilcoxon alternative")->check(CLI::IsMember({"one", "two"}));
    cmp->add_option("--format", cmp_format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    cmp->add_option("-o,--output", cmp_output, "Output path (default stdout)");

    // paper-check
    std::string pc_table1, pc_table2;
    auto* pc = app.add_subcommand("paper-check", "Recompute the summary rows of the bundled comparison tables");
    pc->add_option("--table1", pc_table1, "Replace the Table I cells with this matrix CSV");
    pc->add_option("--table2", pc_table2, "Replace the Table II cells with this matrix CSV");

    // synth
    SynthConfig sc;
    std::string syn_series, syn_exog, syn_truth, syn_trend = "logistic", syn_start = "2013-01";
    bool syn_no_econ = false;
    auto* syn = app.add_subcommand("synth", "Generate a synthetic load series with exogenous drivers");
    syn->add_option("--series-out", syn_series, "Series CSV path")->required();
    syn->add_option("--exog-out", syn_exog, "Exogenous CSV path")->required();
    syn->add_option("--truth-out", syn_truth, "Ground-truth components CSV path");
    syn->add_option("--length", sc.length, "Months to generate");
    syn->add_option("--start", syn_start, "First month YYYY-MM");
    syn->add_option("--trend", syn_trend, "Trend shape")->check(CLI::IsMember({"linear", "logistic"}));
    syn->add_option("--base", sc.base, "Trend value at the first month");
    syn->add_option("--slope", sc.slope, "Linear trend change per month");
    syn->add_option("--ceiling", sc.ceiling, "Logistic saturation level");
    syn->add_option("--rate", sc.rate, "Logistic growth rate per month");
    syn->add_option("--log-sd", sc.irregular_log_sd, "Irregular log standard deviation");
    syn->add_option("--temp-effect", sc.coupling.temp_effect, "Log response per degree of temperature anomaly");
    syn->add_option("--holiday-effect", sc.coupling.holiday_effect, "Log response per extra holiday day");
    syn->add_flag("--no-econ", syn_no_econ, "Omit the econ_index column");
    syn->add_option("--seed", sc.seed, "Random seed (LOADCAST_SEED overrides)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    if (dec->parsed()) {
        const auto series = parse_series(read_text_file(dec_series));
        decomp::DecomposeOptions opt;
        opt.method = dec_method == "median" ? decomp::IndexMethod::Median : decomp::IndexMethod::Mean;
        const auto c = decomp::decompose(series, opt);
        if (dec_format == "csv") {
            emit(dec_output, components_csv(series, c));
        } else {
            json j;
            j["start"] = series.start().str();
            j["trend"] = c.trend;
            j["seasonal"] = c.seasonal;
            j["irregular"] = c.irregular;
            j["indices"] = c.indices;
            emit(dec_output, j.dump(2) + "\n");
        }
        return 0;
    }

    if (feat->parsed()) {
        const auto series = parse_series(read_text_file(feat_series));
        const auto exog = parse_exog(read_text_file(feat_exog));
        const auto fm = align(series, exog, series.values());
        featsel::SelectOptions opt;
        opt.r_min = feat_rmin;
        opt.k_top = feat_ktop;
        if (!(opt.r_min >= 0.0 && opt.r_min <= 1.0)) throw ValidationError("--r-min must be in [0, 1]");
        if (opt.k_top < 1) throw ValidationError("--k-top must be >= 1");
        const auto rep = featsel::analyze(fm, opt);
        json cols = json::array();
        for (std::size_t i = 0; i < rep.names.size(); ++i) {
            cols.push_back({{"name", rep.names[i]},
                            {"pearson", rep.pearson[i] ? json(*rep.pearson[i]) : json(nullptr)},
                            {"importance", rep.importance[i]},
                            {"selected", static_cast<bool>(rep.selected[i])}});
        }
        json j{{"rows", fm.rows()}, {"columns", cols}, {"fallback", rep.fallback}};
        if (feat_kpca == "on") {
            const auto scaler = featsel::ColumnScaler::fit(fm.data);
            const double gamma = feat_kpca_gamma.value_or(1.0 / static_cast<double>(fm.cols()));
            const auto model = featsel::kpca_fit(scaler.apply(fm.data), gamma, feat_kpca_fraction);
            j["kpca"] = {{"gamma", gamma},
                         {"variance_fraction", feat_kpca_fraction},
                         {"retained", model.retained},
                         {"eigenvalues", std::vector<double>(model.eigenvalues.data(),
                                                             model.eigenvalues.data() + model.eigenvalues.size())}};
        }
        emit(feat_output, j.dump(2) + "\n");
        return 0;
    }

    if (fc->parsed()) {
        const auto config = fc_flags.config();
        const auto report = run_model(fc_model, fc_flags.series(), fc_flags.exog(), fc_flags.horizon, config);
        write_report(report, fc_flags, fc_format);
        return 0;
    }

    if (ab->parsed()) {
        const auto config = ab_flags.config();
        const auto report = pipeline::run_ablation(ab_flags.series(), ab_flags.exog(), ab_flags.horizon,
                                                   pipeline::variant_from_number(ab_variant), config);
        write_report(report, ab_flags, ab_format);
        return 0;
    }

    if (bt->parsed()) {
        auto config = bt_flags.config();
        const auto series = bt_flags.series();
        const auto exog = bt_flags.exog();
        const auto summary = evalstat::multi_trial(
            [&](std::uint64_t seed) {
                auto c = config;
                c.seed = seed;
                const auto r = run_model(bt_model, series, exog, bt_flags.horizon, c);
                return evalstat::TrialMetrics{*r.mape, *r.mae};
            },
            bt_trials, config.seed);
        json per = json::array();
        for (std::size_t i = 0; i < summary.values.size(); ++i) {
            per.push_back({{"seed", config.seed + i}, {"mape", summary.values[i].mape}, {"mae", summary.values[i].mae}});
        }
        json j{{"model", bt_model},     {"trials", summary.trials},     {"base_seed", config.seed},
               {"horizon", bt_flags.horizon}, {"mape_mean", summary.mean_mape}, {"mape_std", summary.std_mape},
               {"mae_mean", summary.mean_mae},  {"mae_std", summary.std_mae},   {"runs", per}};
        emit(bt_flags.output, j.dump(2) + "\n");
        return 0;
    }

    if (cmp->parsed()) {
        const auto matrix = evalstat::parse_matrix(read_text_file(cmp_matrix));
        const auto sided = cmp_sided == "two" ? evalstat::Sided::Two : evalstat::Sided::OneLess;
        const auto report = evalstat::stat_report(matrix, cmp_reference, sided);
        if (!report.friedman) std::cerr << "note: " << report.friedman_note << "\n";
        emit(cmp_output, cmp_format == "csv" ? evalstat::stat_report_csv(matrix, report) : stat_report_to_json(report));
        return 0;
    }

    if (pc->parsed()) {
        auto first = evalstat::table_one();
        auto second = evalstat::table_two();
        if (!pc_table1.empty()) first.matrix = evalstat::parse_matrix(read_text_file(pc_table1));
        if (!pc_table2.empty()) second.matrix = evalstat::parse_matrix(read_text_file(pc_table2));
        const auto result = evalstat::paper_check(first, second);
        std::cout << evalstat::format_paper_check(result);
        return result.ok() ? 0 : 1;
    }

    if (syn->parsed()) {
        sc.start = MonthKey::parse(syn_start);
        sc.trend = syn_trend == "linear" ? TrendShape::Linear : TrendShape::Logistic;
        sc.coupling.econ_index = !syn_no_econ;
        sc.seed = resolve_seed(sc.seed);
        const auto data = synth_generate(sc);
        write_text_file(syn_series, serialize_series(data.series));
        write_text_file(syn_exog, serialize_exog(data.exog));
        if (!syn_truth.empty()) write_text_file(syn_truth, components_csv(data.series, data.truth));
        return 0;
    }
    return kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const loadcast::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const loadcast::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const loadcast::evalstat::TrialError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const loadcast::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
