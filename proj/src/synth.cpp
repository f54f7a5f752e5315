#include "loadcast/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "loadcast/error.hpp"

namespace loadcast {

namespace {

// Fixed public holidays per month; the 7-day spring festival moves between January and February.
constexpr std::array<double, 12> kFixedHolidays{1, 0, 0, 1, 3, 1, 0, 0, 1, 7, 0, 0};
constexpr double kSpringInJanuary = 0.4;
constexpr double kSpringFestivalDays = 7.0;
constexpr double kBridgeDayProbability = 0.3;

double climatology(int month) { return 15.0 - 13.0 * std::cos(2.0 * std::numbers::pi * (month - 1) / 12.0); }

}  // namespace

std::vector<double> ComponentSet::reconstruct() const {
    std::vector<double> out(trend.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = trend[i] * seasonal[i] * irregular[i];
    return out;
}

double max_reconstruction_error(const ComponentSet& components, const MonthlySeries& series) {
    const auto rebuilt = components.reconstruct();
    if (rebuilt.size() != series.size()) throw ValidationError("component length does not match series");
    double worst = 0.0;
    for (std::size_t i = 0; i < rebuilt.size(); ++i) {
        worst = std::max(worst, std::abs(rebuilt[i] - series[i]) / std::abs(series[i]));
    }
    return worst;
}

std::array<double, 12> normalized_indices(const std::array<double, 12>& raw) {
    double mean = 0.0;
    for (double v : raw) {
        if (!(v > 0.0)) throw ValidationError("seasonal indices must be positive");
        mean += v;
    }
    mean /= 12.0;
    std::array<double, 12> out{};
    for (std::size_t m = 0; m < 12; ++m) out[m] = raw[m] / mean;
    return out;
}

std::array<double, 12> SynthConfig::default_indices() {
    return normalized_indices({1.08, 0.88, 0.95, 0.93, 0.97, 1.03, 1.15, 1.17, 1.02, 0.93, 0.94, 1.05});
}

double expected_holiday_days(int month) {
    double days = kFixedHolidays[static_cast<std::size_t>(month - 1)] + kBridgeDayProbability;
    if (month == 1) days += kSpringInJanuary * kSpringFestivalDays;
    if (month == 2) days += (1.0 - kSpringInJanuary) * kSpringFestivalDays;
    return days;
}

void SynthConfig::validate() const {
    if (length < 1) throw ValidationError("synthetic length must be >= 1");
    double mean = 0.0;
    for (double v : seasonal_indices) {
        if (!(v > 0.0)) throw ValidationError("seasonal indices must be positive");
        mean += v;
    }
    mean /= 12.0;
    if (std::abs(mean - 1.0) > 1e-12) throw ValidationError("seasonal indices must have mean 1");
    if (!(irregular_log_sd >= 0.0)) throw ValidationError("irregular log-sd must be >= 0");
    if (coupling.temp_noise_sd < 0.0 || coupling.econ_noise_sd < 0.0) {
        throw ValidationError("noise standard deviations must be >= 0");
    }
    if (trend == TrendShape::Logistic) {
        if (!(base > 0.0 && ceiling > base && rate > 0.0)) {
            throw ValidationError("logistic trend requires 0 < base < ceiling and rate > 0");
        }
    } else if (!(base > 0.0 && base + slope * static_cast<double>(length - 1) > 0.0)) {
        throw ValidationError("linear trend must stay positive");
    }
}

SynthData synth_generate(const SynthConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::bernoulli_distribution spring_in_january(kSpringInJanuary);
    std::bernoulli_distribution bridge_day(kBridgeDayProbability);

    const std::size_t n = config.length;
    const auto& cpl = config.coupling;
    ComponentSet truth;
    truth.start = config.start;
    truth.indices = config.seasonal_indices;
    truth.trend.resize(n);
    truth.seasonal.resize(n);
    truth.irregular.resize(n);
    std::vector<double> temp(n), holidays(n), econ(n), load(n);

    bool spring_january = spring_in_january(rng);
    for (std::size_t t = 0; t < n; ++t) {
        const MonthKey key = config.start.plus(static_cast<long>(t));
        if (key.month == 1 && t > 0) spring_january = spring_in_january(rng);

        const double x = static_cast<double>(t);
        truth.trend[t] = config.trend == TrendShape::Linear
                             ? config.base + config.slope * x
                             : config.ceiling /
                                   (1.0 + (config.ceiling / config.base - 1.0) * std::exp(-config.rate * x));
        truth.seasonal[t] = config.seasonal_indices[static_cast<std::size_t>(key.month - 1)];

        double days = kFixedHolidays[static_cast<std::size_t>(key.month - 1)] + (bridge_day(rng) ? 1.0 : 0.0);
        if (key.month == 1 && spring_january) days += kSpringFestivalDays;
        if (key.month == 2 && !spring_january) days += kSpringFestivalDays;
        holidays[t] = days;

        const double anomaly = cpl.temp_noise_sd * normal(rng);
        temp[t] = climatology(key.month) + anomaly;

        const double shock = config.irregular_log_sd * normal(rng);
        const double log_irregular =
            cpl.temp_effect * anomaly + cpl.holiday_effect * (days - expected_holiday_days(key.month)) + shock;
        truth.irregular[t] = std::exp(log_irregular);

        econ[t] = truth.trend[t] / config.base * std::exp(cpl.econ_noise_sd * normal(rng));
        load[t] = truth.trend[t] * truth.seasonal[t] * truth.irregular[t];
    }

    std::vector<std::pair<std::string, std::vector<double>>> optional;
    if (cpl.econ_index) optional.emplace_back(std::string(ExogTable::kEcon), std::move(econ));
    return SynthData{MonthlySeries(config.start, std::move(load)),
                     ExogTable(config.start, std::move(temp), std::move(holidays), std::move(optional)),
                     std::move(truth)};
}

}  // namespace loadcast
