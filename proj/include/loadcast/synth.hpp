#pragma once

#include <array>
#include <cstdint>

#include "loadcast/components.hpp"
#include "loadcast/series.hpp"

namespace loadcast {

enum class TrendShape { Linear, Logistic };

/// How the generated exogenous drivers feed back into the load.
struct ExogCoupling {
    /// Log-irregular response per degree of temperature anomaly (weather shock).
    double temp_effect = 0.004;
    /// Log-irregular response per holiday day above the calendar month's expected count.
    double holiday_effect = -0.012;
    double temp_noise_sd = 1.5;
    /// Emit an econ_index column that follows the trend with multiplicative noise.
    bool econ_index = true;
    double econ_noise_sd = 0.01;
};

struct SynthConfig {
    std::size_t length = 108;
    MonthKey start{2013, 1};

    TrendShape trend = TrendShape::Logistic;
    double base = 1000.0;     // trend value at the first month
    double slope = 5.0;       // linear: change per month
    double ceiling = 2000.0;  // logistic: saturation level
    double rate = 0.02;       // logistic: growth rate per month

    std::array<double, 12> seasonal_indices = default_indices();
    double irregular_log_sd = 0.02;
    ExogCoupling coupling{};
    std::uint64_t seed = 42;

    static std::array<double, 12> default_indices();
    void validate() const;
};

struct SynthData {
    MonthlySeries series;
    ExogTable exog;
    ComponentSet truth;
};

/// y_t = T_t * S_{month(t)} * I_t. Exogenous rows cover exactly the series months.
SynthData synth_generate(const SynthConfig& config);

/// Rescales positive values so their arithmetic mean is 1.
std::array<double, 12> normalized_indices(const std::array<double, 12>& raw);

/// Expected holiday days per calendar month under the generator's calendar.
double expected_holiday_days(int month);

}  // namespace loadcast
