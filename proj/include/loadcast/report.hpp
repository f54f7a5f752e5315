#pragma once

#include <string>
#include <string_view>

#include "loadcast/pipeline.hpp"
#include "loadcast/stats.hpp"

namespace loadcast {

std::string report_to_json(const pipeline::ForecastReport& report, int indent = 2);
/// Parses and runs the consistency check.
pipeline::ForecastReport report_from_json(std::string_view text);

/// Long format `month,series,value` for plotting: actual, predicted and components.
std::string report_plot_csv(const pipeline::ForecastReport& report);

std::string stat_report_to_json(const evalstat::StatReport& report, int indent = 2);

}  // namespace loadcast
