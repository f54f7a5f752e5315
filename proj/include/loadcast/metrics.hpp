#pragma once

#include <span>

namespace loadcast::evalstat {

/// Mean absolute percentage error, in percent. Throws on a zero actual.
double mape(std::span<const double> actual, std::span<const double> predicted);

double mae(std::span<const double> actual, std::span<const double> predicted);

double rmse(std::span<const double> actual, std::span<const double> predicted);

}  // namespace loadcast::evalstat
