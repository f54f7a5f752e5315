#include "loadcast/metrics.hpp"

#include <cmath>
#include <string>

#include "loadcast/error.hpp"

namespace loadcast::evalstat {

namespace {

void check_pair(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size()) {
        throw ValidationError("metric inputs differ in length (" + std::to_string(actual.size()) + " vs " +
                              std::to_string(predicted.size()) + ")");
    }
    if (actual.empty()) throw ValidationError("metric needs at least one observation");
}

}  // namespace

double mape(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted);
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0) throw ValidationError("MAPE undefined: actual value " + std::to_string(i) + " is zero");
        sum += std::abs((actual[i] - predicted[i]) / actual[i]);
    }
    return sum / static_cast<double>(actual.size()) * 100.0;
}

double mae(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted);
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) sum += std::abs(actual[i] - predicted[i]);
    return sum / static_cast<double>(actual.size());
}

double rmse(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted);
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) sum += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
    return std::sqrt(sum / static_cast<double>(actual.size()));
}

}  // namespace loadcast::evalstat
