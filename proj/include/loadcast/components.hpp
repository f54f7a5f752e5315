#pragma once

#include <array>
#include <vector>

#include "loadcast/series.hpp"

namespace loadcast {

/// Multiplicative components aligned with a source series: y = trend * seasonal * irregular.
struct ComponentSet {
    MonthKey start;
    std::vector<double> trend;
    std::vector<double> seasonal;
    std::vector<double> irregular;
    /// Seasonal factor per calendar month, January first.
    std::array<double, 12> indices{};

    std::size_t size() const { return trend.size(); }
    MonthKey key(std::size_t i) const { return start.plus(static_cast<long>(i)); }
    double index_for(MonthKey key) const { return indices[static_cast<std::size_t>(key.month - 1)]; }
    std::vector<double> reconstruct() const;
};

/// Largest |T*S*I - y| / |y| over the series.
double max_reconstruction_error(const ComponentSet& components, const MonthlySeries& series);

}  // namespace loadcast
