#pragma once

#include <array>
#include <span>
#include <vector>

#include "loadcast/components.hpp"
#include "loadcast/series.hpp"

namespace loadcast::decomp {

enum class IndexMethod { Mean, Median };

struct DecomposeOptions {
    IndexMethod method = IndexMethod::Mean;
    /// Extra trend passes over the seasonally adjusted series. 0 gives the single-pass
    /// classical decomposition.
    int max_refinements = 50;
    /// Refinement stops once no seasonal index moves by more than this.
    double refinement_tolerance = 1e-14;
};

/// 2x12 centered moving average. Interior points (6 <= i <= n-7) use the 13-term weighted
/// window; the six points at each end are extrapolated from an OLS line through the nearest
/// twelve interior values. Requires n >= 13.
std::vector<double> centered_ma_12(std::span<const double> values);

/// Per-calendar-month mean (or median) of values/trend, normalized to mean 1.
/// `first` is the calendar month of values[0].
std::array<double, 12> seasonal_indices(std::span<const double> values, std::span<const double> trend,
                                        MonthKey first, IndexMethod method = IndexMethod::Mean);

/// Multiplicative trend/seasonal/irregular split. Requires at least 36 strictly positive values.
ComponentSet decompose(const MonthlySeries& series, const DecomposeOptions& options = {});

/// y_t / S_t.
std::vector<double> seasonally_adjust(const MonthlySeries& series, const ComponentSet& components);

}  // namespace loadcast::decomp
