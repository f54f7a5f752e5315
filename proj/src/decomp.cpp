#include "loadcast/decomp.hpp"

#include <algorithm>
#include <cmath>

#include "loadcast/error.hpp"

namespace loadcast::decomp {

namespace {

constexpr std::size_t kHalfWindow = 6;
constexpr std::size_t kMinDecomposeLength = 36;
constexpr std::size_t kExtensionSpan = 12;

/// Least-squares line through (x, y) pairs evaluated at `at`.
double extrapolate_line(std::span<const double> xs, std::span<const double> ys, double at) {
    const double n = static_cast<double>(xs.size());
    if (xs.size() == 1) return ys[0];
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return my + (sxy / sxx) * (at - mx);
}

std::vector<double> tile(const std::array<double, 12>& indices, MonthKey start, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = indices[static_cast<std::size_t>(start.plus(static_cast<long>(i)).month - 1)];
    }
    return out;
}

}  // namespace

std::vector<double> centered_ma_12(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 13) throw ValidationError("centered 2x12 moving average needs length >= 13, got " + std::to_string(n));

    std::vector<double> trend(n, 0.0);
    for (std::size_t i = kHalfWindow; i + kHalfWindow < n; ++i) {
        double sum = 0.5 * (values[i - kHalfWindow] + values[i + kHalfWindow]);
        for (std::size_t j = i - 5; j <= i + 5; ++j) sum += values[j];
        trend[i] = sum / 12.0;
    }

    const std::size_t first = kHalfWindow;
    const std::size_t last = n - 1 - kHalfWindow;
    const std::size_t span = std::min(kExtensionSpan, last - first + 1);

    std::vector<double> xs(span), ys(span);
    for (std::size_t k = 0; k < span; ++k) {
        xs[k] = static_cast<double>(first + k);
        ys[k] = trend[first + k];
    }
    for (std::size_t i = 0; i < first; ++i) trend[i] = extrapolate_line(xs, ys, static_cast<double>(i));

    for (std::size_t k = 0; k < span; ++k) {
        xs[k] = static_cast<double>(last + 1 - span + k);
        ys[k] = trend[last + 1 - span + k];
    }
    for (std::size_t i = last + 1; i < n; ++i) trend[i] = extrapolate_line(xs, ys, static_cast<double>(i));
    return trend;
}

std::array<double, 12> seasonal_indices(std::span<const double> values, std::span<const double> trend,
                                        MonthKey first, IndexMethod method) {
    if (values.size() != trend.size()) throw ValidationError("values and trend lengths differ");
    std::array<std::vector<double>, 12> ratios;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const MonthKey key = first.plus(static_cast<long>(i));
        if (!(trend[i] > 0.0)) throw ValidationError("trend must be strictly positive (" + key.str() + ")");
        const double r = values[i] / trend[i];
        if (!(r > 0.0)) throw ValidationError("non-positive seasonal ratio at " + key.str());
        ratios[static_cast<std::size_t>(key.month - 1)].push_back(r);
    }

    std::array<double, 12> indices{};
    for (std::size_t m = 0; m < 12; ++m) {
        auto& r = ratios[m];
        if (r.empty()) {
            throw ValidationError("no observations for calendar month " + std::to_string(m + 1));
        }
        if (method == IndexMethod::Median) {
            std::sort(r.begin(), r.end());
            const std::size_t mid = r.size() / 2;
            indices[m] = r.size() % 2 == 1 ? r[mid] : 0.5 * (r[mid - 1] + r[mid]);
        } else {
            double sum = 0.0;
            for (double v : r) sum += v;
            indices[m] = sum / static_cast<double>(r.size());
        }
    }

    double grand = 0.0;
    for (double v : indices) grand += v;
    grand /= 12.0;
    for (double& v : indices) v /= grand;
    return indices;
}

ComponentSet decompose(const MonthlySeries& series, const DecomposeOptions& options) {
    const auto& y = series.values();
    const std::size_t n = y.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!(y[i] > 0.0)) {
            throw ValidationError("multiplicative decomposition needs positive loads; " + series.key(i).str() +
                                  " has " + format_double(y[i]));
        }
    }
    if (n < kMinDecomposeLength) {
        throw ValidationError("length < 36: decomposition needs at least 36 months, got " + std::to_string(n));
    }

    // Seasonal ratios only use months where the moving average is fully supported.
    const std::size_t lo = kHalfWindow;
    const std::size_t count = n - 2 * kHalfWindow;
    const MonthKey interior_start = series.key(lo);
    auto interior = [&](const std::vector<double>& v) { return std::span<const double>(v).subspan(lo, count); };

    std::vector<double> trend = centered_ma_12(y);
    auto indices = seasonal_indices(interior(y), interior(trend), interior_start, options.method);

    for (int pass = 0; pass < options.max_refinements; ++pass) {
        const auto seasonal = tile(indices, series.start(), n);
        std::vector<double> adjusted(n);
        for (std::size_t i = 0; i < n; ++i) adjusted[i] = y[i] / seasonal[i];
        trend = centered_ma_12(adjusted);
        const auto refined = seasonal_indices(interior(y), interior(trend), interior_start, options.method);
        double shift = 0.0;
        for (std::size_t m = 0; m < 12; ++m) shift = std::max(shift, std::abs(refined[m] - indices[m]));
        indices = refined;
        if (shift <= options.refinement_tolerance) break;
    }

    ComponentSet out;
    out.start = series.start();
    out.indices = indices;
    out.seasonal = tile(indices, series.start(), n);
    out.irregular.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(trend[i] > 0.0)) {
            throw NumericError("trend estimate is not positive at " + series.key(i).str());
        }
        out.irregular[i] = y[i] / (trend[i] * out.seasonal[i]);
    }
    out.trend = std::move(trend);
    return out;
}

std::vector<double> seasonally_adjust(const MonthlySeries& series, const ComponentSet& components) {
    if (components.size() != series.size() || components.start != series.start()) {
        throw ValidationError("components are not aligned with the series");
    }
    std::vector<double> out(series.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = series[i] / components.seasonal[i];
    return out;
}

}  // namespace loadcast::decomp
