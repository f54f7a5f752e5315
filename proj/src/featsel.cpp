#include "loadcast/featsel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "loadcast/error.hpp"

namespace loadcast::featsel {

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("pearson inputs differ in length");
    if (x.size() < 2) throw ValidationError("pearson needs at least 2 observations");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw NumericError("correlation undefined for a constant input");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> rank_importance(const FeatureMatrix& features, const gbt::GbtParams& params) {
    if (!features.target) throw ValidationError("importance ranking needs a target");
    if (features.rows() < 2) throw ValidationError("importance ranking needs at least 2 rows");
    return gbt::importance(gbt::fit(features.data, *features.target, params));
}

Selection select(std::span<const std::optional<double>> pearson, std::span<const double> importance, double r_min,
                 std::size_t k_top) {
    if (pearson.size() != importance.size()) throw ValidationError("report columns differ in length");
    if (!(r_min >= 0.0 && r_min <= 1.0)) throw ValidationError("r_min must be in [0, 1]");
    if (k_top < 1) throw ValidationError("k_top must be >= 1");

    std::vector<std::size_t> candidates;
    for (std::size_t j = 0; j < pearson.size(); ++j) {
        if (std::abs(pearson[j].value_or(0.0)) >= r_min) candidates.push_back(j);
    }
    Selection out;
    out.mask.assign(pearson.size(), false);
    if (candidates.empty()) {
        out.fallback = true;
        candidates.resize(pearson.size());
        std::iota(candidates.begin(), candidates.end(), 0);
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](std::size_t a, std::size_t b) { return importance[a] > importance[b]; });
    for (std::size_t k = 0; k < std::min(k_top, candidates.size()); ++k) out.mask[candidates[k]] = true;
    return out;
}

FeatureReport analyze(const FeatureMatrix& features, const SelectOptions& options) {
    if (!features.target) throw ValidationError("feature analysis needs a target");
    FeatureReport report;
    report.names = features.names;
    const Eigen::VectorXd& y = *features.target;
    const std::span<const double> target(y.data(), static_cast<std::size_t>(y.size()));
    for (Eigen::Index j = 0; j < features.data.cols(); ++j) {
        const Eigen::VectorXd col = features.data.col(j);
        try {
            report.pearson.emplace_back(pearson(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), target));
        } catch (const NumericError&) {
            report.pearson.emplace_back(std::nullopt);
        }
    }
    report.importance = rank_importance(features, options.gbt);
    auto selection = select(report.pearson, report.importance, options.r_min, options.k_top);
    report.selected = std::move(selection.mask);
    report.fallback = selection.fallback;
    return report;
}

ColumnScaler ColumnScaler::fit(const Eigen::MatrixXd& X) {
    ColumnScaler s;
    s.mean = X.colwise().mean();
    s.scale.resize(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double var = (X.col(j).array() - s.mean(j)).square().mean();
        s.scale(j) = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return s;
}

Eigen::MatrixXd ColumnScaler::apply(const Eigen::MatrixXd& X) const {
    if (X.cols() != mean.size()) throw ValidationError("scaler column count mismatch");
    Eigen::MatrixXd out(X.rows(), X.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i) out.row(i) = (X.row(i) - mean).cwiseQuotient(scale);
    return out;
}

}  // namespace loadcast::featsel
