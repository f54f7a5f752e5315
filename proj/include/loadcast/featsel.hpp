#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "loadcast/gbt.hpp"
#include "loadcast/series.hpp"

namespace loadcast::featsel {

/// Pearson correlation. Throws NumericError when either input has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

/// Total GBT split gain per column, from a fit on (features, target).
std::vector<double> rank_importance(const FeatureMatrix& features, const gbt::GbtParams& params = {});

struct FeatureReport {
    std::vector<std::string> names;
    /// Unset when the column (or the target) is constant.
    std::vector<std::optional<double>> pearson;
    std::vector<double> importance;
    std::vector<bool> selected;
    /// True when no column passed the correlation filter and pure top-k was used.
    bool fallback = false;
};

struct Selection {
    std::vector<bool> mask;
    bool fallback = false;
};

/// Keep |r| >= r_min, then the k_top most important of those. Undefined r counts as 0.
Selection select(std::span<const std::optional<double>> pearson, std::span<const double> importance,
                 double r_min, std::size_t k_top);

struct SelectOptions {
    double r_min = 0.3;
    std::size_t k_top = 8;
    gbt::GbtParams gbt{};
};

FeatureReport analyze(const FeatureMatrix& features, const SelectOptions& options = {});

/// Per-column zero-mean / unit-variance scaling; constant columns keep scale 1.
struct ColumnScaler {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd scale;

    static ColumnScaler fit(const Eigen::MatrixXd& X);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
};

}  // namespace loadcast::featsel
