#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace loadcast::evalstat {

/// Seeded shuffle of 0..n-1 cut into k contiguous folds; the first n % k folds get one extra.
std::vector<std::vector<std::size_t>> kfold(std::size_t n, std::size_t k, std::uint64_t seed);

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<std::size_t>& rows);
Eigen::VectorXd take_rows(const Eigen::VectorXd& y, const std::vector<std::size_t>& rows);

/// Mean over folds of the out-of-fold RMSE.
/// `fit(X_train, y_train)` returns a model; `predict(model, X_test)` returns an Eigen::VectorXd.
template <class Fit, class Predict>
double cross_val_rmse(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::size_t k, std::uint64_t seed,
                      Fit&& fit, Predict&& predict) {
    const auto folds = kfold(static_cast<std::size_t>(y.size()), k, seed);
    double total = 0.0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<std::size_t> train;
        for (std::size_t g = 0; g < folds.size(); ++g) {
            if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
        }
        const auto model = fit(take_rows(X, train), take_rows(y, train));
        const Eigen::VectorXd predicted = predict(model, take_rows(X, folds[f]));
        const Eigen::VectorXd held_out = take_rows(y, folds[f]);
        total += std::sqrt((predicted - held_out).squaredNorm() / static_cast<double>(held_out.size()));
    }
    return total / static_cast<double>(folds.size());
}

}  // namespace loadcast::evalstat
