#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace loadcast::gbt {

struct GbtParams {
    double learning_rate = 0.02;
    int trees = 1000;
    int max_depth = 3;
    /// L2 penalty on leaf weights.
    double lambda = 1.0;
    /// Minimum regularized gain for a split to be kept.
    double min_split_gain = 0.0;
    int min_samples_leaf = 2;
    /// Row fraction drawn (without replacement) per tree; 1 disables sampling.
    double subsample = 1.0;
    std::uint64_t seed = 42;

    void validate() const;
};

struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double weight = 0.0;
    double gain = 0.0;

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<Node> nodes;  // nodes[0] is the root

    /// Rows with x[feature] < threshold go left; ties go right.
    double predict(std::span<const double> x) const;
};

struct GbtModel {
    double base_score = 0.0;
    double learning_rate = 1.0;
    std::size_t feature_count = 0;
    std::vector<Tree> trees;
    std::vector<double> feature_gain;

    double predict(std::span<const double> x) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& rows) const;
    /// Prediction using only the first `count` trees.
    Eigen::VectorXd predict_prefix(const Eigen::MatrixXd& rows, std::size_t count) const;
};

struct FitTrace {
    /// Training RMSE after 0, 1, ..., M trees.
    std::vector<double> train_rmse;
};

/// Squared-loss boosting with second-order leaf weights and exact greedy splits.
GbtModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GbtParams& params = {},
             FitTrace* trace = nullptr);

/// Total split gain per feature across the ensemble.
std::vector<double> importance(const GbtModel& model);

}  // namespace loadcast::gbt
