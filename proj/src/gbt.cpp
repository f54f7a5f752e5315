#include "loadcast/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "loadcast/error.hpp"

namespace loadcast::gbt {

namespace {

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const Eigen::MatrixXd& X, const std::vector<double>& grad, const GbtParams& params)
        : X_(X), grad_(grad), params_(params) {}

    Tree build(std::vector<std::size_t> rows, std::vector<double>& feature_gain) {
        Tree tree;
        grow(tree, std::move(rows), 0, feature_gain);
        return tree;
    }

private:
    double score(double g, double h) const { return g * g / (h + params_.lambda); }

    int grow(Tree& tree, std::vector<std::size_t> rows, int depth, std::vector<double>& feature_gain) {
        double g_sum = 0.0;
        for (auto r : rows) g_sum += grad_[r];
        const double h_sum = static_cast<double>(rows.size());

        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[static_cast<std::size_t>(id)].weight = -g_sum / (h_sum + params_.lambda);

        if (depth >= params_.max_depth) return id;
        const Split split = best_split(rows, g_sum, h_sum);
        if (split.feature < 0) return id;

        std::vector<std::size_t> left, right;
        for (auto r : rows) {
            (X_(static_cast<Eigen::Index>(r), split.feature) < split.threshold ? left : right).push_back(r);
        }
        feature_gain[static_cast<std::size_t>(split.feature)] += split.gain;
        const int l = grow(tree, std::move(left), depth + 1, feature_gain);
        const int r = grow(tree, std::move(right), depth + 1, feature_gain);
        Node& node = tree.nodes[static_cast<std::size_t>(id)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.gain = split.gain;
        node.left = l;
        node.right = r;
        return id;
    }

    /// Best gain wins; ties keep the lower feature index, then the lower threshold.
    Split best_split(const std::vector<std::size_t>& rows, double g_sum, double h_sum) const {
        Split best;
        const auto min_leaf = static_cast<std::size_t>(std::max(1, params_.min_samples_leaf));
        if (rows.size() < 2 * min_leaf) return best;
        const double parent = score(g_sum, h_sum);

        std::vector<std::size_t> order(rows);
        for (Eigen::Index f = 0; f < X_.cols(); ++f) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const double xa = X_(static_cast<Eigen::Index>(a), f);
                const double xb = X_(static_cast<Eigen::Index>(b), f);
                return xa < xb || (xa == xb && a < b);
            });
            double g_left = 0.0;
            for (std::size_t k = 0; k + 1 < order.size(); ++k) {
                g_left += grad_[order[k]];
                const double lo = X_(static_cast<Eigen::Index>(order[k]), f);
                const double hi = X_(static_cast<Eigen::Index>(order[k + 1]), f);
                const std::size_t n_left = k + 1;
                if (lo == hi || n_left < min_leaf || order.size() - n_left < min_leaf) continue;
                const double h_left = static_cast<double>(n_left);
                const double gain = 0.5 * (score(g_left, h_left) + score(g_sum - g_left, h_sum - h_left) - parent) -
                                    params_.min_split_gain;
                if (gain > 0.0 && gain > best.gain) {
                    double threshold = lo + 0.5 * (hi - lo);
                    if (!(threshold > lo)) threshold = hi;
                    best = Split{static_cast<int>(f), threshold, gain};
                }
            }
        }
        return best;
    }

    const Eigen::MatrixXd& X_;
    const std::vector<double>& grad_;
    const GbtParams& params_;
};

double rmse(const std::vector<double>& pred, const Eigen::VectorXd& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = pred[i] - y(static_cast<Eigen::Index>(i));
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(pred.size()));
}

}  // namespace

void GbtParams::validate() const {
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw ValidationError("learning rate must be in (0, 1]");
    if (trees < 1) throw ValidationError("tree count must be >= 1");
    if (max_depth < 0) throw ValidationError("max depth must be >= 0");
    if (!(lambda >= 0.0)) throw ValidationError("lambda must be >= 0");
    if (!(min_split_gain >= 0.0)) throw ValidationError("min split gain must be >= 0");
    if (min_samples_leaf < 1) throw ValidationError("min samples per leaf must be >= 1");
    if (!(subsample > 0.0 && subsample <= 1.0)) throw ValidationError("subsample must be in (0, 1]");
}

double Tree::predict(std::span<const double> x) const {
    std::size_t id = 0;
    while (!nodes[id].is_leaf()) {
        const Node& n = nodes[id];
        id = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right);
    }
    return nodes[id].weight;
}

double GbtModel::predict(std::span<const double> x) const {
    if (x.size() != feature_count) throw ValidationError("GBT input dimension mismatch");
    double sum = 0.0;
    for (const auto& t : trees) sum += t.predict(x);
    return base_score + learning_rate * sum;
}

Eigen::VectorXd GbtModel::predict_prefix(const Eigen::MatrixXd& rows, std::size_t count) const {
    if (static_cast<std::size_t>(rows.cols()) != feature_count) throw ValidationError("GBT input dimension mismatch");
    count = std::min(count, trees.size());
    Eigen::VectorXd out(rows.rows());
    std::vector<double> x(feature_count);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (std::size_t j = 0; j < feature_count; ++j) x[j] = rows(i, static_cast<Eigen::Index>(j));
        double sum = 0.0;
        for (std::size_t t = 0; t < count; ++t) sum += trees[t].predict(x);
        out(i) = base_score + learning_rate * sum;
    }
    return out;
}

Eigen::VectorXd GbtModel::predict(const Eigen::MatrixXd& rows) const { return predict_prefix(rows, trees.size()); }

GbtModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GbtParams& params, FitTrace* trace) {
    params.validate();
    const auto n = static_cast<std::size_t>(X.rows());
    if (n < 2) throw ValidationError("GBT needs at least 2 rows");
    if (static_cast<std::size_t>(y.size()) != n) throw ValidationError("GBT target length does not match rows");

    GbtModel model;
    model.base_score = y.mean();
    model.learning_rate = params.learning_rate;
    model.feature_count = static_cast<std::size_t>(X.cols());
    model.feature_gain.assign(model.feature_count, 0.0);

    std::vector<double> pred(n, model.base_score);
    std::vector<double> grad(n);
    if (trace) trace->train_rmse.push_back(rmse(pred, y));

    std::mt19937_64 rng(params.seed);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    const auto sample_size =
        std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(params.subsample * static_cast<double>(n))));

    TreeBuilder builder(X, grad, params);
    std::vector<double> x(model.feature_count);
    for (int m = 0; m < params.trees; ++m) {
        for (std::size_t i = 0; i < n; ++i) grad[i] = pred[i] - y(static_cast<Eigen::Index>(i));

        std::vector<std::size_t> rows = all;
        if (params.subsample < 1.0 && sample_size < n) {
            std::shuffle(rows.begin(), rows.end(), rng);
            rows.resize(sample_size);
            std::sort(rows.begin(), rows.end());
        }
        Tree tree = builder.build(std::move(rows), model.feature_gain);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < model.feature_count; ++j) x[j] = X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            pred[i] += params.learning_rate * tree.predict(x);
        }
        model.trees.push_back(std::move(tree));
        if (trace) trace->train_rmse.push_back(rmse(pred, y));
    }
    return model;
}

std::vector<double> importance(const GbtModel& model) { return model.feature_gain; }

}  // namespace loadcast::gbt
